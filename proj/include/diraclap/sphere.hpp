#pragma once

#include <span>
#include <vector>

#include "diraclap/types.hpp"

namespace diraclap {

/// Smooth partition of unity {Phi_i} on S^{n-1}, n in {2, 3}.
/// Each Phi_i = b_i / sum_j b_j with b_i a smoothstep bump of angular radius `support_radius`
/// around centers[i]; n = 2 uses ceil(2 pi / delta) equal arcs, n = 3 a geodesic refinement
/// of the icosahedron.
class SpherePartition {
 public:
  static constexpr int kMaxCaps = 10000;

  SpherePartition(int n, double delta);

  int dimension() const { return n_; }
  double delta() const { return delta_; }
  int count() const { return static_cast<int>(centers_.size()); }
  const std::vector<std::array<double, 3>>& centers() const { return centers_; }
  /// Angular radius of supp Phi_i.
  double support_radius() const { return outer_; }
  double support_diameter() const { return 2.0 * outer_; }

  /// Phi_i at a (not necessarily unit) nonzero vector.
  double weight(int i, std::span<const double> omega) const;
  /// All Phi_i at a direction (sums to one).
  std::vector<double> weights(std::span<const double> omega) const;

  /// Great-circle distance between the supports of Phi_i and Phi_j (0 when they overlap).
  double separation(int i, int j) const;
  /// Great-circle distance between centers.
  double center_angle(int i, int j) const;

 private:
  double bump(double angle) const;

  int n_;
  double delta_;
  double inner_ = 0.0;
  double outer_ = 0.0;
  std::vector<std::array<double, 3>> centers_;
};

}  // namespace diraclap
