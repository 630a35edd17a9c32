#pragma once

#include <array>
#include <functional>
#include <vector>

#include "diraclap/types.hpp"

namespace diraclap {

/// Uniform grid on [-L, L)^n with nodes x_i = -L + i h, h = 2L / points_per_axis.
/// Point index p = i0 + P (i1 + P i2); axis 0 varies fastest.
struct Grid {
  int n = 2;
  double L = 1.0;
  int points_per_axis = 2;
  bool periodic = false;

  /// Validating constructor.
  static Grid make(int n, double L, int points_per_axis, bool periodic = false);

  double h() const { return 2.0 * L / points_per_axis; }
  double cell_volume() const;
  Eigen::Index num_points() const;
  double coordinate(int i) const { return -L + i * h(); }
  std::array<int, 3> multi_index(Eigen::Index p) const;
  std::array<double, 3> point(Eigen::Index p) const;
  double radius(Eigen::Index p) const;

  bool operator==(const Grid&) const = default;
};

/// Complex spinor-valued samples, layout values[p * spinor_dim + a].
struct SpinorField {
  Grid grid;
  int spinor_dim = 1;
  CVector values;

  static SpinorField zeros(const Grid& grid, int spinor_dim);
  static SpinorField from_function(const Grid& grid, int spinor_dim,
                                   const std::function<CVector(const std::array<double, 3>&)>& f);

  /// h^{n/2} times the Euclidean norm of the samples.
  double l2_norm() const;
};

/// <x>^{-sigma} at every point, repeated spinor_dim times.
RVector weight_vector(const Grid& grid, int spinor_dim, double sigma);

/// Dyadic shells D_0 = {|x| <= 1}, D_j = {2^{j-1} < |x| <= 2^j}, truncated to the box:
/// j_max = ceil(log2 L) and the outermost shell absorbs the corners.
struct DyadicShells {
  Grid grid;
  int j_max = 0;
  std::vector<int> shell_of_point;

  explicit DyadicShells(const Grid& grid);
  int count() const { return j_max + 1; }
  /// 0/1 mask of shell j, repeated spinor_dim times.
  RVector mask(int j, int spinor_dim) const;
  /// 2^{s j(x)/2} per point and component, s = +1 or -1.
  RVector dyadic_weight(int spinor_dim, double exponent_sign) const;
  /// L^2 norm of f restricted to each shell.
  std::vector<double> shell_norms(const SpinorField& f) const;
};

double b_norm(const SpinorField& f, const DyadicShells& shells);
double bstar_norm(const SpinorField& f, const DyadicShells& shells);
/// h^n sum conj(f) g
cplx inner_product(const SpinorField& f, const SpinorField& g);

}  // namespace diraclap
