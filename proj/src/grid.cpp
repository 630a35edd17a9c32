#include "diraclap/grid.hpp"

#include <cmath>
#include <string>

#include "diraclap/simd.hpp"

namespace diraclap {

Grid Grid::make(int n, double L, int points_per_axis, bool periodic) {
  if (n != 2 && n != 3) throw ValidationError("grid dimension must be 2 or 3, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid half-width L must be positive");
  if (points_per_axis < 2) throw ValidationError("grid needs at least 2 points per axis");
  return Grid{n, L, points_per_axis, periodic};
}

double Grid::cell_volume() const { return std::pow(h(), n); }

Eigen::Index Grid::num_points() const {
  Eigen::Index total = 1;
  for (int k = 0; k < n; ++k) total *= points_per_axis;
  return total;
}

std::array<int, 3> Grid::multi_index(Eigen::Index p) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < n; ++k) {
    idx[k] = static_cast<int>(p % points_per_axis);
    p /= points_per_axis;
  }
  return idx;
}

std::array<double, 3> Grid::point(Eigen::Index p) const {
  const auto idx = multi_index(p);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int k = 0; k < n; ++k) x[k] = coordinate(idx[k]);
  return x;
}

double Grid::radius(Eigen::Index p) const {
  const auto x = point(p);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

SpinorField SpinorField::zeros(const Grid& grid, int spinor_dim) {
  return SpinorField{grid, spinor_dim, CVector::Zero(grid.num_points() * spinor_dim)};
}

SpinorField SpinorField::from_function(const Grid& grid, int spinor_dim,
                                       const std::function<CVector(const std::array<double, 3>&)>& f) {
  SpinorField out = zeros(grid, spinor_dim);
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) out.values.segment(p * spinor_dim, spinor_dim) = f(grid.point(p));
  return out;
}

double SpinorField::l2_norm() const {
  return std::sqrt(grid.cell_volume() * simd::active().norm_sq(values.data(), values.size()));
}

RVector weight_vector(const Grid& grid, int spinor_dim, double sigma) {
  RVector w(grid.num_points() * spinor_dim);
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) {
    const double r = grid.radius(p);
    w.segment(p * spinor_dim, spinor_dim).setConstant(std::pow(1.0 + r * r, -sigma / 2.0));
  }
  return w;
}

DyadicShells::DyadicShells(const Grid& g) : grid(g) {
  j_max = std::max(0, static_cast<int>(std::ceil(std::log2(g.L) - 1e-12)));
  shell_of_point.resize(g.num_points());
  for (Eigen::Index p = 0; p < g.num_points(); ++p) {
    const double r = g.radius(p);
    int j = 0;
    if (r > 1.0) j = static_cast<int>(std::ceil(std::log2(r) - 1e-12));
    shell_of_point[p] = std::min(std::max(j, 0), j_max);
  }
}

RVector DyadicShells::mask(int j, int spinor_dim) const {
  RVector m = RVector::Zero(grid.num_points() * spinor_dim);
  for (Eigen::Index p = 0; p < grid.num_points(); ++p)
    if (shell_of_point[p] == j) m.segment(p * spinor_dim, spinor_dim).setOnes();
  return m;
}

RVector DyadicShells::dyadic_weight(int spinor_dim, double exponent_sign) const {
  RVector w(grid.num_points() * spinor_dim);
  for (Eigen::Index p = 0; p < grid.num_points(); ++p)
    w.segment(p * spinor_dim, spinor_dim).setConstant(std::pow(2.0, exponent_sign * shell_of_point[p] / 2.0));
  return w;
}

std::vector<double> DyadicShells::shell_norms(const SpinorField& f) const {
  std::vector<double> sq(count(), 0.0);
  const int s = f.spinor_dim;
  for (Eigen::Index p = 0; p < grid.num_points(); ++p)
    sq[shell_of_point[p]] += f.values.segment(p * s, s).squaredNorm();
  for (double& v : sq) v = std::sqrt(grid.cell_volume() * v);
  return sq;
}

double b_norm(const SpinorField& f, const DyadicShells& shells) {
  const auto norms = shells.shell_norms(f);
  double total = 0.0;
  for (int j = 0; j < shells.count(); ++j) total += std::pow(2.0, j / 2.0) * norms[j];
  return total;
}

double bstar_norm(const SpinorField& f, const DyadicShells& shells) {
  const auto norms = shells.shell_norms(f);
  double best = 0.0;
  for (int j = 0; j < shells.count(); ++j) best = std::max(best, std::pow(2.0, -j / 2.0) * norms[j]);
  return best;
}

cplx inner_product(const SpinorField& f, const SpinorField& g) {
  return f.grid.cell_volume() * simd::active().dotc(f.values.data(), g.values.data(), f.values.size());
}

}  // namespace diraclap
