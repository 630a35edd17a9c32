#include "diraclap/highenergy.hpp"

#include <cmath>
#include <sstream>

#include "diraclap/parallel.hpp"

namespace diraclap {

std::string to_string(ProductClass c) { return c == ProductClass::Directed ? "directed" : "undirected"; }

ProductClass classify_product(const std::vector<int>& indices, const SpherePartition& partition) {
  if (indices.empty()) throw ValidationError("product indices must not be empty");
  std::vector<int> caps;
  for (int i : indices) {
    if (i == kShortRange) continue;
    if (i < 0 || i >= partition.count())
      throw ValidationError("unknown product index " + std::to_string(i) + " (partition has " +
                            std::to_string(partition.count()) + " caps)");
    caps.push_back(i);
  }
  const double limit = kDirectedSeparation * partition.delta();
  for (std::size_t k = 0; k + 1 < caps.size(); ++k)
    if (!(partition.separation(caps[k], caps[k + 1]) < limit)) return ProductClass::Undirected;
  return ProductClass::Directed;
}

namespace {

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Gradient of omega -> Phi_i(omega / |omega|) by central differences.
std::array<double, 3> cap_gradient(const SpherePartition& partition, int index, std::span<const double> u, double r) {
  const int n = static_cast<int>(u.size());
  const double eps = 1e-6 * r;
  std::array<double, 3> g{0.0, 0.0, 0.0};
  std::array<double, 3> a{0.0, 0.0, 0.0}, b{0.0, 0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) a[j] = b[j] = u[j];
    a[k] += eps;
    b[k] -= eps;
    g[k] = (partition.weight(index, std::span<const double>(a.data(), n)) -
            partition.weight(index, std::span<const double>(b.data(), n))) /
           (2.0 * eps);
  }
  return g;
}

// Scalar value and gradient of a decomposition piece.
std::pair<cplx, std::array<cplx, 3>> piece_with_gradient(int n, double z, double d, const SpherePartition& partition,
                                                          int index, std::span<const double> u, Branch branch) {
  const double r = norm_of(u);
  const cplx k = schrodinger_kernel(n, z, r, branch);
  const cplx dk = schrodinger_kernel_dr(n, z, r, branch);
  const double eta = range_cutoff(r, d);
  const double deta = range_cutoff_derivative(r, d);
  std::array<cplx, 3> grad{};
  if (index == kShortRange) {
    const cplx radial = dk * (1.0 - eta) - k * deta;
    for (int j = 0; j < n; ++j) grad[j] = radial * u[j] / r;
    return {k * (1.0 - eta), grad};
  }
  if (eta == 0.0) return {0.0, grad};
  const double phi = partition.weight(index, u);
  const auto gphi = cap_gradient(partition, index, u, r);
  const cplx radial = (dk * eta + k * deta) * phi;
  for (int j = 0; j < n; ++j) grad[j] = radial * u[j] / r + k * eta * gphi[j];
  return {k * eta * phi, grad};
}

void check_resolution(const Grid& grid, double z) {
  if (grid.h() > kPi / (4.0 * z) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid spacing h = " << grid.h() << " does not resolve z = " << z << " (need h <= pi / (4 z))";
    throw ValidationError(msg.str());
  }
}

}  // namespace

cplx cap_piece(int n, double z, double d, const SpherePartition& partition, int index, std::span<const double> u,
               Branch branch) {
  const double r = norm_of(u);
  if (index == kShortRange) return schrodinger_kernel(n, z, r, branch) * (1.0 - range_cutoff(r, d));
  const double eta = range_cutoff(r, d);
  if (eta == 0.0) return 0.0;
  return schrodinger_kernel(n, z, r, branch) * eta * partition.weight(index, u);
}

MatrixKernel dirac_piece_kernel(const DiracMatrices& mats, double m, double z, double d,
                                const SpherePartition& partition, int index, Branch branch) {
  const int n = mats.dimension;
  if (partition.dimension() != n) throw ValidationError("partition and Dirac family dimensions differ");
  if (!(z > 0.0) || !(d > 0.0)) throw ValidationError("z and d must be positive");
  const double lambda = std::sqrt(z * z + m * m);
  MatrixKernel k;
  k.spinor_dim = mats.spinor_dim;
  k.off_diagonal = [=, &partition](std::span<const double> u) {
    const auto [v, grad] = piece_with_gradient(n, z, d, partition, index, u, branch);
    return dirac_from_scalar(mats, m, lambda, v, std::span<const cplx>(grad.data(), n));
  };
  k.cell = [=](double h) {
    if (index != kShortRange) return CMatrix(CMatrix::Zero(mats.spinor_dim, mats.spinor_dim));
    const cplx c = schrodinger_cell_integral(n, z, h, branch);
    CMatrix v = (m * c) * mats.beta;
    v.diagonal().array() += lambda * c;
    return v;
  };
  return k;
}

OperatorPtr lz_factor(const LapProblem& problem, double z, double d, const SpherePartition& partition, int index,
                      Branch branch) {
  auto R = assemble_convolution(dirac_piece_kernel(problem.mats, problem.m, z, d, partition, index, branch),
                                problem.grid, branch, "directional_piece");
  return product({problem.V, R});
}

OperatorPtr product_operator(const LapProblem& problem, const ProductSpec& spec, const SpherePartition& partition,
                             Branch branch) {
  if (spec.indices.empty()) throw ValidationError("product indices must not be empty");
  check_resolution(problem.grid, spec.z);
  classify_product(spec.indices, partition);  // validates the indices
  std::vector<OperatorPtr> factors;
  for (int idx : spec.indices) factors.push_back(lz_factor(problem, spec.z, spec.d, partition, idx, branch));
  return product(std::move(factors));
}

NormBracket product_norm(const LapProblem& problem, const ProductSpec& spec, const SpherePartition& partition,
                         Branch branch, const NormOptions& opts) {
  if (problem.V->is_zero()) return NormBracket{0.0, 0.0, true};
  const DyadicShells shells(problem.grid);
  return b_to_b_norm(product_operator(problem, spec, partition, branch), shells, problem.spinor_dim(), opts);
}

namespace {

OperatorPtr full_factor(const LapProblem& problem, double z, Branch branch) {
  check_resolution(problem.grid, z);
  const double lambda = std::sqrt(z * z + problem.m * problem.m);
  return product({problem.V, free_resolvent(problem, lambda, branch)});
}

NeumannResult neumann_with_single(const LapProblem& problem, int M, double z, Branch branch, const NormOptions& opts,
                                  double single_hi) {
  if (M < 1) throw ValidationError("Neumann product length M must be at least 1");
  if (!(z > 0.0)) throw ValidationError("z must be positive");
  NeumannResult res;
  res.M = M;
  res.z = z;
  if (problem.V->is_zero()) {
    res.pass = true;
    res.inverse_bound = 1.0;
    return res;
  }
  const DyadicShells shells(problem.grid);
  const OperatorPtr factor = full_factor(problem, z, branch);
  if (single_hi < 0.0) single_hi = b_to_b_norm(factor, shells, problem.spinor_dim(), opts).hi;
  res.single_factor_hi = single_hi;
  const NormBracket b = b_to_b_norm(product(std::vector<OperatorPtr>(M, factor)), shells, problem.spinor_dim(), opts);
  res.norm_lo = b.lo;
  res.norm_hi = b.hi;
  res.pass = b.hi <= 0.5;
  if (res.pass) {
    double partial = 0.0, q = 1.0;
    for (int l = 0; l < M; ++l) {
      partial += q;
      q *= single_hi;
    }
    res.inverse_bound = partial / (1.0 - b.hi);
  }
  return res;
}

}  // namespace

NeumannResult neumann_tail_check(const LapProblem& problem, int M, double z, Branch branch, const NormOptions& opts) {
  return neumann_with_single(problem, M, z, branch, opts, -1.0);
}

NeumannFrontier neumann_frontier(const LapProblem& problem, const std::vector<int>& M_list,
                                 const std::vector<double>& z_list, Branch branch, const NormOptions& opts,
                                 int threads) {
  if (M_list.empty() || z_list.empty()) throw ValidationError("M_list and z_list must not be empty");
  NeumannFrontier out;
  std::vector<double> single(z_list.size(), 0.0);
  const DyadicShells shells(problem.grid);
  parallel_for(
      z_list.size(),
      [&](std::size_t k) {
        if (problem.V->is_zero()) return;
        single[k] = b_to_b_norm(full_factor(problem, z_list[k], branch), shells, problem.spinor_dim(), opts).hi;
      },
      threads);
  out.results.resize(z_list.size() * M_list.size());
  parallel_for(
      out.results.size(),
      [&](std::size_t t) {
        const std::size_t k = t / M_list.size(), j = t % M_list.size();
        out.results[t] = neumann_with_single(problem, M_list[j], z_list[k], branch, opts, single[k]);
      },
      threads);
  for (const NeumannResult& r : out.results) {
    if (r.M != 2) continue;
    const double bound = r.single_factor_hi * r.single_factor_hi;
    if (r.norm_lo > 1.05 * bound) {
      std::ostringstream msg;
      msg << "submultiplicativity discrepancy at z = " << r.z << ": |T^2| lower bracket " << r.norm_lo
          << " exceeds |T|^2 = " << bound << " by more than 5%";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("exponent fit needs at least two points");
  double mx = 0.0, my = 0.0;
  const double N = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / N;
    my += std::log(y[i]) / N;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

double north_angle(std::span<const double> u, double r, int axis) { return std::acos(std::clamp(u[axis] / r, -1.0, 1.0)); }

double cap_along(std::span<const double> u, double r, double delta, int axis) {
  return cap_bump(north_angle(u, r, axis), delta);
}

MatrixKernel scalar_kernel(std::function<cplx(std::span<const double>)> f, cplx cell_value) {
  MatrixKernel k;
  k.spinor_dim = 1;
  k.off_diagonal = [f = std::move(f)](std::span<const double> u) {
    CMatrix v(1, 1);
    v(0, 0) = f(u);
    return v;
  };
  k.cell = [cell_value](double) {
    CMatrix v(1, 1);
    v(0, 0) = cell_value;
    return v;
  };
  return k;
}

void check_alpha(int alpha_order) {
  if (alpha_order != 0 && alpha_order != 1) throw ValidationError("derivative order must be 0 or 1");
}

}  // namespace

ScalingTable dir_res_scaling_check(const Grid& grid, double d, double delta, int alpha_order,
                                   const std::vector<double>& lambdas, const NormOptions& opts) {
  check_alpha(alpha_order);
  if (!(delta > 0.0 && delta < 1.0) || !(d > 0.0)) throw ValidationError("need d > 0 and delta in (0, 1)");
  ScalingTable t;
  const int n = grid.n;
  const DyadicShells shells(grid);
  for (double lambda : lambdas) {
    if (!(lambda >= 1.0)) throw ValidationError("scaling checks need lambda >= 1");
    check_resolution(grid, lambda);
    auto f = [=](std::span<const double> u) -> cplx {
      const double r = norm_of(u);
      const double eta = range_cutoff(r, d);
      if (eta == 0.0) return 0.0;
      const cplx k = schrodinger_kernel(n, lambda, r, Branch::Outgoing);
      const double phi = cap_along(u, r, delta, 0);
      if (alpha_order == 0) return k * eta * phi;
      const cplx dk = schrodinger_kernel_dr(n, lambda, r, Branch::Outgoing);
      const double deta = range_cutoff_derivative(r, d);
      std::array<double, 3> a{u[0], n > 1 ? u[1] : 0.0, n > 2 ? u[2] : 0.0}, b = a;
      const double eps = 1e-6 * r;
      a[0] += eps;
      b[0] -= eps;
      const double dphi = (cap_along(std::span<const double>(a.data(), n), norm_of(std::span<const double>(a.data(), n)),
                                     delta, 0) -
                           cap_along(std::span<const double>(b.data(), n), norm_of(std::span<const double>(b.data(), n)),
                                     delta, 0)) /
                          (2.0 * eps);
      return (dk * eta + k * deta) * phi * (u[0] / r) + k * eta * dphi;
    };
    auto op = assemble_convolution(scalar_kernel(f, 0.0), grid, Branch::Outgoing, "directed_resolvent");
    t.lambdas.push_back(lambda);
    t.norms.push_back(b_to_bstar_norm(op, shells, 1, opts).hi);
  }
  if (t.lambdas.size() >= 2) t.exponent = fit_exponent(t.lambdas, t.norms);
  return t;
}

ScalingTable short_range_check(const Grid& grid, double d, int alpha_order, const std::vector<double>& lambdas,
                               bool hold_product, const NormOptions& opts) {
  check_alpha(alpha_order);
  if (!(d > 0.0)) throw ValidationError("range d must be positive");
  ScalingTable t;
  const int n = grid.n;
  for (double lambda : lambdas) {
    if (!(lambda >= 1.0)) throw ValidationError("scaling checks need lambda >= 1");
    const double dd = hold_product ? d / lambda : d;
    auto f = [=](std::span<const double> u) -> cplx {
      const double r = norm_of(u);
      const double cut = 1.0 - range_cutoff(r, dd);
      const cplx k = schrodinger_kernel(n, lambda, r, Branch::Outgoing);
      if (alpha_order == 0) return k * cut;
      const cplx dk = schrodinger_kernel_dr(n, lambda, r, Branch::Outgoing);
      return (dk * cut - k * range_cutoff_derivative(r, dd)) * (u[0] / r);
    };
    const cplx cell = alpha_order == 0 ? schrodinger_cell_integral(n, lambda, grid.h(), Branch::Outgoing) : cplx(0.0);
    auto op = assemble_convolution(scalar_kernel(f, cell), grid, Branch::Outgoing, "short_range");
    t.lambdas.push_back(lambda);
    t.norms.push_back(spectral_norm(*op, opts).value);
  }
  if (t.lambdas.size() >= 2) t.exponent = fit_exponent(t.lambdas, t.norms);
  return t;
}

double annulus_bump(double r) { return smoothstep((r - 1.0) / 0.25) * (1.0 - smoothstep((r - 1.75) / 0.25)); }

double oscillatory_norm(const Grid& grid, double delta, double p, double R1, double R2, const NormOptions& opts) {
  if (grid.n != 2) throw ValidationError("the oscillatory check is implemented for n = 2");
  if (!(p >= 0.5 && p <= 1.5)) throw ValidationError("p must lie in [(n-1)/2, (n+1)/2] = [1/2, 3/2]");
  if (!(R1 >= 1.0 && R2 >= 1.0)) throw ValidationError("R1 and R2 must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (2.0 * std::max(R1, R2) > grid.L) throw ValidationError("grid box must contain the annuli |x| < 2 R");
  auto f = [=](std::span<const double> u) -> cplx {
    const double r = norm_of(u);
    const cplx a = split_amplitude(2, r);
    if (a == 0.0) return 0.0;
    const double phi = cap_along(u, r, delta, 1);
    if (phi == 0.0) return 0.0;
    return std::exp(cplx(0.0, r)) * std::pow(r, -p) * a * phi;
  };
  auto T = assemble_convolution(scalar_kernel(f, 0.0), grid, Branch::Outgoing, "oscillatory");
  RVector left(grid.num_points()), right(grid.num_points());
  for (Eigen::Index q = 0; q < grid.num_points(); ++q) {
    left[q] = annulus_bump(grid.radius(q) / R1);
    right[q] = annulus_bump(grid.radius(q) / R2);
  }
  return spectral_norm(WeightedOperator(T, left, right), opts).value;
}

double oscillatory_constant(const Grid& grid, const NormOptions& opts) {
  return oscillatory_norm(grid, 0.5, 0.5, 1.0, 1.0, opts);
}

OscillatoryResult oscillatory_norm_check(const Grid& grid, double delta, double p, double R1, double R2, double C,
                                         const NormOptions& opts) {
  OscillatoryResult r;
  r.measured = oscillatory_norm(grid, delta, p, R1, R2, opts);
  r.bound = C * std::pow(delta, p - 0.5) * std::sqrt(R1 * R2);
  return r;
}

}  // namespace diraclap
