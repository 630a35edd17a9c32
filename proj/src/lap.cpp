#include "diraclap/lap.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "diraclap/parallel.hpp"

namespace diraclap {

LapProblem LapProblem::make(const DiracMatrices& mats, double m, const Grid& grid, const PotentialSpec& spec) {
  if (!(m >= 0.0)) throw ValidationError("mass must be non-negative");
  if (mats.dimension != grid.n) throw ValidationError("Dirac family and grid dimensions differ");
  auto V = std::make_shared<MultiplicationOperator>(sample_potential(spec, mats, grid));
  return LapProblem{mats, m, grid, std::move(V)};
}

std::shared_ptr<ConvolutionOperator> free_resolvent(const LapProblem& problem, double lambda, Branch branch) {
  if (!(std::abs(lambda) > problem.m))
    throw ValidationError("boundary values of the resolvent need |lambda| > m");
  return assemble_convolution(dirac_matrix_kernel(problem.mats, problem.m, lambda, branch), problem.grid, branch,
                              "free_resolvent");
}

std::shared_ptr<ConvolutionOperator> free_resolvent(const LapProblem& problem, cplx lambda) {
  if (lambda.imag() == 0.0) return free_resolvent(problem, lambda.real(), Branch::Outgoing);
  if (lambda.imag() < 0.0) throw ValidationError("complex spectral parameter must have Im lambda > 0");
  return assemble_convolution(dirac_matrix_kernel(problem.mats, problem.m, lambda), problem.grid, Branch::Outgoing,
                              "free_resolvent");
}

namespace {

CVector gather(const CVector& v, const std::vector<Eigen::Index>& pts, int s) {
  CVector out(static_cast<Eigen::Index>(pts.size()) * s);
  for (std::size_t i = 0; i < pts.size(); ++i) out.segment(i * s, s) = v.segment(pts[i] * s, s);
  return out;
}

void scatter_into(CVector& v, const CVector& compact, const std::vector<Eigen::Index>& pts, int s) {
  for (std::size_t i = 0; i < pts.size(); ++i) v.segment(pts[i] * s, s) = compact.segment(i * s, s);
}

}  // namespace

PerturbedResolvent::PerturbedResolvent(std::shared_ptr<const ConvolutionOperator> R0,
                                       std::shared_ptr<const MultiplicationOperator> V, cplx lambda)
    : R0_(std::move(R0)), V_(std::move(V)), lambda_(lambda) {
  if (V_->size() != R0_->size()) throw ValidationError("potential and resolvent live on different spaces");
  support_ = V_->support();
  if (support_.empty()) return;
  const int s = R0_->spinor_dim();
  reduced_ = R0_->dense_block(support_, support_);
  for (std::size_t i = 0; i < support_.size(); ++i)
    reduced_.middleRows(i * s, s) = V_->block(support_[i]) * reduced_.middleRows(i * s, s);
  reduced_ += CMatrix::Identity(reduced_.rows(), reduced_.cols());
  lu_.compute(reduced_);
  const double rcond = lu_.rcond();
  condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kNearSingularCondition)) {
    std::ostringstream msg;
    msg << "I + V R0 is near singular at lambda = " << lambda_ << " (condition " << condition_
        << "): possible embedded eigenvalue or resonance";
    throw NearSingularError(msg.str(), lambda_, condition_);
  }
  refine_ = condition_ > kRefinementCondition;
}

namespace {

// P A = L U, so A* x = b is U* L* P x = b. Works on the stored factors without copying them.
CVector lu_adjoint_solve(const Eigen::PartialPivLU<CMatrix>& lu, const CVector& b) {
  CVector y = lu.matrixLU().triangularView<Eigen::Upper>().adjoint().solve(b);
  lu.matrixLU().triangularView<Eigen::UnitLower>().adjoint().solveInPlace(y);
  return lu.permutationP().transpose() * y;
}

}  // namespace

CVector PerturbedResolvent::reduced_solve(const CVector& rhs, bool adjoint) const {
  CVector x = adjoint ? lu_adjoint_solve(lu_, rhs) : CVector(lu_.solve(rhs));
  if (refine_) {
    const CVector r = rhs - (adjoint ? CVector(reduced_.adjoint() * x) : CVector(reduced_ * x));
    x += adjoint ? lu_adjoint_solve(lu_, r) : CVector(lu_.solve(r));
  }
  return x;
}

void PerturbedResolvent::solve(const CVector& f, CVector& g) const {
  g = f;
  if (support_.empty()) return;
  const int s = R0_->spinor_dim();
  CVector outside = f, t, vt;
  scatter_into(outside, CVector::Zero(static_cast<Eigen::Index>(support_.size()) * s), support_, s);
  R0_->apply(outside, t);
  V_->apply(t, vt);
  const CVector rhs = gather(f, support_, s) - gather(vt, support_, s);
  scatter_into(g, reduced_solve(rhs, false), support_, s);
}

void PerturbedResolvent::solve_adjoint(const CVector& f, CVector& g) const {
  g = f;
  if (support_.empty()) return;
  const int s = R0_->spinor_dim();
  const CVector gS = reduced_solve(gather(f, support_, s), true);
  CVector ext = CVector::Zero(f.size()), vext, t;
  scatter_into(ext, gS, support_, s);
  V_->apply(ext, vext);
  R0_->apply_adjoint(vext, t);
  g = f - t;
  scatter_into(g, gS, support_, s);
}

void PerturbedResolvent::apply(const CVector& x, CVector& y) const {
  CVector g;
  solve(x, g);
  R0_->apply(g, y);
}

void PerturbedResolvent::apply_adjoint(const CVector& x, CVector& y) const {
  CVector t;
  R0_->apply_adjoint(x, t);
  solve_adjoint(t, y);
}

std::shared_ptr<PerturbedResolvent> perturbed_resolvent(const LapProblem& problem, cplx lambda, Branch branch) {
  std::shared_ptr<ConvolutionOperator> R0;
  if (lambda.imag() == 0.0) {
    R0 = free_resolvent(problem, lambda.real(), branch);
  } else {
    R0 = free_resolvent(problem, lambda);
  }
  return std::make_shared<PerturbedResolvent>(std::move(R0), problem.V, lambda);
}

namespace {

void validate_sigma(double sigma) {
  if (!(sigma > 0.5)) throw ValidationError("sigma must exceed 1/2 for weighted resolvent bounds");
}

void finalize(LapReport& rep) {
  rep.sup_norm = 0.0;
  for (double v : rep.norms_weighted)
    if (std::isfinite(v)) rep.sup_norm = std::max(rep.sup_norm, v);
}

}  // namespace

LapReport lap_sweep(const LapProblem& problem, const std::vector<double>& lambda_grid, double sigma, Branch branch,
                    const SweepOptions& opts) {
  if (lambda_grid.empty()) throw ValidationError("lambda_grid must not be empty");
  validate_sigma(sigma);
  for (double l : lambda_grid)
    if (!(std::abs(l) > problem.m)) throw ValidationError("every lambda must satisfy |lambda| > m");
  const std::size_t N = lambda_grid.size();
  LapReport rep;
  rep.sigma = sigma;
  rep.branch = branch;
  rep.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  rep.norms_weighted.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.conditions.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.flags.assign(N, "ok");
  if (opts.with_b_bstar) rep.norms_b_bstar.assign(N, std::numeric_limits<double>::quiet_NaN());
  const DyadicShells shells(problem.grid);
  parallel_for(
      N,
      [&](std::size_t i) {
        try {
          auto R = perturbed_resolvent(problem, lambda_grid[i], branch);
          rep.conditions[i] = R->condition();
          const NormResult nr = weighted_operator_norm(R, problem.grid, problem.spinor_dim(), sigma, opts.norm);
          rep.norms_weighted[i] = nr.value;
          bool converged = nr.converged;
          if (opts.with_b_bstar) {
            const NormBracket b = b_to_bstar_norm(R, shells, problem.spinor_dim(), opts.norm);
            rep.norms_b_bstar[i] = b.hi;
            converged = converged && b.converged;
          }
          rep.flags[i] = !converged ? "not_converged" : (R->refined() ? "refined" : "ok");
        } catch (const NearSingularError& e) {
          rep.conditions[i] = e.condition();
          rep.flags[i] = "near_singular";
        }
      },
      opts.threads);
  finalize(rep);
  return rep;
}

LapReport complex_sweep(const LapProblem& problem, double lambda, const std::vector<double>& gamma_grid, double sigma,
                        const SweepOptions& opts) {
  if (gamma_grid.empty()) throw ValidationError("gamma_grid must not be empty");
  validate_sigma(sigma);
  if (!(std::abs(lambda) > problem.m)) throw ValidationError("lambda must satisfy |lambda| > m");
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw ValidationError("every gamma must be positive");
  const std::size_t N = gamma_grid.size();
  LapReport rep;
  rep.sigma = sigma;
  rep.branch = Branch::Outgoing;
  rep.norms_weighted.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.conditions.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.boundary_differences.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.flags.assign(N, "ok");
  if (opts.with_b_bstar) rep.norms_b_bstar.assign(N, std::numeric_limits<double>::quiet_NaN());
  for (double g : gamma_grid) rep.lambdas.emplace_back(lambda, g);
  std::shared_ptr<const PerturbedResolvent> boundary;
  try {
    boundary = perturbed_resolvent(problem, lambda, Branch::Outgoing);
  } catch (const NearSingularError&) {
    boundary = nullptr;
  }
  const DyadicShells shells(problem.grid);
  parallel_for(
      N,
      [&](std::size_t i) {
        try {
          auto R = perturbed_resolvent(problem, rep.lambdas[i]);
          rep.conditions[i] = R->condition();
          const NormResult nr = weighted_operator_norm(R, problem.grid, problem.spinor_dim(), sigma, opts.norm);
          rep.norms_weighted[i] = nr.value;
          bool converged = nr.converged;
          if (boundary) {
            const NormResult d =
                weighted_operator_norm(difference(R, boundary), problem.grid, problem.spinor_dim(), sigma, opts.norm);
            rep.boundary_differences[i] = d.value;
            converged = converged && d.converged;
          }
          if (opts.with_b_bstar) {
            const NormBracket b = b_to_bstar_norm(R, shells, problem.spinor_dim(), opts.norm);
            rep.norms_b_bstar[i] = b.hi;
          }
          rep.flags[i] = !converged ? "not_converged" : (R->refined() ? "refined" : "ok");
        } catch (const NearSingularError& e) {
          rep.conditions[i] = e.condition();
          rep.flags[i] = "near_singular";
        }
      },
      opts.threads);
  finalize(rep);
  return rep;
}

double schrodinger_weighted_norm(const Grid& grid, double z, double sigma, Branch branch, const NormOptions& opts) {
  auto R = assemble_convolution(schrodinger_matrix_kernel(grid.n, z, branch), grid, branch, "schrodinger_resolvent");
  return weighted_operator_norm(R, grid, 1, sigma, opts).value;
}

RVector interior_mask(const Grid& grid, int spinor_dim) {
  RVector mask = RVector::Zero(grid.num_points() * spinor_dim);
  const int P = grid.points_per_axis;
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) {
    const auto idx = grid.multi_index(p);
    bool inside = true;
    for (int k = 0; k < grid.n; ++k) inside = inside && idx[k] > 0 && idx[k] < P - 1;
    if (inside) mask.segment(p * spinor_dim, spinor_dim).setOnes();
  }
  return mask;
}

CVector discrete_dirac(const DiracMatrices& mats, double m, const Grid& grid, const CVector& u) {
  const int s = mats.spinor_dim;
  const int P = grid.points_per_axis;
  const double h = grid.h();
  const cplx I(0.0, 1.0);
  CVector out = CVector::Zero(u.size());
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) {
    const auto idx = grid.multi_index(p);
    bool inside = true;
    for (int k = 0; k < grid.n; ++k) inside = inside && idx[k] > 0 && idx[k] < P - 1;
    if (!inside) continue;
    CVector acc = m * (mats.beta * u.segment(p * s, s));
    Eigen::Index stride = 1;
    for (int k = 0; k < grid.n; ++k) {
      const CVector d = (u.segment((p + stride) * s, s) - u.segment((p - stride) * s, s)) / (2.0 * h);
      acc += -I * (mats.alphas[k] * d);
      stride *= P;
    }
    out.segment(p * s, s) = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::shared_ptr<ConvolutionOperator> threshold_operator(const DiracMatrices& mats, double m, const Grid& grid) {
  return assemble_convolution(threshold_matrix_kernel(mats, m), grid, Branch::Outgoing, "threshold_G");
}

OperatorPtr threshold_system(const std::shared_ptr<const ConvolutionOperator>& G, const MultiplicationOperator& V,
                             double sigma, double s) {
  const Grid& grid = G->grid();
  const int sd = G->spinor_dim();
  const RVector w = weight_vector(grid, sd, sigma);
  std::vector<CMatrix> blocks(grid.num_points());
  for (Eigen::Index p = 0; p < grid.num_points(); ++p) blocks[p] = (s / w[p * sd]) * V.block(p);
  auto vw = std::make_shared<MultiplicationOperator>(grid, sd, std::move(blocks));
  auto wg = weighted(G, w, RVector::Ones(w.size()));
  auto K = product({wg, vw});
  return std::make_shared<LinearCombination>(G->size(), cplx(1.0),
                                             std::vector<std::pair<cplx, OperatorPtr>>{{1.0, K}});
}

namespace {

void validate_threshold_sigma(double m, double sigma) {
  if (m > 0.0 && !(sigma > 1.0)) throw ValidationError("sigma must exceed 1 when mass > 0 per threshold-suite hypothesis");
  if (!(sigma > 0.5)) throw ValidationError("sigma must exceed 1/2 per threshold-suite hypothesis");
}

double smallest_value(const std::shared_ptr<const ConvolutionOperator>& G, const MultiplicationOperator& V,
                      double sigma, double s, CVector* vector = nullptr) {
  if (s == 0.0 || V.is_zero()) {
    if (vector) *vector = start_vector(G->size(), 0x5eedULL);
    return 1.0;
  }
  const SingularResult r = smallest_singular_value(*threshold_system(G, V, sigma, s));
  if (vector) *vector = r.vector;
  return r.value;
}

}  // namespace

ThresholdReport regularity_check(const LapProblem& problem, double sigma, const std::vector<double>& lambda_offsets,
                                 const NormOptions& opts) {
  validate_threshold_sigma(problem.m, sigma);
  std::shared_ptr<const ConvolutionOperator> G = threshold_operator(problem.mats, problem.m, problem.grid);
  ThresholdReport rep;
  rep.m = problem.m;
  rep.smallest_singular_value = smallest_value(G, *problem.V, sigma, 1.0, &rep.singular_vector);
  rep.regular = rep.smallest_singular_value > kRegularTolerance;
  for (double off : lambda_offsets) {
    if (!(off > 0.0)) throw ValidationError("threshold approach offsets must be positive");
    const double lambda = problem.m + off;
    auto R0 = free_resolvent(problem, lambda, Branch::Outgoing);
    const NormResult nr =
        weighted_operator_norm(difference(R0, G), problem.grid, problem.spinor_dim(), sigma, opts);
    rep.blambda_decay.emplace_back(lambda, nr.value);
  }
  return rep;
}

CouplingSweep coupling_sweep(const LapProblem& problem_unit, const std::vector<double>& s_grid, double sigma,
                             int threads) {
  if (s_grid.empty()) throw ValidationError("s_grid must not be empty");
  validate_threshold_sigma(problem_unit.m, sigma);
  std::shared_ptr<const ConvolutionOperator> G = threshold_operator(problem_unit.mats, problem_unit.m, problem_unit.grid);
  const MultiplicationOperator& V = *problem_unit.V;
  CouplingSweep out;
  out.table.resize(s_grid.size());
  parallel_for(
      s_grid.size(), [&](std::size_t i) { out.table[i] = {s_grid[i], smallest_value(G, V, sigma, s_grid[i])}; },
      threads);

  auto eval = [&](double s) {
    const double v = smallest_value(G, V, sigma, s);
    out.refinements.emplace_back(s, v);
    return v;
  };
  auto bisect = [&](double lo, double flo, double hi) {
    // flo = value(lo) - level; value(hi) - level has the opposite sign.
    while (std::abs(hi - lo) > 0.5e-3 * std::min(std::abs(lo), std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      const double fm = eval(mid) - kCrossingLevel;
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out.bracketed = true;
    out.s_lo = std::min(lo, hi);
    out.s_hi = std::max(lo, hi);
    out.s_star = 0.5 * (lo + hi);
  };

  const auto& t = out.table;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = t[i].second - kCrossingLevel, b = t[i + 1].second - kCrossingLevel;
    if ((a > 0.0) != (b > 0.0)) {
      bisect(t[i].first, a, t[i + 1].first);
      return out;
    }
  }
  // No sign change in the table: refine the deepest interior minimum by golden section.
  std::size_t imin = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].second < t[imin].second) imin = i;
  if (imin == 0 || imin + 1 >= t.size()) return out;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = t[imin - 1].first, b = t[imin + 1].first;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int it = 0; it < 80; ++it) {
    const double best = std::min(fc, fd);
    const double sbest = fc < fd ? c : d;
    if (best <= kCrossingLevel) {
      const double left = t[imin - 1].first;
      bisect(left, t[imin - 1].second - kCrossingLevel, sbest);
      return out;
    }
    if (std::abs(b - a) <= 1e-6 * std::abs(sbest)) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(d);
    }
  }
  return out;
}

}  // namespace diraclap
