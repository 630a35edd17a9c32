#include <doctest.h>

#include <random>

#include "diraclap/lap.hpp"

using namespace diraclap;

namespace {

CVector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  CVector v(n);
  for (auto& x : v) x = cplx(N(rng), N(rng));
  return v;
}

double rel(const CVector& a, const CVector& b) { return (a - b).norm() / b.norm(); }

PotentialSpec compact(double coupling, double width, MatrixProfile profile = MatrixProfile::Scalar) {
  PotentialSpec s;
  s.kind = PotentialKind::CompactSmooth;
  s.coupling = coupling;
  s.width = width;
  s.profile = profile;
  return s;
}

}  // namespace

TEST_CASE("perturbed resolvent matches a dense full-grid inverse") {
  for (int n : {2, 3}) {
    const Grid g = Grid::make(n, 2.5, n == 2 ? 12 : 6);
    const LapProblem problem = LapProblem::make(build_dirac_matrices(n), 0.7, g, compact(0.8, 1.6, MatrixProfile::Beta));
    const double lambda = 1.9;
    const auto RV = perturbed_resolvent(problem, lambda);
    const CMatrix R0 = free_resolvent(problem, lambda, Branch::Outgoing)->to_kernel_operator().matrix();
    const CMatrix V = problem.V->dense();
    const CMatrix I = CMatrix::Identity(R0.rows(), R0.cols());
    const CMatrix oracle = R0 * (I + V * R0).inverse();
    const CVector x = random_vector(R0.rows(), 5);
    CAPTURE(n);
    CHECK(rel(*RV * x, oracle * x) <= 1e-10);
    CHECK(rel(RV->adjoint_times(x), oracle.adjoint() * x) <= 1e-10);
    CHECK(RV->condition() >= 1.0);
  }
}

TEST_CASE("second resolvent identity R_V - R0 = -R_V V R0") {
  const Grid g = Grid::make(2, 3.0, 16);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(2), 0.0, g, compact(0.6, 2.0));
  const auto R0 = free_resolvent(problem, 2.2, Branch::Incoming);
  const auto RV = perturbed_resolvent(problem, 2.2, Branch::Incoming);
  const CVector x = random_vector(R0->size(), 7);
  const CVector lhs = *RV * x - *R0 * x;
  const CVector rhs = -(*RV * (*problem.V * (*R0 * x)));
  CHECK(rel(lhs, rhs) <= 1e-10);
}

TEST_CASE("solve and solve_adjoint invert I + V R0") {
  const Grid g = Grid::make(2, 3.0, 14);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(2), 1.0, g, compact(1.2, 2.2));
  const auto R0 = free_resolvent(problem, 1.6, Branch::Outgoing);
  const auto RV = perturbed_resolvent(problem, 1.6);
  const CVector f = random_vector(R0->size(), 9);
  CVector u, v;
  RV->solve(f, u);
  CHECK(rel(u + *problem.V * (*R0 * u), f) <= 1e-11);
  RV->solve_adjoint(f, v);
  CHECK(rel(v + R0->adjoint_times(problem.V->adjoint_times(v)), f) <= 1e-11);
}

TEST_CASE("zero potential gives back the free resolvent") {
  const Grid g = Grid::make(2, 3.0, 12);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(2), 0.5, g, PotentialSpec{});
  const auto RV = perturbed_resolvent(problem, 1.3);
  const auto R0 = free_resolvent(problem, 1.3, Branch::Outgoing);
  const CVector x = random_vector(R0->size(), 11);
  CHECK(rel(*RV * x, *R0 * x) <= 1e-14);
  CHECK(RV->condition() == 1.0);
}

TEST_CASE("complex spectral parameter approaches the outgoing boundary value") {
  const Grid g = Grid::make(2, 3.0, 16);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(2), 0.0, g, PotentialSpec{});
  const auto plus = free_resolvent(problem, 1.5, Branch::Outgoing);
  const CVector x = random_vector(plus->size(), 13);
  const CVector ref = *plus * x;
  double prev = 1e300;
  for (double gamma : {0.2, 0.05, 0.0125}) {
    const double d = rel(*free_resolvent(problem, cplx(1.5, gamma)) * x, ref);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev <= 0.05);
}

TEST_CASE("lap sweep reports one row per lambda") {
  const Grid g = Grid::make(2, 3.0, 12);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(2), 0.5, g, compact(0.5, 1.5));
  SweepOptions opts;
  opts.with_b_bstar = true;
  const LapReport r = lap_sweep(problem, {1.0, 2.0, 3.0}, 0.7, Branch::Outgoing, opts);
  REQUIRE(r.lambdas.size() == 3);
  CHECK(r.norms_weighted.size() == 3);
  CHECK(r.norms_b_bstar.size() == 3);
  CHECK(r.flags.size() == 3);
  double sup = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.norms_weighted[i] > 0.0);
    CHECK(r.flags[i] == "ok");
    sup = std::max(sup, r.norms_weighted[i]);
  }
  CHECK(r.sup_norm == doctest::Approx(sup));
}

TEST_CASE("discrete Dirac operator on a plane wave") {
  const Grid g = Grid::make(2, 3.0, 24);
  const DiracMatrices M = build_dirac_matrices(2);
  const double k0 = 1.3, k1 = -0.7, m = 0.4, h = g.h();
  CVector u(g.num_points() * 2);
  for (Eigen::Index p = 0; p < g.num_points(); ++p) {
    const auto x = g.point(p);
    const cplx e = std::exp(cplx(0.0, k0 * x[0] + k1 * x[1]));
    u[2 * p] = e;
    u[2 * p + 1] = 0.5 * e;
  }
  const CVector Du = discrete_dirac(M, m, g, u);
  const CMatrix symbol = (std::sin(k0 * h) / h) * M.alphas[0] + (std::sin(k1 * h) / h) * M.alphas[1] + m * M.beta;
  const RVector mask = interior_mask(g, 2);
  double worst = 0.0;
  for (Eigen::Index p = 0; p < g.num_points(); ++p) {
    if (mask[2 * p] == 0.0) {
      CHECK(Du.segment(2 * p, 2).norm() == 0.0);
      continue;
    }
    worst = std::max(worst, (Du.segment(2 * p, 2) - symbol * u.segment(2 * p, 2)).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("free threshold system is regular") {
  const Grid g = Grid::make(3, 3.0, 6);
  const LapProblem problem = LapProblem::make(build_dirac_matrices(3), 1.0, g, PotentialSpec{});
  const ThresholdReport r = regularity_check(problem, 1.1);
  CHECK(r.smallest_singular_value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.regular);
}

TEST_CASE("coupling sweep keeps evaluation order and brackets its crossing") {
  const Grid g = Grid::make(3, 3.0, 6);
  PotentialSpec unit;
  unit.kind = PotentialKind::GaussianBump;
  unit.coupling = -1.0;
  const LapProblem problem = LapProblem::make(build_dirac_matrices(3), 1.0, g, unit);
  const std::vector<double> s_grid = {2.0, 0.5, 1.0, 1.5, 2.5};
  const CouplingSweep sw = coupling_sweep(problem, s_grid, 1.1);
  REQUIRE(sw.table.size() == s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) CHECK(sw.table[i].first == s_grid[i]);
  if (sw.bracketed) {
    CHECK(sw.s_lo <= sw.s_star);
    CHECK(sw.s_star <= sw.s_hi);
  }
}

TEST_CASE("free Schrodinger weighted norm decays with momentum in 3d") {
  const Grid g = Grid::make(3, 3.0, 8);
  const double a = schrodinger_weighted_norm(g, 1.0, 0.8, Branch::Outgoing);
  const double b = schrodinger_weighted_norm(g, 2.0, 0.8, Branch::Outgoing);
  CHECK(b < a);
}
