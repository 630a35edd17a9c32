#include "diraclap/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "diraclap/parallel.hpp"
#include "fft_plans.hpp"

namespace diraclap {

namespace {

const cplx I(0.0, 1.0);

int frequency_index(int j, int P) { return j < P / 2 ? j : j - P; }

void check_periodic(const Grid& grid) {
  if (!grid.periodic) throw ValidationError("the propagator needs a periodic grid");
  if (grid.points_per_axis % 2 != 0) throw ValidationError("periodic grids need an even number of points per axis");
}

void check_window(const Grid& grid, double T) {
  if (!(T > 0.0)) throw ValidationError("time window T must be positive");
  if (T > grid.L / 2.0 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time window T = " << T << " exceeds L/2 = " << grid.L / 2.0 << " (wrap-around on the periodic box)";
    throw ValidationError(msg.str());
  }
}

double participation_ratio(const CMatrix& vecs, Eigen::Index col, Eigen::Index npts, int s) {
  double sum_sq = 0.0, total = 0.0;
  for (Eigen::Index p = 0; p < npts; ++p) {
    const double rho = vecs.col(col).segment(p * s, s).squaredNorm();
    total += rho;
    sum_sq += rho * rho;
  }
  return total * total / (static_cast<double>(npts) * sum_sq);
}

}  // namespace

int DiscreteHamiltonian::flagged_count() const {
  return static_cast<int>(std::count(point_flags.begin(), point_flags.end(), true));
}

double DiscreteHamiltonian::max_energy() const { return eigenvalues.cwiseAbs().maxCoeff(); }

std::vector<double> axis_frequencies(const Grid& grid) {
  const int P = grid.points_per_axis;
  std::vector<double> xi(P);
  for (int j = 0; j < P; ++j) xi[j] = kPi * frequency_index(j, P) / grid.L;
  return xi;
}

namespace {

// -i d/dx on one periodic axis: (1/P) sum_k xi_k e^{i xi_k (x_a - x_b)}.
CMatrix axis_derivative(const Grid& grid) {
  const int P = grid.points_per_axis;
  const auto xi = axis_frequencies(grid);
  CMatrix A = CMatrix::Zero(P, P);
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b) {
      cplx acc = 0.0;
      const double dx = (a - b) * grid.h();
      for (int k = 0; k < P; ++k) acc += xi[k] * std::exp(I * (xi[k] * dx));
      A(a, b) = acc / static_cast<double>(P);
    }
  return A;
}

void free_eigenbasis(DiscreteHamiltonian& H) {
  const Grid& g = H.grid;
  const int s = H.spinor_dim();
  const Eigen::Index N = g.num_points();
  const auto xi = axis_frequencies(g);
  const Eigen::Index dim = N * s;
  std::vector<double> energies;
  std::vector<std::pair<Eigen::Index, CVector>> modes;  // (frequency point index, spinor)
  energies.reserve(dim);
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto kk = g.multi_index(k);
    std::vector<double> xk(g.n);
    for (int j = 0; j < g.n; ++j) xk[j] = xi[kk[j]];
    const CMatrix S = dirac_symbol(H.mats, xk, H.m);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(S);
    for (int b = 0; b < s; ++b) {
      energies.push_back(es.eigenvalues()(b));
      modes.emplace_back(k, es.eigenvectors().col(b));
    }
  }
  std::vector<Eigen::Index> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return energies[a] < energies[b]; });
  H.eigenvalues.resize(dim);
  H.eigenvectors.resize(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto& [k, u] = modes[order[c]];
    H.eigenvalues(c) = energies[order[c]];
    const auto kk = g.multi_index(k);
    for (Eigen::Index p = 0; p < N; ++p) {
      const auto x = g.point(p);
      double phase = 0.0;
      for (int j = 0; j < g.n; ++j) phase += xi[kk[j]] * x[j];
      H.eigenvectors.col(c).segment(p * s, s) = (norm * std::exp(I * phase)) * u;
    }
  }
}

}  // namespace

DiscreteHamiltonian discretize_hamiltonian(const DiracMatrices& mats, double m, const MultiplicationOperator& V,
                                           const Grid& grid, const SpectrumClassification& cls) {
  check_periodic(grid);
  if (mats.dimension != grid.n) throw ValidationError("Dirac family and grid dimensions differ");
  if (!(m >= 0.0)) throw ValidationError("mass must be non-negative");
  if (!(V.grid() == grid)) throw ValidationError("potential was sampled on a different grid");
  const int s = mats.spinor_dim;
  const Eigen::Index N = grid.num_points();
  const Eigen::Index dim = N * s;
  check_dense_dimension(dim, "hamiltonian");

  DiscreteHamiltonian H;
  H.grid = grid;
  H.mats = mats;
  H.m = m;
  H.matrix = CMatrix::Zero(dim, dim);
  const CMatrix A1 = axis_derivative(grid);
  const int P = grid.points_per_axis;
  for (Eigen::Index p = 0; p < N; ++p) {
    const auto ip = grid.multi_index(p);
    H.matrix.block(p * s, p * s, s, s) += m * mats.beta + V.block(p);
    Eigen::Index stride = 1;
    for (int j = 0; j < grid.n; ++j) {
      // Points q sharing every coordinate with p except axis j.
      const Eigen::Index base = p - ip[j] * stride;
      for (int b = 0; b < P; ++b) {
        const Eigen::Index q = base + b * stride;
        H.matrix.block(p * s, q * s, s, s) += A1(ip[j], b) * mats.alphas[j];
      }
      stride *= P;
    }
  }
  const double defect = (H.matrix - H.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw NumericalError("discrete Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
  H.matrix = 0.5 * (H.matrix + H.matrix.adjoint()).eval();

  if (V.is_zero()) {
    free_eigenbasis(H);
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    H.eigenvalues = es.eigenvalues();
    H.eigenvectors = es.eigenvectors();
  }
  classify_spectrum(H, cls);
  return H;
}

void classify_spectrum(DiscreteHamiltonian& H, const SpectrumClassification& cls) {
  H.classification = cls;
  const Eigen::Index dim = H.eigenvalues.size();
  const Eigen::Index N = H.grid.num_points();
  const int s = H.spinor_dim();
  H.participation.assign(dim, 1.0);
  for (Eigen::Index c = 0; c < dim; ++c) H.participation[c] = participation_ratio(H.eigenvectors, c, N, s);
  const double mean = std::accumulate(H.participation.begin(), H.participation.end(), 0.0) / static_cast<double>(dim);
  H.participation_cutoff = cls.participation_factor * mean;
  H.point_flags.assign(dim, false);
  H.warnings.clear();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double E = H.eigenvalues(c);
    const double pr = H.participation[c];
    const bool gap = std::abs(E) < H.m - cls.tol_gap;
    const bool localized = pr < H.participation_cutoff;
    H.point_flags[c] = gap || localized;
    if (!gap && std::abs(pr - H.participation_cutoff) < cls.ambiguity_band * H.participation_cutoff) {
      std::ostringstream msg;
      msg << "ambiguous spectral classification: E = " << E << ", participation " << pr << " vs cutoff "
          << H.participation_cutoff;
      H.warnings.push_back(msg.str());
    }
  }
}

CMatrix continuous_projection(const DiscreteHamiltonian& H) {
  const Eigen::Index dim = H.dimension();
  CMatrix P = CMatrix::Identity(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    if (H.point_flags[c]) P -= H.eigenvectors.col(c) * H.eigenvectors.col(c).adjoint();
  return P;
}

namespace {

CVector coefficients(const DiscreteHamiltonian& H, const SpinorField& f, bool project) {
  if (!(f.grid == H.grid) || f.spinor_dim != H.spinor_dim()) throw ValidationError("field does not live on H's grid");
  CVector c = H.eigenvectors.adjoint() * f.values;
  if (project)
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (H.point_flags[k]) c[k] = 0.0;
  return c;
}

CVector evolve_coefficients(const DiscreteHamiltonian& H, const CVector& c, double t) {
  CVector ct(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) ct[k] = std::exp(-I * (H.eigenvalues(k) * t)) * c[k];
  return H.eigenvectors * ct;
}

}  // namespace

std::vector<SpinorField> evolve(const DiscreteHamiltonian& H, const SpinorField& f, const std::vector<double>& times,
                                bool project) {
  const CVector c = coefficients(H, f, project);
  std::vector<SpinorField> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(SpinorField{H.grid, H.spinor_dim(), evolve_coefficients(H, c, t)});
  return out;
}

std::vector<std::string> strichartz_violations(int n, const StrichartzQuery& q) {
  std::vector<std::string> v;
  auto fmt = [](double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
  };
  const double ip = std::isinf(q.p) ? 0.0 : 1.0 / q.p;
  const double iq = std::isinf(q.q) ? 0.0 : 1.0 / q.q;
  if (!(q.p >= 2.0)) v.push_back("p = " + fmt(q.p) + " must satisfy p >= 2");
  if (!(q.q >= 2.0)) v.push_back("q = " + fmt(q.q) + " must satisfy q >= 2");
  if (!(q.T > 0.0)) v.push_back("T must be positive");
  if (q.massive) {
    const double lhs = 2.0 * ip + n * iq;
    if (std::abs(lhs - n / 2.0) > 1e-12)
      v.push_back("massive admissibility 2/p + n/q = n/2 fails: 2/p + n/q = " + fmt(lhs) + ", n/2 = " + fmt(n / 2.0));
    if (n > 2 && !(q.q < 2.0 * n / (n - 2.0)))
      v.push_back("massive admissibility q < 2n/(n-2) = " + fmt(2.0 * n / (n - 2.0)) + " fails: q = " + fmt(q.q));
    if (n == 2 && std::isinf(q.q)) v.push_back("massive admissibility q < infinity fails in n = 2");
    const double need = 0.5 + ip - iq;
    if (!(q.theta >= need - 1e-12))
      v.push_back("massive smoothing theta >= 1/2 + 1/p - 1/q = " + fmt(need) + " fails: theta = " + fmt(q.theta));
  } else {
    if (!(q.p > 2.0)) v.push_back("massless admissibility p > 2 fails: p = " + fmt(q.p));
    if (std::isinf(q.q)) v.push_back("massless admissibility q < infinity fails");
    const double lhs = 2.0 * ip + (n - 1) * iq;
    if (!(lhs <= (n - 1) / 2.0 + 1e-12))
      v.push_back("massless admissibility 2/p + (n-1)/q <= (n-1)/2 fails: 2/p + (n-1)/q = " + fmt(lhs) +
                  " > " + fmt((n - 1) / 2.0));
    const double theta = n / 2.0 - ip - n * iq;
    if (std::abs(q.theta - theta) > 1e-12)
      v.push_back("massless smoothing theta = n/2 - 1/p - n/q = " + fmt(theta) + " fails: theta = " + fmt(q.theta));
  }
  return v;
}

std::vector<double> time_grid(const DiscreteHamiltonian& H, double T, int min_samples) {
  const double emax = std::max(H.max_energy(), 1e-12);
  const double dt = 2.0 * kPi / (32.0 * emax);
  const int intervals = std::max({min_samples, 2, static_cast<int>(std::ceil(T / dt - 1e-9))});
  std::vector<double> t(intervals + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = T * i / intervals;
  return t;
}

double mean_mode_fraction(const SpinorField& f) {
  const int s = f.spinor_dim;
  const Eigen::Index N = f.grid.num_points();
  CVector mean = CVector::Zero(s);
  for (Eigen::Index p = 0; p < N; ++p) mean += f.values.segment(p * s, s);
  mean /= static_cast<double>(N);
  const double norm = f.l2_norm();
  if (norm == 0.0) return 0.0;
  return std::sqrt(static_cast<double>(N) * f.grid.cell_volume()) * mean.norm() / norm;
}

CVector fourier_multiplier(const Grid& grid, int spinor_dim, const CVector& values,
                           const std::function<double(double)>& mult) {
  check_periodic(grid);
  const int P = grid.points_per_axis;
  const Eigen::Index N = grid.num_points();
  const auto xi = axis_frequencies(grid);
  std::vector<double> symbol(N);
  for (Eigen::Index p = 0; p < N; ++p) {
    const auto k = grid.multi_index(p);
    double r2 = 0.0;
    for (int j = 0; j < grid.n; ++j) r2 += xi[k[j]] * xi[k[j]];
    symbol[p] = mult(std::sqrt(r2));
  }
  // Grid index order coincides with FFTW's row-major order (axis 0 fastest maps to the last FFTW axis).
  const detail::PlanPair plans = detail::plans_for(grid.n, P);
  detail::FftBuffer buf(N);
  CVector out(values.size());
  for (int a = 0; a < spinor_dim; ++a) {
    for (Eigen::Index p = 0; p < N; ++p) buf.data[p] = values[p * spinor_dim + a];
    fftw_execute_dft(plans.forward, buf.raw(), buf.raw());
    for (Eigen::Index p = 0; p < N; ++p) buf.data[p] *= symbol[p] / static_cast<double>(N);
    fftw_execute_dft(plans.backward, buf.raw(), buf.raw());
    for (Eigen::Index p = 0; p < N; ++p) out[p * spinor_dim + a] = buf.data[p];
  }
  return out;
}

double strichartz_norm(const DiscreteHamiltonian& H, const SpinorField& f, const StrichartzQuery& query,
                       bool project) {
  const auto violations = strichartz_violations(H.grid.n, query);
  if (!violations.empty()) {
    std::string all;
    for (const auto& v : violations) all += (all.empty() ? "" : "; ") + v;
    throw ValidationError("inadmissible Strichartz query: " + all);
  }
  check_window(H.grid, query.T);
  if (query.massive && H.m == 0.0) throw ValidationError("massive Strichartz query on a massless Hamiltonian");
  if (!query.massive && mean_mode_fraction(f) > kMeanModeTolerance)
    throw ValidationError("massless |grad|^{-theta} needs initial data without a mean mode (fraction " +
                          std::to_string(mean_mode_fraction(f)) + " > 1e-3)");
  const double fnorm = f.l2_norm();
  if (fnorm == 0.0) return 0.0;
  const CVector c = coefficients(H, f, project);
  const auto times = time_grid(H, query.T, query.time_samples);
  const double theta = query.theta;
  std::function<double(double)> mult;
  if (query.massive)
    mult = [theta](double k) { return std::pow(1.0 + k * k, -theta / 2.0); };
  else
    mult = [theta](double k) { return k == 0.0 ? 0.0 : std::pow(k, -theta); };
  const int s = H.spinor_dim();
  const Eigen::Index N = H.grid.num_points();
  const double vol = H.grid.cell_volume();
  std::vector<double> g(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CVector u = fourier_multiplier(H.grid, s, evolve_coefficients(H, c, times[i]), mult);
    if (std::isinf(query.q)) {
      double mx = 0.0;
      for (Eigen::Index p = 0; p < N; ++p) mx = std::max(mx, u.segment(p * s, s).norm());
      g[i] = mx;
    } else {
      double acc = 0.0;
      for (Eigen::Index p = 0; p < N; ++p) acc += std::pow(u.segment(p * s, s).norm(), query.q);
      g[i] = std::pow(acc * vol, 1.0 / query.q);
    }
  }
  double value;
  if (std::isinf(query.p)) {
    value = *std::max_element(g.begin(), g.end());
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
      acc += 0.5 * (std::pow(g[i], query.p) + std::pow(g[i + 1], query.p)) * (times[i + 1] - times[i]);
    value = std::pow(acc, 1.0 / query.p);
  }
  return value / fnorm;
}

double kato_smoothing_norm(const DiscreteHamiltonian& H, const SpinorField& f, double sigma, double T, bool project) {
  if (!(sigma > 0.5)) throw ValidationError("Kato smoothing needs sigma > 1/2");
  check_window(H.grid, T);
  const double fnorm = f.l2_norm();
  if (fnorm == 0.0) return 0.0;
  const CVector c = coefficients(H, f, project);
  const RVector w = weight_vector(H.grid, H.spinor_dim(), sigma);
  const auto times = time_grid(H, T);
  const double vol = H.grid.cell_volume();
  std::vector<double> g(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    g[i] = vol * evolve_coefficients(H, c, times[i]).cwiseProduct(w.cast<cplx>()).squaredNorm();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) acc += 0.5 * (g[i] + g[i + 1]) * (times[i + 1] - times[i]);
  return std::sqrt(acc) / fnorm;
}

SmoothingTable smoothing_resolvent_check(const LapProblem& problem, const std::vector<double>& lambdas, double sigma,
                                         const NormOptions& opts, int threads) {
  if (lambdas.empty()) throw ValidationError("lambda grid must not be empty");
  for (double l : lambdas)
    if (!(l > problem.m)) throw ValidationError("smoothing check needs lambda inside (m, infinity)");
  SmoothingTable t;
  t.lambdas = lambdas;
  t.norms.assign(lambdas.size(), 0.0);
  t.hermitian_defect.assign(lambdas.size(), 0.0);
  parallel_for(
      lambdas.size(),
      [&](std::size_t i) {
        auto plus = perturbed_resolvent(problem, lambdas[i], Branch::Outgoing);
        auto minus = perturbed_resolvent(problem, lambdas[i], Branch::Incoming);
        const OperatorPtr diff = difference(plus, minus);
        const NormResult nr = weighted_operator_norm(diff, problem.grid, problem.spinor_dim(), sigma, opts);
        t.norms[i] = nr.value;
        // i (R+ - R-) Hermitian  <=>  <x, D y> = -conj(<y, D x>)
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 3; ++k) {
          const CVector x = start_vector(diff->size(), 100 + 2 * k), y = start_vector(diff->size(), 101 + 2 * k);
          const cplx a = x.dot(*diff * y), b = y.dot(*diff * x);
          worst = std::max(worst, std::abs(a + std::conj(b)) / std::max(nr.value, 1e-300));
        }
        t.hermitian_defect[i] = worst;
      },
      threads);
  for (double v : t.norms) t.sup = std::max(t.sup, v);
  return t;
}

}  // namespace diraclap
