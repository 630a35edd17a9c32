#pragma once

#include <limits>
#include <string>
#include <vector>

#include "diraclap/clifford.hpp"
#include "diraclap/grid.hpp"
#include "diraclap/lap.hpp"
#include "diraclap/operators.hpp"

namespace diraclap {

struct SpectrumClassification {
  double tol_gap = 1e-6;             // |E| < m - tol_gap counts as a gap eigenvalue
  double participation_factor = 0.1; // localized if PR < factor * mean PR
  double ambiguity_band = 0.2;       // warn when PR is within 20% of the cutoff
};

/// H = D_m + V on a periodic grid. D_m acts exactly in the discrete Fourier basis
/// (symbol alpha . xi_k + m beta, xi_k = pi k / L for k in [-P/2, P/2)).
struct DiscreteHamiltonian {
  Grid grid;
  DiracMatrices mats;
  double m = 0.0;
  CMatrix matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  CMatrix eigenvectors;         // orthonormal columns (Euclidean inner product on samples)
  std::vector<double> participation;  // normalized participation ratio in (0, 1]
  std::vector<bool> point_flags;
  std::vector<std::string> warnings;
  SpectrumClassification classification;
  double participation_cutoff = 0.0;

  int spinor_dim() const { return mats.spinor_dim; }
  Eigen::Index dimension() const { return matrix.rows(); }
  int flagged_count() const;
  double max_energy() const;
};

/// Frequencies xi_k for one axis, in grid index order of the FFT.
std::vector<double> axis_frequencies(const Grid& grid);

DiscreteHamiltonian discretize_hamiltonian(const DiracMatrices& mats, double m, const MultiplicationOperator& V,
                                           const Grid& grid, const SpectrumClassification& cls = {});

/// Re-runs the point-spectrum surrogate classification with new thresholds.
void classify_spectrum(DiscreteHamiltonian& H, const SpectrumClassification& cls);

/// Dense P_c = I - sum over flagged pairs of v v*.
CMatrix continuous_projection(const DiscreteHamiltonian& H);

/// psi(t) = sum_k e^{-i E_k t} <v_k, f> v_k (flagged pairs dropped when project is set).
std::vector<SpinorField> evolve(const DiscreteHamiltonian& H, const SpinorField& f, const std::vector<double>& times,
                                bool project = false);

struct StrichartzQuery {
  double p = 2.0;
  double q = 2.0;
  double theta = 0.0;
  bool massive = true;
  double T = 1.0;
  int time_samples = 0;  // 0 = derived from the spectrum
};

/// Every violated admissibility rule, each stated with its inequality.
std::vector<std::string> strichartz_violations(int n, const StrichartzQuery& query);

/// Trapezoid time nodes on [0, T] with at least 32 samples per unit time at the largest frequency.
std::vector<double> time_grid(const DiscreteHamiltonian& H, double T, int min_samples = 0);

/// |<grad>^{-theta} e^{-itH} P_c f|_{L^p_t([0,T]) L^q_x} / |f|_2 (|grad|^{-theta} for massless queries).
double strichartz_norm(const DiscreteHamiltonian& H, const SpinorField& f, const StrichartzQuery& query,
                       bool project = true);

/// (int_0^T |<x>^{-sigma} P_c psi(t)|_2^2 dt)^{1/2} / |f|_2
double kato_smoothing_norm(const DiscreteHamiltonian& H, const SpinorField& f, double sigma, double T,
                           bool project = true);

/// Fraction |mean mode| / |f|_2, used to guard the homogeneous multiplier.
double mean_mode_fraction(const SpinorField& f);
constexpr double kMeanModeTolerance = 1e-3;

/// Applies the radial Fourier multiplier mult(|xi|) to every spinor component on the periodic grid.
CVector fourier_multiplier(const Grid& grid, int spinor_dim, const CVector& values,
                           const std::function<double(double)>& mult);

struct SmoothingTable {
  std::vector<double> lambdas;
  std::vector<double> norms;  // |W (R_V^+ - R_V^-) W|
  std::vector<double> hermitian_defect;
  double sup = 0.0;
};

SmoothingTable smoothing_resolvent_check(const LapProblem& problem, const std::vector<double>& lambdas, double sigma,
                                         const NormOptions& opts = {}, int threads = 0);

}  // namespace diraclap
