#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "diraclap/clifford.hpp"
#include "diraclap/grid.hpp"
#include "diraclap/norms.hpp"
#include "diraclap/operators.hpp"
#include "diraclap/potential.hpp"

namespace diraclap {

/// Everything a resolvent computation needs besides the spectral parameter.
struct LapProblem {
  DiracMatrices mats;
  double m = 0.0;
  Grid grid;
  std::shared_ptr<const MultiplicationOperator> V;

  static LapProblem make(const DiracMatrices& mats, double m, const Grid& grid, const PotentialSpec& spec);
  int spinor_dim() const { return mats.spinor_dim; }
};

/// Free Dirac resolvent (D_m + lambda) R0(lambda^2 - m^2) as an FFT convolution.
std::shared_ptr<ConvolutionOperator> free_resolvent(const LapProblem& problem, double lambda, Branch branch);
/// Im lambda > 0: the resolvent off the real axis.
std::shared_ptr<ConvolutionOperator> free_resolvent(const LapProblem& problem, cplx lambda);

/// R_V = R0 (I + V R0)^{-1}. Rows of V R0 vanish off supp V, so the inversion reduces to a
/// dense LU on supp V: g_out = f_out, (I + (V R0)_SS) g_S = f_S - (V R0)_{S,out} f_out.
class PerturbedResolvent final : public LinearOperator {
 public:
  PerturbedResolvent(std::shared_ptr<const ConvolutionOperator> R0, std::shared_ptr<const MultiplicationOperator> V,
                     cplx lambda);

  Eigen::Index size() const override { return R0_->size(); }
  void apply(const CVector& x, CVector& y) const override;
  void apply_adjoint(const CVector& x, CVector& y) const override;

  /// g = (I + V R0)^{-1} f
  void solve(const CVector& f, CVector& g) const;
  /// g = (I + V R0)^{-*} f
  void solve_adjoint(const CVector& f, CVector& g) const;

  /// Condition estimate 1 / rcond of the reduced system (1 when V = 0).
  double condition() const { return condition_; }
  bool refined() const { return refine_; }
  cplx lambda() const { return lambda_; }
  const ConvolutionOperator& free() const { return *R0_; }

 private:
  CVector reduced_solve(const CVector& rhs, bool adjoint) const;

  std::shared_ptr<const ConvolutionOperator> R0_;
  std::shared_ptr<const MultiplicationOperator> V_;
  cplx lambda_;
  std::vector<Eigen::Index> support_;
  CMatrix reduced_;
  Eigen::PartialPivLU<CMatrix> lu_;
  double condition_ = 1.0;
  bool refine_ = false;
};

constexpr double kNearSingularCondition = 1e12;
constexpr double kRefinementCondition = 1e8;

/// Throws NearSingularError when the reduced system has condition above 1e12.
std::shared_ptr<PerturbedResolvent> perturbed_resolvent(const LapProblem& problem, cplx lambda,
                                                        Branch branch = Branch::Outgoing);

struct LapReport {
  std::vector<cplx> lambdas;
  double sigma = 0.0;
  Branch branch = Branch::Outgoing;
  std::vector<double> norms_weighted;
  std::vector<double> norms_b_bstar;   // upper bracket; empty unless requested
  std::vector<double> conditions;
  std::vector<std::string> flags;      // "ok", "refined", "near_singular", "not_converged"
  std::vector<double> boundary_differences;  // complex sweeps: |W(R(lambda + i gamma) - R^+(lambda))W|
  double sup_norm = 0.0;
};

struct SweepOptions {
  bool with_b_bstar = false;
  NormOptions norm;
  int threads = 0;
};

LapReport lap_sweep(const LapProblem& problem, const std::vector<double>& lambda_grid, double sigma, Branch branch,
                    const SweepOptions& opts = {});

LapReport complex_sweep(const LapProblem& problem, double lambda, const std::vector<double>& gamma_grid, double sigma,
                        const SweepOptions& opts = {});

/// Weighted norm of the free Schrodinger resolvent R0(z^2) (scalar kernel on the same grid).
double schrodinger_weighted_norm(const Grid& grid, double z, double sigma, Branch branch,
                                 const NormOptions& opts = {});

/// Second-order central-difference D_m = -i alpha . grad + m beta; boundary layer set to zero.
CVector discrete_dirac(const DiracMatrices& mats, double m, const Grid& grid, const CVector& u);
/// 1 on points with all neighbours inside the box, 0 on the outer layer.
RVector interior_mask(const Grid& grid, int spinor_dim);

// ---------------------------------------------------------------------------
// Threshold suite

/// G = (D_m + m) R0(0) for n = 3, D_0 G0 for n = 2 with m = 0.
std::shared_ptr<ConvolutionOperator> threshold_operator(const DiracMatrices& mats, double m, const Grid& grid);

struct ThresholdReport {
  double m = 0.0;
  double smallest_singular_value = 0.0;
  CVector singular_vector;
  bool regular = true;
  std::vector<std::pair<double, double>> blambda_decay;  // (lambda, |w (R0^+(lambda) - G) w|)
};

constexpr double kRegularTolerance = 1e-6;
constexpr double kCrossingLevel = 1e-3;

/// I + s w G V w^{-1}
OperatorPtr threshold_system(const std::shared_ptr<const ConvolutionOperator>& G, const MultiplicationOperator& V,
                             double sigma, double s = 1.0);

ThresholdReport regularity_check(const LapProblem& problem, double sigma,
                                 const std::vector<double>& lambda_offsets = {},
                                 const NormOptions& opts = {});

struct CouplingSweep {
  std::vector<std::pair<double, double>> table;  // (s, smallest singular value), in evaluation order of s_grid
  bool bracketed = false;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double s_star = 0.0;
  std::vector<std::pair<double, double>> refinements;  // extra evaluations made while refining
};

/// V(s) = s * V_unit. Finds where sigma_min(I + w G V(s) w^{-1}) crosses 1e-3.
CouplingSweep coupling_sweep(const LapProblem& problem_unit, const std::vector<double>& s_grid, double sigma,
                             int threads = 0);

}  // namespace diraclap
