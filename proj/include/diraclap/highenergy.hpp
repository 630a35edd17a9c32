#pragma once

#include <string>
#include <vector>

#include "diraclap/lap.hpp"
#include "diraclap/norms.hpp"
#include "diraclap/sphere.hpp"

namespace diraclap {

/// Index value standing for the short-range piece R_d in a product.
constexpr int kShortRange = -1;

struct ProductSpec {
  std::vector<int> indices;  // cap indices or kShortRange
  double z = 1.0;
  double d = 1.0;
  int length() const { return static_cast<int>(indices.size()); }
};

enum class ProductClass { Directed, Undirected };
std::string to_string(ProductClass c);

/// Separation threshold in units of delta for adjacent surviving caps.
constexpr double kDirectedSeparation = 10.0;

ProductClass classify_product(const std::vector<int>& indices, const SpherePartition& partition);

/// Scalar pieces of the directional decomposition R0 = sum_i R_i + R_d.
/// Cap piece: R0(z^2)(u) eta_d(|u|) Phi_i(u/|u|); short-range piece: R0(z^2)(u)(1 - eta_d(|u|)).
cplx cap_piece(int n, double z, double d, const SpherePartition& partition, int index,
               std::span<const double> u, Branch branch);

/// (D_m + lambda) applied to a decomposition piece (lambda = sqrt(z^2 + m^2)), with its cell integral.
MatrixKernel dirac_piece_kernel(const DiracMatrices& mats, double m, double z, double d,
                                const SpherePartition& partition, int index, Branch branch);

/// L_z R_i = V (D_m + lambda) R_i as an operator on the grid.
OperatorPtr lz_factor(const LapProblem& problem, double z, double d, const SpherePartition& partition, int index,
                      Branch branch);

/// prod_k L_z R_{i_k} (factor 0 leftmost). Enforces h <= pi / (4 z).
OperatorPtr product_operator(const LapProblem& problem, const ProductSpec& spec, const SpherePartition& partition,
                             Branch branch);

NormBracket product_norm(const LapProblem& problem, const ProductSpec& spec, const SpherePartition& partition,
                         Branch branch, const NormOptions& opts = {});

struct NeumannResult {
  int M = 1;
  double z = 0.0;
  double norm_lo = 0.0;
  double norm_hi = 0.0;
  bool pass = false;
  double single_factor_hi = 0.0;   // |L_z R0|_{B->B} upper bracket
  double inverse_bound = 0.0;      // implied bound on |(I + L_z R0)^{-1}|_{B->B} when pass
};

/// |(L_z R0(z^2))^M|_{B->B}; pass iff the upper bracket is at most 1/2.
NeumannResult neumann_tail_check(const LapProblem& problem, int M, double z, Branch branch = Branch::Outgoing,
                                 const NormOptions& opts = {});

struct NeumannFrontier {
  std::vector<NeumannResult> results;
  std::vector<std::string> warnings;  // submultiplicativity discrepancies above 5%
};

NeumannFrontier neumann_frontier(const LapProblem& problem, const std::vector<int>& M_list,
                                 const std::vector<double>& z_list, Branch branch = Branch::Outgoing,
                                 const NormOptions& opts = {}, int threads = 0);

struct ScalingTable {
  std::vector<double> lambdas;
  std::vector<double> norms;
  double exponent = 0.0;  // least-squares slope of log norm against log lambda
};

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

/// B -> B* norms of D^alpha R_{d,delta}(lambda^2) (scalar, |alpha| in {0,1}, derivative along x_1),
/// cap centered at e_1.
ScalingTable dir_res_scaling_check(const Grid& grid, double d, double delta, int alpha_order,
                                   const std::vector<double>& lambdas, const NormOptions& opts = {});

/// L^2 -> L^2 norms of D^alpha R_d(lambda^2). With hold_product the cutoff is d / lambda at each
/// lambda (d lambda fixed); otherwise d is fixed.
ScalingTable short_range_check(const Grid& grid, double d, int alpha_order, const std::vector<double>& lambdas,
                               bool hold_product, const NormOptions& opts = {});

/// Annular bump chi on 1 < r < 2 (one on [1.25, 1.75]).
double annulus_bump(double r);

struct OscillatoryResult {
  double measured = 0.0;
  double bound = 0.0;
};

/// |T_{delta,p,R1,R2}|_{2->2} for n = 2 and the bound C delta^{p-1/2} sqrt(R1 R2).
double oscillatory_norm(const Grid& grid, double delta, double p, double R1, double R2,
                        const NormOptions& opts = {});
/// C measured once at (delta, p, R1, R2) = (0.5, 1/2, 1, 1).
double oscillatory_constant(const Grid& grid, const NormOptions& opts = {});
OscillatoryResult oscillatory_norm_check(const Grid& grid, double delta, double p, double R1, double R2, double C,
                                         const NormOptions& opts = {});

}  // namespace diraclap
