#pragma once

#include <cstdint>

#include "diraclap/grid.hpp"
#include "diraclap/operators.hpp"

namespace diraclap {

struct NormOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  std::uint64_t seed = 0x5eedULL;
};

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |A*A v - value^2 v| / value^2 at the last iterate
  bool converged = false;
  CVector vector;  // last right singular vector iterate
};

/// Largest singular value by power iteration on A*A from a fixed pseudo-random start.
NormResult spectral_norm(const LinearOperator& A, const NormOptions& opts = {});

/// |<x>^{-sigma} A <x>^{-sigma}|_{2->2}
NormResult weighted_operator_norm(const OperatorPtr& A, const Grid& grid, int spinor_dim, double sigma,
                                  const NormOptions& opts = {});

struct NormBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool converged = true;
};

/// B -> B* norm. The B ball is the l^1 sum over shells, so the supremum is attained on
/// single-shell inputs and equals max_{j,k} 2^{-(j+k)/2} |chi_j A chi_k|; lo uses the
/// Rayleigh estimate of each block norm and hi the residual bound (rho + |A*A v - rho v|)^{1/2}.
NormBracket b_to_bstar_norm(const OperatorPtr& A, const DyadicShells& shells, int spinor_dim,
                            const NormOptions& opts = {});

/// B -> B norm: lo from single-shell trial vectors refined by ascent on sum_j 2^{j/2}|chi_j A v|,
/// hi = max_k sum_j 2^{(j-k)/2} |chi_j A chi_k|.
NormBracket b_to_b_norm(const OperatorPtr& A, const DyadicShells& shells, int spinor_dim,
                        const NormOptions& opts = {});

struct SingularResult {
  double value = 0.0;
  CVector vector;  // right singular vector
  int iterations = 0;
  bool converged = false;
};

/// Smallest singular value: dense SVD up to dense_svd_limit, Lanczos on A*A with full
/// reorthogonalization above it.
SingularResult smallest_singular_value(const LinearOperator& A, Eigen::Index dense_svd_limit = 2048,
                                       double tol = 1e-10);

/// Deterministic unit-norm pseudo-random start vector.
CVector start_vector(Eigen::Index dim, std::uint64_t seed);

}  // namespace diraclap
