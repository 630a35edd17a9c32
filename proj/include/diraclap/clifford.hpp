#pragma once

#include <span>
#include <vector>

#include "diraclap/types.hpp"

namespace diraclap {

/// Anticommuting Hermitian family alpha_1..alpha_n, beta acting on C^{2^N},
/// N = floor((n+1)/2).
struct DiracMatrices {
  int dimension = 0;
  int spinor_dim = 0;
  std::vector<CMatrix> alphas;
  CMatrix beta;
};

/// n = 2 and n = 3 are the Pauli and block conventions; n >= 4 is built by
/// tensor doubling from the lower-dimensional family. Throws ValidationError for n < 2.
DiracMatrices build_dirac_matrices(int n);

/// Fourier symbol alpha . xi + m beta of D_m.
CMatrix dirac_symbol(const DiracMatrices& mats, std::span<const double> xi, double m);

/// Largest entrywise violation of the anticommutation relations and Hermiticity.
double clifford_defect(const DiracMatrices& mats);

/// U mats U^dagger for a unitary U; used to check basis independence.
DiracMatrices conjugated(const DiracMatrices& mats, const CMatrix& unitary);

/// The 2x2 Pauli matrices in the ordering used for n = 2, 3:
/// sigma1 = [[0,-i],[i,0]], sigma2 = [[0,1],[1,0]], sigma3 = diag(1,-1).
CMatrix pauli(int k);

}  // namespace diraclap
