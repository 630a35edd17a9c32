#include "diraclap/clifford.hpp"

#include <string>

namespace diraclap {
namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Off-diagonal and diagonal real Pauli blocks for odd-dimension doubling.
CMatrix pauli_x() { return pauli(2); }
CMatrix pauli_z() { return pauli(3); }

}  // namespace

CMatrix pauli(int k) {
  const cplx I(0.0, 1.0);
  CMatrix s(2, 2);
  switch (k) {
    case 1: s << 0.0, -I, I, 0.0; break;
    case 2: s << 0.0, 1.0, 1.0, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: throw ValidationError("pauli index must be 1, 2 or 3");
  }
  return s;
}

DiracMatrices build_dirac_matrices(int n) {
  if (n < 2) throw ValidationError("dimension n must be at least 2, got " + std::to_string(n));

  DiracMatrices out;
  out.dimension = n;
  if (n == 2) {
    out.spinor_dim = 2;
    out.alphas = {pauli(1), pauli(2)};
    out.beta = pauli(3);
    return out;
  }
  if (n == 3) {
    const CMatrix id2 = CMatrix::Identity(2, 2);
    out.spinor_dim = 4;
    for (int k = 1; k <= 3; ++k) out.alphas.push_back(kron(pauli_x(), pauli(k)));
    out.beta = kron(pauli_z(), id2);
    return out;
  }
  if (n % 2 == 0) {
    // n = 2k: the (n-2) family has n-1 mutually anticommuting matrices.
    const DiracMatrices old = build_dirac_matrices(n - 2);
    const CMatrix id = CMatrix::Identity(old.spinor_dim, old.spinor_dim);
    out.spinor_dim = 2 * old.spinor_dim;
    for (const CMatrix& a : old.alphas) out.alphas.push_back(kron(pauli(1), a));
    out.alphas.push_back(kron(pauli(1), old.beta));
    out.alphas.push_back(kron(pauli(2), id));
    out.beta = kron(pauli(3), id);
    return out;
  }
  // n = 2k+1: previous beta becomes alpha_n, new block beta.
  const DiracMatrices old = build_dirac_matrices(n - 1);
  const CMatrix id = CMatrix::Identity(old.spinor_dim, old.spinor_dim);
  out.spinor_dim = 2 * old.spinor_dim;
  for (const CMatrix& a : old.alphas) out.alphas.push_back(kron(pauli_x(), a));
  out.alphas.push_back(kron(pauli_x(), old.beta));
  out.beta = kron(pauli_z(), id);
  return out;
}

CMatrix dirac_symbol(const DiracMatrices& mats, std::span<const double> xi, double m) {
  if (static_cast<int>(xi.size()) != mats.dimension)
    throw ValidationError("frequency vector length does not match the dimension");
  CMatrix s = m * mats.beta;
  for (int j = 0; j < mats.dimension; ++j) s += xi[j] * mats.alphas[j];
  return s;
}

double clifford_defect(const DiracMatrices& mats) {
  const int d = mats.spinor_dim;
  const CMatrix id = CMatrix::Identity(d, d);
  double worst = 0.0;
  auto upd = [&](const CMatrix& m) { worst = std::max(worst, m.cwiseAbs().maxCoeff()); };
  for (int j = 0; j < mats.dimension; ++j) {
    upd(mats.alphas[j] - mats.alphas[j].adjoint());
    upd(mats.alphas[j] * mats.beta + mats.beta * mats.alphas[j]);
    for (int k = 0; k < mats.dimension; ++k) {
      const CMatrix ac = mats.alphas[j] * mats.alphas[k] + mats.alphas[k] * mats.alphas[j];
      upd(ac - (j == k ? 2.0 : 0.0) * id);
    }
  }
  upd(mats.beta - mats.beta.adjoint());
  upd(mats.beta * mats.beta - id);
  return worst;
}

DiracMatrices conjugated(const DiracMatrices& mats, const CMatrix& unitary) {
  DiracMatrices out = mats;
  for (CMatrix& a : out.alphas) a = unitary * a * unitary.adjoint();
  out.beta = unitary * mats.beta * unitary.adjoint();
  return out;
}

}  // namespace diraclap
