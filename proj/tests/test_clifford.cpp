#include <doctest.h>

#include <random>

#include "diraclap/clifford.hpp"

using namespace diraclap;

namespace {

CMatrix random_unitary(int s, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  CMatrix A(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) A(i, j) = cplx(N(rng), N(rng));
  Eigen::HouseholderQR<CMatrix> qr(A);
  return qr.householderQ() * CMatrix::Identity(s, s);
}

}  // namespace

TEST_CASE("anticommutation relations hold for n = 2..8") {
  for (int n = 2; n <= 8; ++n) {
    const DiracMatrices M = build_dirac_matrices(n);
    CAPTURE(n);
    CHECK(M.spinor_dim == (1 << ((n + 1) / 2)));
    CHECK(static_cast<int>(M.alphas.size()) == n);
    CHECK(clifford_defect(M) <= 1e-12);
  }
}

TEST_CASE("explicit low-dimensional conventions") {
  const cplx I(0.0, 1.0);
  const DiracMatrices d2 = build_dirac_matrices(2);
  CHECK(d2.alphas[0](0, 1) == -I);
  CHECK(d2.alphas[0](1, 0) == I);
  CHECK(d2.alphas[1](0, 1) == 1.0);
  CHECK(d2.beta(1, 1) == -1.0);
  const DiracMatrices d3 = build_dirac_matrices(3);
  for (int k = 0; k < 3; ++k) {
    CHECK(d3.alphas[k].block(0, 2, 2, 2) == pauli(k + 1));
    CHECK(d3.alphas[k].block(2, 0, 2, 2) == pauli(k + 1));
    CHECK(d3.alphas[k].block(0, 0, 2, 2).isZero());
  }
  CHECK(d3.beta.block(0, 0, 2, 2).isIdentity());
  CHECK((-d3.beta.block(2, 2, 2, 2)).isIdentity());
}

TEST_CASE("dimension below two is rejected") {
  CHECK_THROWS_AS(build_dirac_matrices(1), ValidationError);
  CHECK_THROWS_AS(build_dirac_matrices(0), ValidationError);
}

TEST_CASE("symbol squares to the Klein-Gordon symbol") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int n = 2; n <= 6; ++n) {
    const DiracMatrices M = build_dirac_matrices(n);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> xi(n);
      double r2 = 0.0;
      for (double& x : xi) r2 += (x = U(rng)) * x;
      const double m = std::abs(U(rng));
      const CMatrix S = dirac_symbol(M, xi, m);
      CHECK((S - S.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
      const CMatrix E = S * S - (r2 + m * m) * CMatrix::Identity(M.spinor_dim, M.spinor_dim);
      CHECK(E.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("relations are invariant under unitary change of basis") {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 4, 5}) {
    const DiracMatrices M = build_dirac_matrices(n);
    const DiracMatrices C = conjugated(M, random_unitary(M.spinor_dim, rng));
    CHECK(clifford_defect(C) <= 1e-12);
  }
}

TEST_CASE("defect detects a broken family") {
  DiracMatrices M = build_dirac_matrices(3);
  M.alphas[1] = M.alphas[0];
  CHECK(clifford_defect(M) >= 1.0);
}
