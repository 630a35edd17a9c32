#include <doctest.h>

#include <cmath>
#include <random>

#include "diraclap/kernels.hpp"

using namespace diraclap;

TEST_CASE("three-dimensional kernel is the outgoing spherical wave") {
  for (double z : {0.5, 1.0, 4.0})
    for (double r : {0.01, 0.3, 2.0, 9.0}) {
      const cplx ref = std::exp(cplx(0.0, z * r)) / (4.0 * kPi * r);
      CHECK(std::abs(schrodinger_kernel(3, z, r, Branch::Outgoing) - ref) <= 1e-14 * std::abs(ref));
    }
}

TEST_CASE("incoming branch is the complex conjugate on the real axis") {
  for (int n : {2, 3})
    for (double r : {0.05, 1.0, 17.0}) {
      const cplx out = schrodinger_kernel(n, 1.7, r, Branch::Outgoing);
      const cplx in = schrodinger_kernel(n, 1.7, r, Branch::Incoming);
      CHECK(std::abs(in - std::conj(out)) <= 1e-15 * std::abs(out));
    }
}

TEST_CASE("complex momentum reduces to the outgoing branch as Im z -> 0") {
  for (int n : {2, 3}) {
    const cplx a = schrodinger_kernel(n, cplx(2.0, 1e-9), 0.7);
    const cplx b = schrodinger_kernel(n, 2.0, 0.7, Branch::Outgoing);
    CHECK(std::abs(a - b) <= 1e-7 * std::abs(b));
  }
}

TEST_CASE("radial derivative matches a finite-difference oracle") {
  for (int n : {2, 3})
    for (cplx z : {cplx(1.0, 0.0), cplx(3.0, 0.0), cplx(1.0, 0.4)})
      for (double r : {0.1, 0.8, 5.0, 20.0}) {
        const double e = 1e-5 * r;
        const cplx fd = (schrodinger_kernel(n, z, r + e) - schrodinger_kernel(n, z, r - e)) / (2.0 * e);
        const cplx an = schrodinger_kernel_dr(n, z, r);
        CAPTURE(n);
        CAPTURE(r);
        CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
      }
}

TEST_CASE("oscillatory and local parts recombine to the full kernel") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(std::log(1e-3), std::log(30.0));
  for (int n : {2, 3})
    for (int t = 0; t < 200; ++t) {
      const double r = std::exp(U(rng)), z = std::exp(U(rng) / 3.0);
      const KernelSplit sp = kernel_split(n, z, r, Branch::Outgoing);
      const cplx full = schrodinger_kernel(n, z, r, Branch::Outgoing);
      CHECK(std::abs(sp.osc + sp.loc - full) <= 1e-12 * std::abs(full));
      if (z * r < 0.5) CHECK(sp.osc == cplx(0.0));
      if (z * r > 0.75) CHECK(sp.loc == cplx(0.0));
    }
}

TEST_CASE("unit-energy amplitudes vanish where the representation says") {
  for (int n : {2, 3}) {
    CHECK(split_amplitude(n, 0.3) == cplx(0.0));
    CHECK(split_local(n, 0.9) == cplx(0.0));
    // |a| stays bounded for large rho
    CHECK(std::abs(split_amplitude(n, 200.0)) <= 1.0);
  }
}

TEST_CASE("two-dimensional local part approaches the logarithmic leading term") {
  double prev = 1e300;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(split_local(2, r) - log_leading_term(r));
    CHECK(err < prev);
    CHECK(err <= 0.1 * r * r * std::abs(std::log(r)));
    prev = err;
  }
}

TEST_CASE("Dirac kernel solves (D_m - lambda) K = 0 away from the origin") {
  for (int n : {2, 3}) {
    const DiracMatrices M = build_dirac_matrices(n);
    const cplx I(0.0, 1.0);
    for (double m : {0.0, 1.0})
      for (double lambda : {1.5, -2.0}) {
        std::vector<double> x = {0.7, -0.4, 0.3};
        x.resize(n);
        const double e = 1e-5;
        const CMatrix K = dirac_kernel(M, m, lambda, x, Branch::Outgoing);
        CMatrix res = (m * M.beta - lambda * CMatrix::Identity(M.spinor_dim, M.spinor_dim)) * K;
        for (int j = 0; j < n; ++j) {
          std::vector<double> a = x, b = x;
          a[j] += e;
          b[j] -= e;
          const CMatrix dK = (dirac_kernel(M, m, lambda, a, Branch::Outgoing) -
                              dirac_kernel(M, m, lambda, b, Branch::Outgoing)) /
                             (2.0 * e);
          res += -I * M.alphas[j] * dK;
        }
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(lambda);
        CHECK(res.cwiseAbs().maxCoeff() <= 1e-6 * K.cwiseAbs().maxCoeff());
      }
  }
}

TEST_CASE("spectral momentum lies on the physical sheet") {
  for (cplx l : {cplx(2.0, 0.1), cplx(-2.0, 0.1), cplx(0.5, 0.3), cplx(3.0, 1e-12)}) {
    const cplx z = spectral_momentum(1.0, l);
    CHECK(z.imag() >= 0.0);
    CHECK(std::abs(z * z - (l * l - 1.0)) <= 1e-12 * std::abs(l * l));
  }
}

TEST_CASE("three-dimensional cell integral of the zero-energy kernel") {
  // Integral of 1/(4 pi |x|) over the unit cube is 2.380077.../(4 pi); the equal-volume ball
  // used for the singular part is within 2%.
  const double cube = 2.3800772 / (4.0 * kPi);
  for (double h : {0.1, 0.5}) {
    const double cell = zero_energy_cell_integral(3, h);
    CHECK(std::abs(cell - cube * h * h) <= 0.02 * cube * h * h);
  }
}

TEST_CASE("two-dimensional cell integral against a quadrature oracle") {
  // Oracle: tensor Gauss-Legendre on the cell (nodes never hit the log singularity), refined.
  const double h = 0.2;
  const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891};
  const int sub = 40;
  double acc = 0.0;
  const double hs = h / sub;
  for (int a = 0; a < sub; ++a)
    for (int b = 0; b < sub; ++b)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const double x = -h / 2 + (a + 0.5) * hs + 0.5 * hs * xg[i];
          const double y = -h / 2 + (b + 0.5) * hs + 0.5 * hs * xg[j];
          acc += wg[i] * wg[j] * 0.25 * hs * hs * zero_energy_kernel(2, std::hypot(x, y));
        }
  CHECK(std::abs(zero_energy_cell_integral(2, h) - acc) <= 0.01 * std::abs(acc));
}

TEST_CASE("smooth cutoffs") {
  CHECK(smoothstep(-0.1) == 0.0);
  CHECK(smoothstep(1.2) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  CHECK(range_cutoff(0.4, 1.0) == 0.0);
  CHECK(range_cutoff(1.0, 1.0) == 1.0);
  CHECK(cap_bump(0.2, 0.5) == 1.0);
  CHECK(cap_bump(0.6, 0.5) == 0.0);
  for (double t = 0.05; t < 1.0; t += 0.1) {
    const double e = 1e-6;
    CHECK(smoothstep_derivative(t) == doctest::Approx((smoothstep(t + e) - smoothstep(t - e)) / (2 * e)).epsilon(1e-6));
  }
}

TEST_CASE("2d massless threshold kernel is -i alpha . grad of the log kernel") {
  const DiracMatrices M = build_dirac_matrices(2);
  const MatrixKernel G = threshold_matrix_kernel(M, 0.0);
  for (const std::array<double, 2>& u : {std::array<double, 2>{0.3, -0.4}, std::array<double, 2>{-1.5, 2.0}}) {
    const double r2 = u[0] * u[0] + u[1] * u[1];
    const CMatrix expected = (cplx(0.0, 1.0) / (2.0 * kPi * r2)) * (u[0] * M.alphas[0] + u[1] * M.alphas[1]);
    CHECK((G.off_diagonal(std::span<const double>(u.data(), 2)) - expected).norm() <= 1e-14);
  }
}
