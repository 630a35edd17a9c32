#include "diraclap/kernels.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "diraclap/special.hpp"

namespace diraclap {
namespace {

const cplx I(0.0, 1.0);

void check_dimension(int n) {
  if (n != 2 && n != 3) throw ValidationError("kernels are implemented for n = 2, 3 only, got " + std::to_string(n));
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Radius of the ball with the volume of the cell h^n.
double equal_volume_radius(int n, double h) {
  return n == 2 ? h / std::sqrt(kPi) : std::cbrt(3.0 / (4.0 * kPi)) * h;
}

cplx conj_if(cplx v, Branch b) { return b == Branch::Outgoing ? v : std::conj(v); }

void check_real_momentum(double z, double r) {
  if (!(z > 0.0)) throw ValidationError("spectral momentum z must be positive");
  if (!(r > 0.0)) throw ValidationError("radius must be positive (the diagonal is handled by the caller)");
}

}  // namespace

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t2 = t * t;
  return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}

double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 140.0 * u * u * u;
}

double split_transition(double r) { return smoothstep((r - 0.5) / 0.25); }

double range_cutoff(double r, double d) { return smoothstep(2.0 * r / d - 1.0); }

double range_cutoff_derivative(double r, double d) { return smoothstep_derivative(2.0 * r / d - 1.0) * 2.0 / d; }

double cap_bump(double angle, double delta) { return 1.0 - smoothstep(2.0 * angle / delta - 1.0); }

cplx schrodinger_kernel(int n, cplx z, double r) {
  check_dimension(n);
  if (!(r > 0.0)) throw ValidationError("radius must be positive (the diagonal is handled by the caller)");
  if (n == 3) return std::exp(I * z * r) / (4.0 * kPi * r);
  return 0.25 * I * hankel1_0(z * r);
}

cplx schrodinger_kernel(int n, double z, double r, Branch branch) {
  check_real_momentum(z, r);
  return conj_if(schrodinger_kernel(n, cplx(z, 0.0), r), branch);
}

cplx schrodinger_kernel_dr(int n, cplx z, double r) {
  check_dimension(n);
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  if (n == 3) return (I * z - 1.0 / r) * std::exp(I * z * r) / (4.0 * kPi * r);
  return -0.25 * I * z * hankel1_1(z * r);
}

cplx schrodinger_kernel_dr(int n, double z, double r, Branch branch) {
  check_real_momentum(z, r);
  return conj_if(schrodinger_kernel_dr(n, cplx(z, 0.0), r), branch);
}

cplx schrodinger_cell_integral(int n, cplx z, double h) {
  check_dimension(n);
  const double rho = equal_volume_radius(n, h);
  if (n == 3) return rho * rho / 2.0 + I * z * h * h * h / (4.0 * kPi);
  const cplx smooth = -(std::log(z / 2.0) + kEulerGamma) / (2.0 * kPi) + 0.25 * I;
  return -(rho * rho / 2.0) * std::log(rho) + rho * rho / 4.0 + smooth * h * h;
}

cplx schrodinger_cell_integral(int n, double z, double h, Branch branch) {
  if (!(z > 0.0)) throw ValidationError("spectral momentum z must be positive");
  return conj_if(schrodinger_cell_integral(n, cplx(z, 0.0), h), branch);
}

double zero_energy_kernel(int n, double r) {
  check_dimension(n);
  return n == 2 ? -std::log(r) / (2.0 * kPi) : 1.0 / (4.0 * kPi * r);
}

double zero_energy_kernel_dr(int n, double r) {
  check_dimension(n);
  return n == 2 ? -1.0 / (2.0 * kPi * r) : -1.0 / (4.0 * kPi * r * r);
}

double zero_energy_cell_integral(int n, double h) {
  check_dimension(n);
  const double rho = equal_volume_radius(n, h);
  return n == 2 ? -(rho * rho / 2.0) * std::log(rho) + rho * rho / 4.0 : rho * rho / 2.0;
}

KernelSplit kernel_split(int n, double z, double r, Branch branch) {
  const cplx full = schrodinger_kernel(n, z, r, branch);
  const double theta = split_transition(z * r);
  KernelSplit s;
  s.osc = theta * full;
  s.loc = (1.0 - theta) * full;
  return s;
}

cplx split_amplitude(int n, double rho) {
  const double theta = split_transition(rho);
  if (theta == 0.0) return 0.0;
  return theta * schrodinger_kernel(n, 1.0, rho, Branch::Outgoing) * std::pow(rho, (n - 1) / 2.0) *
         std::exp(-I * rho);
}

cplx split_local(int n, double rho) {
  const double theta = split_transition(rho);
  if (theta == 1.0) return 0.0;
  return (1.0 - theta) * schrodinger_kernel(n, 1.0, rho, Branch::Outgoing) * std::pow(rho, n - 2.0);
}

cplx log_leading_term(double r) { return -(std::log(r / 2.0) + kEulerGamma) / (2.0 * kPi) + 0.25 * I; }

cplx truncated_kernel(int n, double z, std::span<const double> x_minus_y, Branch branch,
                      const TruncationSpec& trunc) {
  check_dimension(n);
  if (static_cast<int>(x_minus_y.size()) != n || static_cast<int>(trunc.phi_center.size()) != n)
    throw ValidationError("displacement and cap center must have length n");
  const double r = norm_of(x_minus_y);
  const double eta = range_cutoff(r, trunc.d);
  if (eta == 0.0) return 0.0;
  const double c = std::inner_product(x_minus_y.begin(), x_minus_y.end(), trunc.phi_center.begin(), 0.0) /
                   (r * norm_of(trunc.phi_center));
  const double phi = cap_bump(std::acos(std::clamp(c, -1.0, 1.0)), trunc.delta);
  if (phi == 0.0) return 0.0;
  return schrodinger_kernel(n, z, r, branch) * eta * phi;
}

cplx spectral_momentum(double m, cplx lambda) {
  cplx z = std::sqrt(lambda * lambda - m * m);
  if (z.imag() < 0.0) z = -z;
  return z;
}

CMatrix dirac_from_scalar(const DiracMatrices& mats, double m, cplx lambda, cplx k, std::span<const cplx> grad) {
  CMatrix out = (m * k) * mats.beta;
  out.diagonal().array() += lambda * k;
  for (int j = 0; j < mats.dimension; ++j) out += (-I * grad[j]) * mats.alphas[j];
  return out;
}

CMatrix dirac_kernel(const DiracMatrices& mats, double m, double lambda, std::span<const double> x_minus_y,
                     Branch branch) {
  const int n = mats.dimension;
  check_dimension(n);
  if (!(std::abs(lambda) > m)) throw ValidationError("dirac_kernel requires |lambda| > m");
  if (static_cast<int>(x_minus_y.size()) != n) throw ValidationError("displacement must have length n");
  const double r = norm_of(x_minus_y);
  if (!(r > 0.0)) throw ValidationError("dirac_kernel requires a nonzero displacement");
  const double z = std::sqrt(lambda * lambda - m * m);
  const Branch sb = lambda > 0.0 ? branch : flip(branch);
  const cplx k = schrodinger_kernel(n, z, r, sb);
  const cplx dk = schrodinger_kernel_dr(n, z, r, sb);
  std::array<cplx, 3> grad{};
  for (int j = 0; j < n; ++j) grad[j] = dk * x_minus_y[j] / r;
  return dirac_from_scalar(mats, m, lambda, k, std::span<const cplx>(grad.data(), n));
}

CMatrix dirac_kernel(const DiracMatrices& mats, double m, cplx lambda, std::span<const double> x_minus_y) {
  if (lambda.imag() == 0.0) return dirac_kernel(mats, m, lambda.real(), x_minus_y, Branch::Outgoing);
  if (lambda.imag() < 0.0) throw ValidationError("complex spectral parameter must have Im lambda > 0");
  const int n = mats.dimension;
  check_dimension(n);
  const double r = norm_of(x_minus_y);
  if (!(r > 0.0)) throw ValidationError("dirac_kernel requires a nonzero displacement");
  const cplx z = spectral_momentum(m, lambda);
  const cplx k = schrodinger_kernel(n, z, r);
  const cplx dk = schrodinger_kernel_dr(n, z, r);
  std::array<cplx, 3> grad{};
  for (int j = 0; j < n; ++j) grad[j] = dk * x_minus_y[j] / r;
  return dirac_from_scalar(mats, m, lambda, k, std::span<const cplx>(grad.data(), n));
}

MatrixKernel schrodinger_matrix_kernel(int n, double z, Branch branch) {
  check_dimension(n);
  MatrixKernel k;
  k.spinor_dim = 1;
  k.off_diagonal = [n, z, branch](std::span<const double> u) {
    CMatrix v(1, 1);
    v(0, 0) = schrodinger_kernel(n, z, norm_of(u), branch);
    return v;
  };
  k.cell = [n, z, branch](double h) {
    CMatrix v(1, 1);
    v(0, 0) = schrodinger_cell_integral(n, z, h, branch);
    return v;
  };
  return k;
}

MatrixKernel schrodinger_matrix_kernel(int n, cplx z) {
  check_dimension(n);
  MatrixKernel k;
  k.spinor_dim = 1;
  k.off_diagonal = [n, z](std::span<const double> u) {
    CMatrix v(1, 1);
    v(0, 0) = schrodinger_kernel(n, z, norm_of(u));
    return v;
  };
  k.cell = [n, z](double h) {
    CMatrix v(1, 1);
    v(0, 0) = schrodinger_cell_integral(n, z, h);
    return v;
  };
  return k;
}

MatrixKernel dirac_matrix_kernel(const DiracMatrices& mats, double m, double lambda, Branch branch) {
  check_dimension(mats.dimension);
  if (!(std::abs(lambda) > m)) throw ValidationError("dirac resolvent requires |lambda| > m");
  MatrixKernel k;
  k.spinor_dim = mats.spinor_dim;
  k.off_diagonal = [mats, m, lambda, branch](std::span<const double> u) {
    return dirac_kernel(mats, m, lambda, u, branch);
  };
  k.cell = [mats, m, lambda, branch](double h) {
    const double z = std::sqrt(lambda * lambda - m * m);
    const Branch sb = lambda > 0.0 ? branch : flip(branch);
    const cplx c = schrodinger_cell_integral(mats.dimension, z, h, sb);
    CMatrix v = (m * c) * mats.beta;
    v.diagonal().array() += lambda * c;
    return v;
  };
  return k;
}

MatrixKernel dirac_matrix_kernel(const DiracMatrices& mats, double m, cplx lambda) {
  if (lambda.imag() == 0.0) return dirac_matrix_kernel(mats, m, lambda.real(), Branch::Outgoing);
  check_dimension(mats.dimension);
  if (lambda.imag() < 0.0) throw ValidationError("complex spectral parameter must have Im lambda > 0");
  MatrixKernel k;
  k.spinor_dim = mats.spinor_dim;
  k.off_diagonal = [mats, m, lambda](std::span<const double> u) { return dirac_kernel(mats, m, lambda, u); };
  k.cell = [mats, m, lambda](double h) {
    const cplx c = schrodinger_cell_integral(mats.dimension, spectral_momentum(m, lambda), h);
    CMatrix v = (m * c) * mats.beta;
    v.diagonal().array() += lambda * c;
    return v;
  };
  return k;
}

MatrixKernel threshold_matrix_kernel(const DiracMatrices& mats, double m) {
  const int n = mats.dimension;
  check_dimension(n);
  if (m < 0.0) throw ValidationError("mass must be non-negative");
  if (n == 2 && m > 0.0)
    throw ValidationError("threshold operator for n = 2 with m > 0 is not supported");
  MatrixKernel k;
  k.spinor_dim = mats.spinor_dim;
  k.off_diagonal = [mats, m, n](std::span<const double> u) {
    const double r = norm_of(u);
    const double g = zero_energy_kernel(n, r);
    const double dg = zero_energy_kernel_dr(n, r);
    std::array<cplx, 3> grad{};
    for (int j = 0; j < n; ++j) grad[j] = dg * u[j] / r;
    return dirac_from_scalar(mats, m, m, g, std::span<const cplx>(grad.data(), n));
  };
  k.cell = [mats, m, n](double h) {
    const double c = zero_energy_cell_integral(n, h);
    CMatrix v = (m * c) * mats.beta;
    v.diagonal().array() += m * c;
    return v;
  };
  return k;
}

}  // namespace diraclap
