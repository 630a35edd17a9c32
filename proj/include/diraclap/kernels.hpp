#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "diraclap/clifford.hpp"
#include "diraclap/types.hpp"

namespace diraclap {

/// Polynomial smoothstep, C^3: 0 for t <= 0, 1 for t >= 1.
double smoothstep(double t);
double smoothstep_derivative(double t);

/// theta of the a/b split: 0 on r <= 1/2, 1 on r >= 3/4.
double split_transition(double r);

/// Cutoff to |x| > d: zero for r <= d/2, one for r >= d.
double range_cutoff(double r, double d);
double range_cutoff_derivative(double r, double d);

/// Angular bump around a unit vector: one within delta/2, zero beyond delta.
double cap_bump(double angle, double delta);

/// Free Schrodinger resolvent kernel R0(z^2)(r), n in {2, 3}.
/// n = 3: e^{izr}/(4 pi r); n = 2: (i/4) H0^(1)(zr). Incoming branch is the conjugate.
cplx schrodinger_kernel(int n, double z, double r, Branch branch);
/// Same with complex z (Im z >= 0, physical sheet); no branch choice.
cplx schrodinger_kernel(int n, cplx z, double r);
/// d/dr of the scalar kernel.
cplx schrodinger_kernel_dr(int n, cplx z, double r);
cplx schrodinger_kernel_dr(int n, double z, double r, Branch branch);

/// Integral of the scalar kernel over the diagonal cell of volume h^n
/// (equal-volume ball for the singular part, smooth remainder at 0 times h^n).
cplx schrodinger_cell_integral(int n, cplx z, double h);
cplx schrodinger_cell_integral(int n, double z, double h, Branch branch);

/// Kernel of G0 = -(1/2pi) log|x-y| (n = 2) or 1/(4 pi |x-y|) (n = 3): the zero-energy kernel.
double zero_energy_kernel(int n, double r);
double zero_energy_kernel_dr(int n, double r);
double zero_energy_cell_integral(int n, double h);

struct KernelSplit {
  cplx osc;
  cplx loc;
  double cutoff_lo = 0.5;
  double cutoff_hi = 0.75;
};

/// Split of R0(z^2)(r) into the oscillatory (a) and local (b) summands, cut at
/// the scaled radius z r.
KernelSplit kernel_split(int n, double z, double r, Branch branch);

/// a(rho) and b(rho) of the unit-energy representation
/// R0(1)(rho) = e^{i rho} a(rho) / rho^{(n-1)/2} + b(rho) / rho^{n-2}.
cplx split_amplitude(int n, double rho);
cplx split_local(int n, double rho);

/// The leading small-r term of b in n = 2: -(1/2pi)(log(r/2) + gamma) + i/4.
cplx log_leading_term(double r);

struct TruncationSpec {
  double d = 1.0;
  double delta = 0.5;
  std::vector<double> phi_center;
};

/// Full kernel times eta_d(|x-y|) and the angular cap around phi_center.
cplx truncated_kernel(int n, double z, std::span<const double> x_minus_y, Branch branch, const TruncationSpec& trunc);

/// Dirac resolvent kernel (D_m + lambda) R0(lambda^2 - m^2)(x - y) with analytic gradient.
/// For lambda < -m the Schrodinger boundary value is the opposite branch.
CMatrix dirac_kernel(const DiracMatrices& mats, double m, double lambda, std::span<const double> x_minus_y,
                     Branch branch);
/// Complex spectral parameter, Im lambda > 0 (resolvent off the real axis).
CMatrix dirac_kernel(const DiracMatrices& mats, double m, cplx lambda, std::span<const double> x_minus_y);

/// z = sqrt(lambda^2 - m^2) on the physical sheet (Im z >= 0).
cplx spectral_momentum(double m, cplx lambda);

/// -i alpha . grad + (m beta + lambda) applied to a scalar kernel with value k and gradient grad.
CMatrix dirac_from_scalar(const DiracMatrices& mats, double m, cplx lambda, cplx k, std::span<const cplx> grad);

/// Matrix-valued translation-invariant kernel with its diagonal cell integral.
struct MatrixKernel {
  int spinor_dim = 1;
  std::function<CMatrix(std::span<const double>)> off_diagonal;
  std::function<CMatrix(double h)> cell;  // integral over the diagonal cell, already carrying h^n
};

MatrixKernel schrodinger_matrix_kernel(int n, double z, Branch branch);
MatrixKernel schrodinger_matrix_kernel(int n, cplx z);
MatrixKernel dirac_matrix_kernel(const DiracMatrices& mats, double m, double lambda, Branch branch);
MatrixKernel dirac_matrix_kernel(const DiracMatrices& mats, double m, cplx lambda);
/// Threshold operator G: (D_m + m) R0(0) for n = 3, D_0 G0 for n = 2 with m = 0.
MatrixKernel threshold_matrix_kernel(const DiracMatrices& mats, double m);

}  // namespace diraclap
