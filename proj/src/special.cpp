#include "diraclap/special.hpp"

#include <cmath>

namespace diraclap {
namespace {

using lcplx = std::complex<long double>;

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr long double kGammaL = 0.577215664901532860606512090082402431L;

// Ascending series for J0, Y0, J1, Y1 in extended precision.
struct SeriesValues {
  lcplx j0, y0, j1, y1;
};

SeriesValues ascending(lcplx z) {
  const lcplx q = -z * z / 4.0L;  // (-z^2/4)
  const lcplx half = z / 2.0L;
  const lcplx log_half = std::log(half);

  lcplx j0 = 0, s0 = 0, j1s = 0, s1 = 0;
  lcplx term = 1;   // q^k / (k!)^2
  lcplx term1 = 1;  // q^k / (k! (k+1)!)
  long double harmonic = 0;  // H_k
  for (int k = 0; k < 400; ++k) {
    if (k > 0) {
      term *= q / static_cast<long double>(k * k);
      term1 *= q / static_cast<long double>(k * (k + 1));
      harmonic += 1.0L / k;
    }
    j0 += term;
    s0 += harmonic * term;
    j1s += term1;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 += (-2.0L * kGammaL + 2.0L * harmonic + 1.0L / (k + 1)) * term1;
    if (k > 4 && std::abs(term) < 1e-24L * std::abs(j0) && std::abs(term1) < 1e-24L * std::abs(j1s) &&
        std::abs(harmonic * term) < 1e-24L * (std::abs(s0) + 1e-300L))
      break;
  }
  SeriesValues v;
  v.j0 = j0;
  v.y0 = (2.0L / kPiL) * ((log_half + kGammaL) * j0 - s0);
  v.j1 = half * j1s;
  v.y1 = (2.0L / kPiL) * log_half * v.j1 - 2.0L / (kPiL * z) - (1.0L / kPiL) * half * s1;
  return v;
}

// H_nu^(1)(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_k i^k a_k(nu) / z^k,
// truncated at the smallest term.
cplx asymptotic(int nu, cplx z) {
  const cplx I(0.0, 1.0);
  const double mu = 4.0 * nu * nu;
  cplx sum = 1.0, term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    cplx next = term * I * (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(next);
    if (k >= 12 && (mag >= last || mag < 1e-17 * std::abs(sum))) break;
    term = next;
    last = mag;
    sum += term;
  }
  const cplx phase = std::exp(I * (z - nu * kPi / 2.0 - kPi / 4.0));
  return std::sqrt(2.0 / (kPi * z)) * phase * sum;
}

}  // namespace

cplx hankel1_0(cplx z) {
  if (std::abs(z) <= kHankelSwitch) {
    const SeriesValues v = ascending(lcplx(z.real(), z.imag()));
    const lcplx h = v.j0 + lcplx(0, 1) * v.y0;
    return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
  }
  return asymptotic(0, z);
}

cplx hankel1_1(cplx z) {
  if (std::abs(z) <= kHankelSwitch) {
    const SeriesValues v = ascending(lcplx(z.real(), z.imag()));
    const lcplx h = v.j1 + lcplx(0, 1) * v.y1;
    return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
  }
  return asymptotic(1, z);
}

}  // namespace diraclap
