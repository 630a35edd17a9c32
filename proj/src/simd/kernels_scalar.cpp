#include "diraclap/simd.hpp"

namespace diraclap::simd {
namespace {

void mul_acc(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    out[i] += cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void conj_mul_acc(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    out[i] += cplx(ar * br + ai * bi, ar * bi - ai * br);
  }
}

cplx dotu(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
  }
  return {re, im};
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void axpy_conj(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = -x[i].imag();
    y[i] += cplx(pr * xr - pi * xi, pr * xi + pi * xr);
  }
}

void scale_real(cplx* x, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= w[i];
}

double norm_sq(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

constexpr KernelTable kScalar{Isa::Scalar, mul_acc, conj_mul_acc, dotu, dotc, axpy_conj, scale_real, norm_sq};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace diraclap::simd
