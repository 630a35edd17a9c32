#include <immintrin.h>

#include "diraclap/simd.hpp"

namespace diraclap::simd {
namespace {

// Two complex doubles per register, interleaved [re0 im0 re1 im1].
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline __m256d conj_lanes(__m256d a) {
  const __m256d mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  return _mm256_xor_pd(a, mask);
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

void mul_acc(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dp(a + i));
    const __m256d vb = _mm256_loadu_pd(dp(b + i));
    const __m256d vo = _mm256_loadu_pd(dp(out + i));
    _mm256_storeu_pd(dp(out + i), _mm256_add_pd(vo, cmul(va, vb)));
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void conj_mul_acc(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = conj_lanes(_mm256_loadu_pd(dp(a + i)));
    const __m256d vb = _mm256_loadu_pd(dp(b + i));
    const __m256d vo = _mm256_loadu_pd(dp(out + i));
    _mm256_storeu_pd(dp(out + i), _mm256_add_pd(vo, cmul(va, vb)));
  }
  for (; i < n; ++i) out[i] += std::conj(a[i]) * b[i];
}

inline cplx hsum(__m256d acc) {
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  return {t[0] + t[2], t[1] + t[3]};
}

cplx dotu(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = _mm256_add_pd(acc, cmul(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
  cplx s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = _mm256_add_pd(acc, cmul(conj_lanes(_mm256_loadu_pd(dp(a + i))), _mm256_loadu_pd(dp(b + i))));
  cplx s = hsum(acc);
  for (; i < n; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void axpy_conj(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d va = _mm256_set_pd(alpha.imag(), alpha.real(), alpha.imag(), alpha.real());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = conj_lanes(_mm256_loadu_pd(dp(x + i)));
    const __m256d vy = _mm256_loadu_pd(dp(y + i));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(vy, cmul(vx, va)));
  }
  for (; i < n; ++i) y[i] += alpha * std::conj(x[i]);
}

void scale_real(cplx* x, const double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d w2 = _mm256_castpd128_pd256(_mm_loadu_pd(w + i));
    const __m256d ww = _mm256_permute4x64_pd(w2, 0x50);  // [w0 w0 w1 w1]
    _mm256_storeu_pd(dp(x + i), _mm256_mul_pd(_mm256_loadu_pd(dp(x + i)), ww));
  }
  for (; i < n; ++i) x[i] *= w[i];
}

double norm_sq(const cplx* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(dp(a + i));
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  double s = (t[0] + t[1]) + (t[2] + t[3]);
  for (; i < n; ++i) s += std::norm(a[i]);
  return s;
}

constexpr KernelTable kAvx2{Isa::Avx2, mul_acc, conj_mul_acc, dotu, dotc, axpy_conj, scale_real, norm_sq};

}  // namespace

const KernelTable* avx2_kernels_unchecked() { return &kAvx2; }

}  // namespace diraclap::simd
