#pragma once

// Complex-valued inner loops with a portable scalar reference and an AVX2/FMA
// variant. The active table is chosen once at first use from CPUID; the
// environment variable DIRAC_LAP_SIMD=scalar pins the reference path.

#include <cstddef>
#include <string_view>

#include "diraclap/types.hpp"

namespace diraclap::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // out[i] += a[i] * b[i]
  void (*mul_acc)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
  // out[i] += conj(a[i]) * b[i]
  void (*conj_mul_acc)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
  // sum a[i] * b[i]
  cplx (*dotu)(const cplx* a, const cplx* b, std::size_t n);
  // sum conj(a[i]) * b[i]
  cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
  // y[i] += alpha * conj(x[i])
  void (*axpy_conj)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // x[i] *= w[i]
  void (*scale_real)(cplx* x, const double* w, std::size_t n);
  // sum |a[i]|^2
  double (*norm_sq)(const cplx* a, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Test hook: override the dispatch decision for the rest of the process.
void force_isa(Isa isa);

}  // namespace diraclap::simd
