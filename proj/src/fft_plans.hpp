#pragma once

#include <fftw3.h>

#include <cstddef>

#include "diraclap/types.hpp"

namespace diraclap::detail {

/// fftw_malloc-backed complex buffer (all buffers share FFTW's alignment, so cached
/// plans can be executed on any of them with the new-array interface).
struct FftBuffer {
  explicit FftBuffer(std::size_t len);
  ~FftBuffer();
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  FftBuffer(FftBuffer&& o) noexcept : len(o.len), data(o.data) { o.data = nullptr; }

  void zero();
  fftw_complex* raw() { return reinterpret_cast<fftw_complex*>(data); }

  std::size_t len;
  cplx* data;
};

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

/// In-place n-dimensional plans of edge q, created once per (n, q) under a global lock.
PlanPair plans_for(int n, int q);

}  // namespace diraclap::detail
