#include "fft_plans.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace diraclap::detail {

FftBuffer::FftBuffer(std::size_t n) : len(n), data(reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * n))) {
  if (data == nullptr) throw NumericalError("fftw_malloc failed");
}

FftBuffer::~FftBuffer() { fftw_free(data); }

void FftBuffer::zero() { std::fill(data, data + len, cplx(0.0, 0.0)); }

PlanPair plans_for(int n, int q) {
  // Plan creation is not thread-safe in FFTW; execution on new arrays is.
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({n, q});
  if (it != cache.end()) return it->second;
  std::size_t len = 1;
  int dims[3];
  for (int k = 0; k < n; ++k) {
    dims[k] = q;
    len *= q;
  }
  FftBuffer tmp(len);
  PlanPair p{fftw_plan_dft(n, dims, tmp.raw(), tmp.raw(), FFTW_FORWARD, FFTW_ESTIMATE),
             fftw_plan_dft(n, dims, tmp.raw(), tmp.raw(), FFTW_BACKWARD, FFTW_ESTIMATE)};
  cache.emplace(std::make_pair(n, q), p);
  return p;
}

}  // namespace diraclap::detail
