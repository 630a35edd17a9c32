#include <atomic>
#include <cstdlib>
#include <string>

#include "diraclap/simd.hpp"

namespace diraclap::simd {

#ifdef DIRACLAP_HAVE_AVX2
const KernelTable* avx2_kernels_unchecked();
#endif

const KernelTable* avx2_kernels() {
#ifdef DIRACLAP_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* select_default() {
  if (const char* env = std::getenv("DIRAC_LAP_SIMD"); env != nullptr && std::string(env) == "scalar")
    return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = select_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

Isa active_isa() { return active().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && avx2_kernels() == nullptr) return;
  g_active.store(isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels(), std::memory_order_release);
}

}  // namespace diraclap::simd
