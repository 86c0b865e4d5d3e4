#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace shapcf::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SHAPCF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("SHAPCF_SIMD");
  if (env != nullptr) {
    const std::string_view requested(env);
    if (requested == "ref" || requested == "scalar" || requested == "off") {
      return &reference_table();
    }
  }
  if (const KernelTable* vec = avx2_table()) return vec;
  return &reference_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& reference_table() { return detail::kReferenceTable; }

const KernelTable* avx2_table() {
#if defined(SHAPCF_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_table() {
  return *active_slot().load(std::memory_order_acquire);
}

bool select_table(std::string_view name) {
  if (name == "ref") {
    active_slot().store(&reference_table(), std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const KernelTable* vec = avx2_table()) {
      active_slot().store(vec, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace shapcf::kernels
