#include "simd/kernel_variants.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace zipfit::simd {
namespace {

bool cpu_has_avx2() {
#if defined(ZIPFIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const KernelTable* best = avx2_table();
  if (const char* env = std::getenv("ZIPFIT_SIMD")) {
    const std::string want{env};
    if (want == "scalar") return &detail::kScalarTable;
    if (want == "avx2" && best == nullptr)
      throw std::runtime_error("ZIPFIT_SIMD=avx2 requested but AVX2 kernels are unavailable");
  }
  return best != nullptr ? best : &detail::kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
#if defined(ZIPFIT_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() { return &active() == &detail::kScalarTable ? Isa::scalar : Isa::avx2; }

void select(Isa isa) {
  const KernelTable* table = isa == Isa::scalar ? &detail::kScalarTable : avx2_table();
  if (table == nullptr)
    throw std::runtime_error("kernel variant '" + std::string(isa_name(isa)) + "' is unavailable");
  current().store(table, std::memory_order_release);
}

}  // namespace zipfit::simd
