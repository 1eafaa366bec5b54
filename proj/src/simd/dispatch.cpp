#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cloudifier/simd/kernels.hpp"

namespace cloudifier::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* forced = std::getenv("CLOUDIFIER_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return &detail::kScalarTable;
  if (const KernelTable* t = avx2_kernels()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
  static const KernelTable* table =
      cpu_has_avx2_fma() ? detail::avx2_table_if_compiled() : nullptr;
  return table;
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void select_isa(Isa isa) {
  if (isa == Isa::Scalar) {
    active().store(&detail::kScalarTable, std::memory_order_release);
    return;
  }
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) throw ConfigError("AVX2 kernels are not available on this build/CPU");
  active().store(t, std::memory_order_release);
}

Isa active_isa() { return kernels().isa; }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace cloudifier::simd
