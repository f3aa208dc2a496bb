#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tnsim/kernels.hpp"

namespace tnsim::kernels {

std::string_view to_string(SimdLevel level) {
  return level == SimdLevel::avx2 ? "avx2" : "scalar";
}

bool cpu_supports(SimdLevel level) {
  if (level == SimdLevel::scalar) return true;
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* resolve() {
  if (const char* env = std::getenv("TNSIM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && cpu_supports(SimdLevel::avx2)) return avx2_table();
  }
  if (cpu_supports(SimdLevel::avx2)) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{resolve()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void force(SimdLevel level) {
  if (!cpu_supports(level)) {
    throw std::runtime_error("SIMD level " + std::string(to_string(level)) +
                             " is not supported on this CPU");
  }
  slot().store(level == SimdLevel::avx2 ? avx2_table() : &scalar_table(),
               std::memory_order_release);
}

}  // namespace tnsim::kernels
