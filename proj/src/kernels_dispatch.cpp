#include "dismet/kernels.hpp"
#include "dismet/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dismet::kernels {

#if !defined(__x86_64__) && !defined(_M_X64)
const KernelTable* avx2_table() { return nullptr; }
#endif

#if !defined(__aarch64__)
const KernelTable* neon_table() { return nullptr; }
#endif

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool neon_available() {
#if defined(__aarch64__)
  return true;
#else
  return false;
#endif
}

namespace {

const KernelTable& pick() {
  const char* env = std::getenv("DISMETRICS_SIMD");
  std::string want = env ? env : "";
  if (want == "scalar") return scalar_table();
  if (want == "avx2" && avx2_available() && avx2_table()) return *avx2_table();
  if (want == "neon" && neon_available() && neon_table()) return *neon_table();
  if (!want.empty()) return scalar_table();  // unknown or unsupported name
  if (avx2_available() && avx2_table()) return *avx2_table();
  if (neon_available() && neon_table()) return *neon_table();
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = pick();
  return table;
}

}  // namespace dismet::kernels

namespace dismet {

std::size_t worker_count() {
  static const std::size_t cached = [] {
    if (const char* env = std::getenv("DISMETRICS_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v > 256 ? 256 : v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  }();
  return cached;
}

}  // namespace dismet
