#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tsplab/kernels.hpp"

namespace tsplab::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("TSPLAB_KERNEL"); env != nullptr && *env != '\0') {
    return &table(parse_isa(env));
  }
  if (supported(Isa::avx2)) return detail::avx2_table();
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{initial_table()};
  return ptr;
}

}  // namespace

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return detail::avx2_table() != nullptr && cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::runtime_error("kernel set '" + std::string(name(isa)) +
                             "' is not available on this machine");
  }
  return isa == Isa::avx2 ? *detail::avx2_table() : detail::scalar_table();
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void force(Isa isa) { current().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa parse_isa(std::string_view s) {
  if (s == "scalar") return Isa::scalar;
  if (s == "avx2") return Isa::avx2;
  throw std::invalid_argument("unknown kernel set '" + std::string(s) + "'");
}

}  // namespace tsplab::kernels
