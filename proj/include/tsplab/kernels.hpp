#pragma once

// Data-parallel row kernels behind the heatmap and engine setup paths.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The variant is picked once at first use from the CPU features; setting
// TSPLAB_KERNEL=scalar|avx2 in the environment or calling force() overrides
// the choice. Variants agree bit for bit on distance_row and scale_row, and to
// within a few ulps on exp_shifted_row and sum.

#include <cstddef>
#include <span>
#include <string_view>

namespace tsplab::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // out[j] = |(x, y) - (xs[j], ys[j])|
  void (*distance_row)(const double* xs, const double* ys, double x, double y, double* out,
                       std::size_t n);
  // out[j] = exp((shift - d[j]) / tau); +inf in d yields 0
  void (*exp_shifted_row)(const double* d, double shift, double tau, double* out,
                          std::size_t n);
  double (*sum)(const double* v, std::size_t n);
  // v[j] /= divisor
  void (*scale_row)(double* v, double divisor, std::size_t n);
  // min over v, +inf for empty input
  double (*min)(const double* v, std::size_t n);
};

bool supported(Isa isa) noexcept;

/// Table for a specific ISA. Throws std::runtime_error when unsupported.
const KernelTable& table(Isa isa);

/// Table currently in effect.
const KernelTable& active() noexcept;

void force(Isa isa);

std::string_view name(Isa isa) noexcept;
/// Throws std::invalid_argument for unknown names.
Isa parse_isa(std::string_view name);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
}  // namespace detail

}  // namespace tsplab::kernels
