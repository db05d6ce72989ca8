#include <cmath>
#include <limits>

#include "tsplab/kernels.hpp"

namespace tsplab::kernels::detail {
namespace {

void distance_row(const double* xs, const double* ys, double x, double y, double* out,
                  std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = x - xs[j];
    const double dy = y - ys[j];
    out[j] = std::sqrt(dx * dx + dy * dy);
  }
}

void exp_shifted_row(const double* d, double shift, double tau, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = std::exp((shift - d[j]) / tau);
}

double sum(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += v[j];
  return s;
}

void scale_row(double* v, double divisor, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) v[j] /= divisor;
}

double min(const double* v, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) m = v[j] < m ? v[j] : m;
  return m;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{Isa::scalar, distance_row, exp_shifted_row, sum, scale_row, min};
  return t;
}

}  // namespace tsplab::kernels::detail
