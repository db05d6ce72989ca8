#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsplab/geometry.hpp"

namespace tsplab {

/// n x n nonnegative edge scores with a zero diagonal, row-major.
class Heatmap {
 public:
  /// Throws InvalidArgument on size mismatch, negative or nonfinite entries,
  /// or a nonzero diagonal.
  Heatmap(std::size_t n, std::vector<double> scores);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return s_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {s_.data() + i * n_, n_}; }
  const std::vector<double>& values() const noexcept { return s_; }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  std::size_t n_;
  std::vector<double> s_;
};

/// Per-vertex neighbor lists, best score first.
class CandidateSets {
 public:
  explicit CandidateSets(std::vector<std::vector<Vertex>> lists) : lists_(std::move(lists)) {}

  std::size_t size() const noexcept { return lists_.size(); }
  std::span<const Vertex> operator[](std::size_t v) const noexcept { return lists_[v]; }

 private:
  std::vector<std::vector<Vertex>> lists_;
};

inline constexpr double kZerosHeatmapValue = 1e-10;
inline constexpr int kDefaultCandidates = 5;

/// Row-wise softmax of -d/tau over j != i. Throws InvalidArgument for
/// tau <= 0 and DegenerateTemperature if a row cannot be normalized.
Heatmap softdist(const TspInstance& instance, double tau);

/// Uniform 1e-10 off the diagonal.
Heatmap zeros_heatmap(std::size_t n);

/// Top-min(K, n-1) neighbors by score, ties by ascending index.
CandidateSets candidate_sets(const Heatmap& heatmap, int k);

Heatmap symmetrize(const Heatmap& heatmap);

}  // namespace tsplab
