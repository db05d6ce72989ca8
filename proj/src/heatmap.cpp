#include "tsplab/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsplab/errors.hpp"
#include "tsplab/kernels.hpp"

namespace tsplab {

Heatmap::Heatmap(std::size_t n, std::vector<double> scores) : n_(n), s_(std::move(scores)) {
  if (n_ < 2) throw InvalidArgument("heatmap needs n >= 2");
  if (s_.size() != n_ * n_) {
    throw InvalidArgument("heatmap of size " + std::to_string(n_) + " needs " +
                          std::to_string(n_ * n_) + " entries, got " + std::to_string(s_.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (s_[i * n_ + i] != 0.0) {
      throw InvalidArgument("heatmap diagonal entry " + std::to_string(i) + " is nonzero");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = s_[i * n_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("heatmap entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is negative or nonfinite");
      }
    }
  }
}

Heatmap softdist(const TspInstance& instance, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("temperature must be positive and finite");
  }
  const std::size_t n = instance.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = instance[i].x;
    ys[i] = instance[i].y;
  }

  const auto& k = kernels::active();
  std::vector<double> dist(n);
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k.distance_row(xs.data(), ys.data(), xs[i], ys[i], dist.data(), n);
    // Masking self-distance with +inf drops it from the normalization.
    dist[i] = std::numeric_limits<double>::infinity();
    const double shift = k.min(dist.data(), n);
    double* row = out.data() + i * n;
    k.exp_shifted_row(dist.data(), shift, tau, row, n);
    const double total = k.sum(row, n);
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw DegenerateTemperature("softdist row " + std::to_string(i) +
                                  " cannot be normalized at tau=" + std::to_string(tau));
    }
    k.scale_row(row, total, n);
    row[i] = 0.0;
  }
  return Heatmap(n, std::move(out));
}

Heatmap zeros_heatmap(std::size_t n) {
  if (n < 2) throw InvalidArgument("heatmap needs n >= 2");
  std::vector<double> s(n * n, kZerosHeatmapValue);
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = 0.0;
  return Heatmap(n, std::move(s));
}

CandidateSets candidate_sets(const Heatmap& heatmap, int k) {
  if (k < 1) throw InvalidArgument("candidate count must be positive");
  const std::size_t n = heatmap.size();
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
  std::vector<std::vector<Vertex>> lists(n);
  std::vector<Vertex> others;
  others.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(static_cast<Vertex>(j));
    }
    const auto row = heatmap.row(i);
    auto better = [&](Vertex a, Vertex b) {
      return row[a] != row[b] ? row[a] > row[b] : a < b;
    };
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(keep),
                      others.end(), better);
    lists[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return CandidateSets(std::move(lists));
}

Heatmap symmetrize(const Heatmap& heatmap) {
  const std::size_t n = heatmap.size();
  std::vector<double> s(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s[i * n + j] = (heatmap(i, j) + heatmap(j, i)) / 2.0;
  }
  return Heatmap(n, std::move(s));
}

}  // namespace tsplab
