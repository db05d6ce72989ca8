#include "tsplab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <string>

#include "tsplab/errors.hpp"
#include "tsplab/kernels.hpp"

namespace tsplab {

TspInstance::TspInstance(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InvalidArgument("instance needs at least 2 points, got " +
                          std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw InvalidArgument("point " + std::to_string(i) + " lies outside the unit square");
    }
  }
}

std::uint64_t TspInstance::content_hash() const noexcept {
  std::uint64_t h = mix64(points_.size());
  for (const auto& p : points_) {
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p.x));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p.y));
  }
  return h;
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values)
    : n_(n), d_(std::move(values)) {
  if (d_.size() != n_ * n_) throw InvalidArgument("distance matrix size mismatch");
}

bool is_permutation_of_range(std::span<const Vertex> order) {
  std::vector<char> seen(order.size(), 0);
  for (Vertex v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= order.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Tour::Tour(std::vector<Vertex> order) : order_(std::move(order)) {
  if (!is_permutation_of_range(order_)) {
    throw InvalidArgument("tour is not a permutation of 0.." +
                          std::to_string(static_cast<long long>(order_.size()) - 1));
  }
}

TspInstance generate_instance(int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  Rng rng(seed, index, Purpose::instance);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }
  return TspInstance(std::move(pts));
}

std::vector<TspInstance> generate_instances(int n, int count, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  if (count < 1) throw InvalidArgument("count must be at least 1");
  std::vector<TspInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(generate_instance(n, seed, k));
  return out;
}

DistanceMatrix distance_matrix(const TspInstance& instance) {
  const std::size_t n = instance.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = instance[i].x;
    ys[i] = instance[i].y;
  }
  std::vector<double> d(n * n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    k.distance_row(xs.data(), ys.data(), xs[i], ys[i], d.data() + i * n, n);
  }
  return DistanceMatrix(n, std::move(d));
}

double tour_length(const TspInstance& instance, const Tour& tour) {
  const std::size_t n = instance.size();
  if (tour.size() != n) {
    throw InvalidArgument("tour has " + std::to_string(tour.size()) +
                          " vertices, instance has " + std::to_string(n));
  }
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) len += instance.distance(tour[i], tour[i + 1]);
  return len + instance.distance(tour[n - 1], tour[0]);
}

Tour random_tour(int n, Rng& rng) {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  return Tour(std::move(order));
}

Tour nearest_neighbor_tour(const TspInstance& instance, Vertex start) {
  const auto n = static_cast<Vertex>(instance.size());
  if (start < 0 || start >= n) {
    throw InvalidArgument("start vertex " + std::to_string(start) + " out of range");
  }
  std::vector<char> visited(instance.size(), 0);
  std::vector<Vertex> order;
  order.reserve(instance.size());
  Vertex cur = start;
  visited[cur] = 1;
  order.push_back(cur);
  while (order.size() < instance.size()) {
    Vertex next = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Vertex v = 0; v < n; ++v) {
      if (visited[v]) continue;
      const double d = instance.distance(cur, v);
      if (d < best) {
        best = d;
        next = v;
      }
    }
    visited[next] = 1;
    order.push_back(next);
    cur = next;
  }
  return Tour(std::move(order));
}

Tour two_opt(const TspInstance& instance, Tour tour) {
  const std::size_t n = instance.size();
  if (tour.size() != n) throw InvalidArgument("tour size does not match instance");
  if (n < 4) return tour;

  constexpr double kMinGain = 1e-12;
  std::vector<Vertex> t = tour.order();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 2 < n; ++i) {
      // Edge (t[i], t[i+1]) against every later non-adjacent edge (t[j], t[j+1]).
      // After an improving reversal the scan for this i restarts.
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const Vertex a = t[i], b = t[i + 1];
        const Vertex c = t[j], d = t[(j + 1) % n];
        const double delta = instance.distance(a, c) + instance.distance(b, d) -
                             instance.distance(a, b) - instance.distance(c, d);
        if (delta < -kMinGain) {
          std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       t.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = true;
          j = i + 1;
        }
      }
    }
  }
  return Tour(std::move(t));
}

namespace {

struct BruteForce {
  const TspInstance& inst;
  std::size_t n;
  std::vector<Vertex> order;
  std::vector<char> used;
  std::vector<Vertex> best_order;
  double best = std::numeric_limits<double>::infinity();

  void search(std::size_t depth, double partial) {
    if (partial >= best) return;
    if (depth == n) {
      // Each cycle appears twice (once per direction); keep order[1] < order[n-1].
      if (n > 2 && order[1] > order[n - 1]) return;
      const double total = partial + inst.distance(order[n - 1], order[0]);
      if (total < best) {
        best = total;
        best_order = order;
      }
      return;
    }
    for (Vertex v = 1; v < static_cast<Vertex>(n); ++v) {
      if (used[v]) continue;
      used[v] = 1;
      order[depth] = v;
      search(depth + 1, partial + inst.distance(order[depth - 1], v));
      used[v] = 0;
    }
  }
};

}  // namespace

std::pair<Tour, double> brute_force_optimal(const TspInstance& instance) {
  const std::size_t n = instance.size();
  if (n > kBruteForceMaxSize) {
    throw UnsupportedSize("brute force supports n <= " + std::to_string(kBruteForceMaxSize) +
                          ", got " + std::to_string(n));
  }
  BruteForce bf{instance, n, std::vector<Vertex>(n, 0), std::vector<char>(n, 0), {}};
  bf.used[0] = 1;
  bf.search(1, 0.0);
  Tour best(std::move(bf.best_order));
  const double len = tour_length(instance, best);
  return {std::move(best), len};
}

}  // namespace tsplab
