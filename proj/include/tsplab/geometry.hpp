#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsplab/rng.hpp"

namespace tsplab {

using Vertex = int;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// n >= 2 points in the unit square.
class TspInstance {
 public:
  /// Throws InvalidArgument when n < 2 or a coordinate leaves [0, 1].
  explicit TspInstance(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const noexcept { return points_[i]; }

  double distance(Vertex i, Vertex j) const noexcept {
    const double dx = points_[i].x - points_[j].x;
    const double dy = points_[i].y - points_[j].y;
    return std::sqrt(dx * dx + dy * dy);
  }

  /// Stable 64-bit fingerprint of the coordinate bits.
  std::uint64_t content_hash() const noexcept;

  friend bool operator==(const TspInstance&, const TspInstance&) = default;

 private:
  std::vector<Point> points_;
};

/// Dense symmetric matrix of pairwise Euclidean distances.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {d_.data() + i * n_, n_};
  }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

/// Visiting order over all vertices, 0-based.
class Tour {
 public:
  Tour() = default;
  /// Throws InvalidArgument unless `order` is a permutation of 0..n-1.
  explicit Tour(std::vector<Vertex> order);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<Vertex>& order() const noexcept { return order_; }
  Vertex operator[](std::size_t i) const noexcept { return order_[i]; }

  friend bool operator==(const Tour&, const Tour&) = default;

 private:
  std::vector<Vertex> order_;
};

bool is_permutation_of_range(std::span<const Vertex> order);

/// Instance k is drawn from stream k of `seed`, so prefixes agree across counts.
std::vector<TspInstance> generate_instances(int n, int count, std::uint64_t seed);
TspInstance generate_instance(int n, std::uint64_t seed, std::uint64_t index);

DistanceMatrix distance_matrix(const TspInstance& instance);

/// Closed-cycle length, wrap-around edge included.
double tour_length(const TspInstance& instance, const Tour& tour);

Tour random_tour(int n, Rng& rng);

Tour nearest_neighbor_tour(const TspInstance& instance, Vertex start);

/// First-improvement 2-opt to a local optimum.
Tour two_opt(const TspInstance& instance, Tour tour);

/// Exact optimum by exhaustive depth-first enumeration with vertex 0 fixed
/// first. Throws UnsupportedSize when n > 12.
std::pair<Tour, double> brute_force_optimal(const TspInstance& instance);

inline constexpr std::size_t kBruteForceMaxSize = 12;

}  // namespace tsplab
