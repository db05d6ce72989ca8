#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsplab/geometry.hpp"
#include "tsplab/mcts.hpp"

namespace tsplab {

/// Two-stage temperature grid: every coarse point, then a fine sweep of
/// +-refine_radius at refine_step around the coarse winner.
struct GridSpec {
  std::vector<double> coarse;
  double refine_radius = 0.0010;
  double refine_step = 0.0001;

  /// 0.0010, 0.0020, ..., 0.0100 with radius 0.0010 and step 0.0001.
  static GridSpec standard();
  /// Throws InvalidArgument unless coarse is nonempty, positive and strictly
  /// increasing and 0 < refine_step < refine_radius.
  void validate() const;
};

struct TuneEntry {
  double tau = 0.0;
  double mean_length = 0.0;
  int stage = 1;
};

struct TuneResult {
  double best_tau = 0.0;
  double best_mean = 0.0;
  std::vector<TuneEntry> table;  // evaluation order
};

/// Mean best length over the instances under softdist(tau). Per-instance
/// seeds come from instance_seed, so the value is independent of worker
/// count and list order.
double evaluate_tau(std::span<const TspInstance> instances, double tau, const MctsParams& params,
                    int workers);

/// Two-stage search of an arbitrary objective. Ties go to the smaller tau.
/// Refine points that coincide with evaluated ones are not re-evaluated.
TuneResult grid_search(const GridSpec& grid, const std::function<double(double)>& objective);

TuneResult grid_search_tau(std::span<const TspInstance> instances, const MctsParams& params,
                           const GridSpec& grid, int workers);

/// Tuned temperatures 0.0066 (n=500), 0.0051 (n=1000), 0.0018 (n=10000),
/// piecewise log-linear in (log n, log tau) between and beyond them.
double default_tau(std::size_t n);

}  // namespace tsplab
