#include "tsplab/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsplab/bench.hpp"
#include "tsplab/errors.hpp"

namespace tsplab {
namespace {

// Grid points are snapped to this resolution so 0.0061 built as
// 0.0070 - 9 * 0.0001 compares equal to a literal 0.0061.
double snap(double tau) { return std::round(tau * 1e12) / 1e12; }

bool same_tau(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

GridSpec GridSpec::standard() {
  GridSpec g;
  for (int i = 1; i <= 10; ++i) g.coarse.push_back(snap(0.001 * i));
  return g;
}

void GridSpec::validate() const {
  if (coarse.empty()) throw InvalidArgument("coarse grid is empty");
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (!(coarse[i] > 0.0)) throw InvalidArgument("grid temperatures must be positive");
    if (i > 0 && !(coarse[i] > coarse[i - 1])) {
      throw InvalidArgument("coarse grid must be strictly increasing");
    }
  }
  if (!(refine_step > 0.0) || !(refine_step < refine_radius)) {
    throw InvalidArgument("need 0 < refine_step < refine_radius");
  }
}

double evaluate_tau(std::span<const TspInstance> instances, double tau, const MctsParams& params,
                    int workers) {
  if (instances.empty()) throw InvalidArgument("evaluate_tau needs at least one instance");
  MctsRunSpec spec;
  spec.method = HeatmapMethod::softdist;
  spec.tau = tau;
  spec.params = params;
  const auto records = run_bench(instances, spec, workers);
  // Summing in sorted order makes the mean bitwise independent of list order.
  std::vector<double> lengths;
  lengths.reserve(records.size());
  for (const auto& r : records) lengths.push_back(r.length);
  std::sort(lengths.begin(), lengths.end());
  return std::accumulate(lengths.begin(), lengths.end(), 0.0) /
         static_cast<double>(lengths.size());
}

TuneResult grid_search(const GridSpec& grid, const std::function<double(double)>& objective) {
  grid.validate();
  TuneResult result;
  auto better = [](const TuneEntry& a, const TuneEntry& b) {
    return a.mean_length < b.mean_length || (a.mean_length == b.mean_length && a.tau < b.tau);
  };
  auto best_entry = [&] {
    TuneEntry best = result.table.front();
    for (const auto& e : result.table) {
      if (better(e, best)) best = e;
    }
    return best;
  };

  for (double tau : grid.coarse) result.table.push_back({tau, objective(tau), 1});
  const double centre = best_entry().tau;

  const auto steps = static_cast<long>(std::floor(grid.refine_radius / grid.refine_step + 1e-9));
  for (long i = -steps; i <= steps; ++i) {
    const double tau = snap(centre + static_cast<double>(i) * grid.refine_step);
    if (!(tau > 0.0)) continue;
    bool seen = false;
    for (const auto& e : result.table) seen = seen || same_tau(e.tau, tau);
    if (seen) continue;
    result.table.push_back({tau, objective(tau), 2});
  }

  const TuneEntry best = best_entry();
  result.best_tau = best.tau;
  result.best_mean = best.mean_length;
  return result;
}

TuneResult grid_search_tau(std::span<const TspInstance> instances, const MctsParams& params,
                           const GridSpec& grid, int workers) {
  if (instances.empty()) throw InvalidArgument("grid search needs at least one instance");
  return grid_search(grid, [&](double tau) { return evaluate_tau(instances, tau, params, workers); });
}

double default_tau(std::size_t n) {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  struct Anchor {
    double n, tau;
  };
  static constexpr Anchor kAnchors[] = {{500, 0.0066}, {1000, 0.0051}, {10000, 0.0018}};
  for (const auto& a : kAnchors) {
    if (static_cast<double>(n) == a.n) return a.tau;
  }
  const Anchor& lo = static_cast<double>(n) <= kAnchors[1].n ? kAnchors[0] : kAnchors[1];
  const Anchor& hi = static_cast<double>(n) <= kAnchors[1].n ? kAnchors[1] : kAnchors[2];
  const double t = (std::log(static_cast<double>(n)) - std::log(lo.n)) /
                   (std::log(hi.n) - std::log(lo.n));
  return std::exp(std::log(lo.tau) + t * (std::log(hi.tau) - std::log(lo.tau)));
}

}  // namespace tsplab
