#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsplab/geometry.hpp"
#include "tsplab/heatmap.hpp"
#include "tsplab/mcts.hpp"

namespace tsplab {

enum class HeatmapMethod { softdist, zeros, external };

/// How one batch of solves obtains its heatmaps, plus the search settings.
struct MctsRunSpec {
  HeatmapMethod method = HeatmapMethod::softdist;
  std::optional<double> tau;  // set iff method == softdist
  // external: heatmap file; "{id}" is replaced by the instance id
  std::string heatmap_path;
  MctsParams params;
  std::vector<double> checkpoints;  // optional anytime trace per record

  void validate() const;
  /// "softdist(0.0066)", "zeros", "external(path)".
  std::string label() const;

  /// Parses "softdist:<tau>", "zeros" or "external:<path>".
  static MctsRunSpec parse(const std::string& text, const MctsParams& params);
};

struct RunRecord {
  std::size_t instance_id = 0;
  std::string method;
  double length = 0.0;
  double elapsed = 0.0;          // search seconds
  double heatmap_seconds = 0.0;  // heatmap generation or load
  std::uint64_t seed = 0;
  std::uint64_t actions = 0;
  Tour tour;  // best tour found
  std::vector<TracePoint> trace;
};

/// Seed of one instance's solve: a function of the base seed and the
/// instance coordinates only, so results do not depend on list order or on
/// which worker runs the instance.
std::uint64_t instance_seed(std::uint64_t base_seed, const TspInstance& instance) noexcept;

/// Heatmap for one instance under `spec`.
Heatmap make_heatmap(const MctsRunSpec& spec, const TspInstance& instance,
                     std::size_t instance_id);

/// One record per instance, in input order. `ids` defaults to 0..count-1.
std::vector<RunRecord> run_bench(std::span<const TspInstance> instances,
                                 const MctsRunSpec& spec, int workers,
                                 std::span<const std::size_t> ids = {});

using RefLengths = std::map<std::size_t, double>;

/// Mean over instances of length / ref - 1.
double compute_gap(std::span<const double> lengths, std::span<const double> refs);

/// gap_lkh / gap_mcts. Throws UndefinedScore when gap_mcts <= 0.
double compute_score(double gap_lkh, double gap_mcts);

/// LKH gap implied by a published score and MCTS gap.
inline double implied_reference_gap(double score, double gap_mcts) noexcept {
  return score * gap_mcts;
}

struct MethodSummary {
  std::string method;
  std::size_t count = 0;
  double mean_length = 0.0;
  double gap = 0.0;                 // mean of per-instance gaps
  double ratio_of_means_gap = 0.0;  // mean length / mean ref - 1
  double heatmap_seconds = 0.0;     // summed over records
  double search_seconds = 0.0;      // summed over records
  std::optional<double> lkh_gap;
  std::optional<double> score;
  bool score_undefined = false;     // lkh refs given but MCTS gap <= 0
};

struct BenchReport {
  std::vector<MethodSummary> methods;  // in first-appearance order
  std::vector<RunRecord> records;
  double wall_seconds = 0.0;
};

/// Throws InvalidArgument when a record's instance id is missing from refs
/// (or from lkh_refs when given).
BenchReport aggregate(std::span<const RunRecord> records, const RefLengths& refs,
                      const RefLengths* lkh_refs = nullptr);

}  // namespace tsplab
