#include "tsplab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "tsplab/errors.hpp"
#include "tsplab/io.hpp"
#include "tsplab/parallel.hpp"

namespace tsplab {

void MctsRunSpec::validate() const {
  if (method == HeatmapMethod::softdist) {
    if (!tau || !(*tau > 0.0)) throw InvalidArgument("softdist needs a positive tau");
  } else if (tau) {
    throw InvalidArgument("tau is only meaningful for softdist");
  }
  if (method == HeatmapMethod::external && heatmap_path.empty()) {
    throw InvalidArgument("external method needs a heatmap path");
  }
  params.validate();
}

std::string MctsRunSpec::label() const {
  switch (method) {
    case HeatmapMethod::softdist:
      return "softdist(" + io::format_double(tau.value_or(0.0)) + ")";
    case HeatmapMethod::zeros:
      return "zeros";
    case HeatmapMethod::external:
      return "external(" + heatmap_path + ")";
  }
  return "unknown";
}

MctsRunSpec MctsRunSpec::parse(const std::string& text, const MctsParams& params) {
  MctsRunSpec spec;
  spec.params = params;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "softdist") {
    spec.method = HeatmapMethod::softdist;
    try {
      spec.tau = io::parse_double(rest);
    } catch (const std::invalid_argument&) {
      throw InvalidArgument("bad softdist temperature in '" + text + "'");
    }
  } else if (head == "zeros" && rest.empty()) {
    spec.method = HeatmapMethod::zeros;
  } else if (head == "external") {
    spec.method = HeatmapMethod::external;
    spec.heatmap_path = rest;
  } else {
    throw InvalidArgument("unknown method spec '" + text +
                          "' (softdist:<tau> | zeros | external:<path>)");
  }
  spec.validate();
  return spec;
}

std::uint64_t instance_seed(std::uint64_t base_seed, const TspInstance& instance) noexcept {
  return mix64(base_seed ^ mix64(instance.content_hash()));
}

Heatmap make_heatmap(const MctsRunSpec& spec, const TspInstance& instance,
                     std::size_t instance_id) {
  switch (spec.method) {
    case HeatmapMethod::softdist:
      return softdist(instance, spec.tau.value());
    case HeatmapMethod::zeros:
      return zeros_heatmap(instance.size());
    case HeatmapMethod::external: {
      std::string path = spec.heatmap_path;
      if (const auto at = path.find("{id}"); at != std::string::npos) {
        path.replace(at, 4, std::to_string(instance_id));
      }
      return io::read_heatmap(path);
    }
  }
  throw InvalidArgument("unknown heatmap method");
}

std::vector<RunRecord> run_bench(std::span<const TspInstance> instances,
                                 const MctsRunSpec& spec, int workers,
                                 std::span<const std::size_t> ids) {
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
  if (!ids.empty() && ids.size() != instances.size()) {
    throw InvalidArgument("ids and instances differ in length");
  }
  spec.validate();
  const std::string label = spec.label();
  std::vector<RunRecord> records(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t i) {
    using clock = std::chrono::steady_clock;
    const auto& inst = instances[i];
    const std::size_t id = ids.empty() ? i : ids[i];

    const auto t0 = clock::now();
    const Heatmap heatmap = make_heatmap(spec, inst, id);
    const double heatmap_seconds = std::chrono::duration<double>(clock::now() - t0).count();

    MctsParams params = spec.params;
    params.seed = instance_seed(spec.params.seed, inst);
    TracedSolve solved = solve_with_trace(inst, heatmap, params, spec.checkpoints);

    RunRecord& r = records[i];
    r.instance_id = id;
    r.method = label;
    r.length = solved.result.best_length;
    r.elapsed = solved.result.elapsed;
    r.heatmap_seconds = heatmap_seconds;
    r.seed = params.seed;
    r.actions = solved.result.actions_sampled;
    r.tour = std::move(solved.result.best);
    r.trace = std::move(solved.trace);
  });
  return records;
}

double compute_gap(std::span<const double> lengths, std::span<const double> refs) {
  if (lengths.size() != refs.size()) {
    throw InvalidArgument("gap needs one reference per length (" + std::to_string(lengths.size()) +
                          " vs " + std::to_string(refs.size()) + ")");
  }
  if (lengths.empty()) throw InvalidArgument("gap of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(refs[i] > 0.0)) throw InvalidArgument("reference lengths must be positive");
    total += lengths[i] / refs[i] - 1.0;
  }
  return total / static_cast<double>(lengths.size());
}

double compute_score(double gap_lkh, double gap_mcts) {
  if (!(gap_mcts > 0.0)) {
    throw UndefinedScore("score is undefined when the MCTS gap is not positive");
  }
  return gap_lkh / gap_mcts;
}

BenchReport aggregate(std::span<const RunRecord> records, const RefLengths& refs,
                      const RefLengths* lkh_refs) {
  BenchReport report;
  report.records.assign(records.begin(), records.end());

  auto ref_of = [](const RefLengths& table, std::size_t id, const char* what) {
    const auto it = table.find(id);
    if (it == table.end()) {
      throw InvalidArgument(std::string("no ") + what + " for instance " + std::to_string(id));
    }
    return it->second;
  };

  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  for (const auto& method : order) {
    std::vector<double> lengths, ref, lkh;
    MethodSummary s;
    s.method = method;
    for (const auto& r : records) {
      if (r.method != method) continue;
      lengths.push_back(r.length);
      ref.push_back(ref_of(refs, r.instance_id, "reference length"));
      if (lkh_refs) lkh.push_back(ref_of(*lkh_refs, r.instance_id, "LKH length"));
      s.heatmap_seconds += r.heatmap_seconds;
      s.search_seconds += r.elapsed;
    }
    s.count = lengths.size();
    const double n = static_cast<double>(s.count);
    s.mean_length = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
    s.gap = compute_gap(lengths, ref);
    s.ratio_of_means_gap = s.mean_length / (std::accumulate(ref.begin(), ref.end(), 0.0) / n) - 1.0;
    if (lkh_refs) {
      s.lkh_gap = compute_gap(lkh, ref);
      if (s.gap > 0.0) {
        s.score = compute_score(*s.lkh_gap, s.gap);
      } else {
        s.score_undefined = true;
      }
    }
    report.methods.push_back(std::move(s));
  }
  return report;
}

}  // namespace tsplab
