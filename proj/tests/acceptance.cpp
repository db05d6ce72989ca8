// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tsplab/bench.hpp"
#include "tsplab/geometry.hpp"
#include "tsplab/heatmap.hpp"
#include "tsplab/io.hpp"
#include "tsplab/kernels.hpp"
#include "tsplab/mcts.hpp"
#include "tsplab/parallel.hpp"
#include "tsplab/tuner.hpp"

namespace {

using namespace tsplab;

constexpr int kWorkers = 8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Trace checks shared by suites 1 and 5 (criterion 6).
struct TraceAudit {
  std::size_t runs = 0;
  std::size_t bad_monotone = 0;
  std::size_t bad_final = 0;
  std::size_t bad_budget = 0;
  double worst_overrun = 0.0;

  void check(const std::vector<TracePoint>& trace, double final_length, double elapsed,
             double budget) {
    ++runs;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i].best_length > trace[i - 1].best_length) {
        ++bad_monotone;
        break;
      }
    }
    if (trace.empty() || trace.back().best_length != final_length) ++bad_final;
    worst_overrun = std::max(worst_overrun, elapsed / budget);
    if (elapsed > 1.05 * budget) ++bad_budget;
  }
};

TraceAudit g_trace_audit;
bool g_suite1_ran = false;
bool g_suite5_ran = false;

Outcome criterion1() {
  const int count = 100;
  std::vector<TspInstance> instances;
  for (int k = 0; k < count; ++k) instances.push_back(generate_instance(5 + k % 6, 20240101, k));

  MctsParams params;
  params.time_budget = 1.0;
  const std::vector<double> checkpoints{0.25, 0.5, 1.0};
  std::vector<double> found(count), optimal(count), elapsed(count);
  std::vector<std::vector<TracePoint>> traces(count);
  parallel_for(count, kWorkers, [&](std::size_t k) {
    const auto& inst = instances[k];
    MctsParams p = params;
    p.seed = instance_seed(params.seed, inst);
    const auto traced = solve_with_trace(inst, softdist(inst, default_tau(inst.size())), p, checkpoints);
    found[k] = traced.result.best_length;
    elapsed[k] = traced.result.elapsed;
    traces[k] = traced.trace;
    optimal[k] = brute_force_optimal(inst).second;
  });
  int matched = 0;
  for (int k = 0; k < count; ++k) {
    if (std::abs(found[k] - optimal[k]) <= 1e-9) ++matched;
    g_trace_audit.check(traces[k], found[k], elapsed[k], params.time_budget);
  }
  g_suite1_ran = true;
  return {matched >= 95, std::to_string(matched) + "/100 instances optimal within 1e-9 (need >= 95)"};
}

Outcome criterion2() {
  int rows = 0, concentrated_rows = 0;
  double worst_sum = 0.0;
  bool diag_ok = true, argmax_ok = true, bound_ok = true;
  for (double tau : {0.001, 0.0066, default_tau(50)}) {
    for (int s = 0; s < 50; ++s) {
      const auto inst = generate_instance(50, 31337, s);
      const Heatmap h = softdist(inst, tau);
      for (Vertex i = 0; i < 50; ++i) {
        ++rows;
        double total = 0.0;
        for (double v : h.row(i)) total += v;
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
        diag_ok = diag_ok && h(i, i) == 0.0;

        std::vector<std::pair<double, Vertex>> by_dist;
        for (Vertex j = 0; j < 50; ++j) {
          if (j != i) by_dist.emplace_back(inst.distance(i, j), j);
        }
        std::sort(by_dist.begin(), by_dist.end());
        const Vertex nn = by_dist[0].second;
        const auto row = h.row(i);
        const auto argmax = static_cast<Vertex>(std::max_element(row.begin(), row.end()) - row.begin());
        if (by_dist[1].first > by_dist[0].first) argmax_ok = argmax_ok && argmax == nn;
        if ((by_dist[1].first - by_dist[0].first) / tau > 40.0) {
          ++concentrated_rows;
          bound_ok = bound_ok && h(i, nn) >= 1.0 - 1e-12;
        }
      }
    }
  }
  const bool pass = worst_sum <= 1e-9 && diag_ok && argmax_ok && bound_ok && concentrated_rows > 0;
  return {pass, std::to_string(rows) + " rows; max |sum-1| " + fmt(worst_sum, 17) + "; diagonal " +
                    (diag_ok ? "ok" : "BAD") + "; argmax " + (argmax_ok ? "ok" : "BAD") +
                    "; bound " + (bound_ok ? "ok" : "BAD") + " on " +
                    std::to_string(concentrated_rows) + " rows"};
}

Outcome criterion3() {
  struct Row {
    const char* method;
    double gap_pct;
    double score_pct;
  };
  // TSP-500 MCTS gaps and scores of the baseline comparison.
  const Row baseline[] = {{"SoftDist", 1.44, 0.84}, {"DIMES", 1.77, 0.68}, {"ATT-GCN", 1.64, 0.74},
                          {"UTSP", 3.41, 0.35},     {"DIFUSCO", 0.51, 2.39}};
  // TSP-500 gaps and scores under the tuned search parameters.
  const Row tuned[] = {{"ATT-GCN", 1.02, 5.38}, {"DIMES", 1.26, 4.35}, {"DIFUSCO", 0.90, 6.12},
                       {"UTSP", 1.09, 5.05},    {"SoftDist", 1.03, 5.32}, {"Zeros", 1.06, 5.20}};

  std::vector<double> implied;
  std::ostringstream detail;
  for (const auto& r : baseline) {
    const double g = implied_reference_gap(r.score_pct / 100.0, r.gap_pct / 100.0) * 100.0;
    // Round trip through the forward metric.
    if (std::abs(compute_score(g / 100.0, r.gap_pct / 100.0) - r.score_pct / 100.0) > 1e-12) {
      return {false, std::string("score inversion does not round-trip for ") + r.method};
    }
    implied.push_back(g);
  }
  const double mean = std::accumulate(implied.begin(), implied.end(), 0.0) / implied.size();
  bool consistent = true;
  for (double g : implied) {
    consistent = consistent && std::abs(g - mean) <= 0.0002 && std::abs(g - 0.0121) <= 0.0002;
  }
  const auto [lo1, hi1] = std::minmax_element(implied.begin(), implied.end());
  detail << "baseline implied LKH gap " << fmt(*lo1) << "%.." << fmt(*hi1) << "% (mean "
         << fmt(mean) << "%)";

  std::vector<double> implied2;
  for (const auto& r : tuned) {
    implied2.push_back(implied_reference_gap(r.score_pct / 100.0, r.gap_pct / 100.0) * 100.0);
  }
  bool in_band = true;
  for (double g : implied2) {
    const double rounded = std::round(g * 1e4) / 1e4;
    in_band = in_band && rounded >= 0.0548 - 1e-12 && rounded <= 0.0551 + 1e-12;
  }
  const auto [lo2, hi2] = std::minmax_element(implied2.begin(), implied2.end());
  detail << "; tuned implied " << fmt(*lo2) << "%.." << fmt(*hi2) << "%";
  return {consistent && in_band, detail.str()};
}

Outcome criterion4() {
  const auto instances = generate_instances(100, 64, 4004);
  MctsParams params;
  params.time_budget = 2.0;
  const GridSpec grid = GridSpec::standard();
  const TuneResult r = grid_search_tau(instances, params, grid, kWorkers);

  double at_low = NAN, at_high = NAN;
  std::ostringstream table;
  for (const auto& e : r.table) {
    if (e.stage != 1) continue;
    if (std::abs(e.tau - grid.coarse.front()) < 1e-12) at_low = e.mean_length;
    if (std::abs(e.tau - grid.coarse.back()) < 1e-12) at_high = e.mean_length;
    table << ' ' << io::format_double(e.tau) << ':' << fmt(e.mean_length, 5);
  }
  const bool interior = r.best_tau > grid.coarse.front() + 1e-12 && r.best_tau < grid.coarse.back() - 1e-12;
  const bool below = r.best_mean < at_low && r.best_mean < at_high;
  std::cout << "  coarse objective:" << table.str() << '\n';
  return {interior && below, "best tau " + io::format_double(r.best_tau) + " mean " +
                                 fmt(r.best_mean, 5) + "; endpoints " + fmt(at_low, 5) + " / " +
                                 fmt(at_high, 5)};
}

Outcome criterion5() {
  const auto instances = generate_instances(200, 32, 5005);
  MctsParams params;
  params.time_budget = 20.0;
  params.seed = 5005;
  const double tau = default_tau(200);
  MctsRunSpec soft;
  soft.method = HeatmapMethod::softdist;
  soft.tau = tau;
  soft.params = params;
  soft.checkpoints = {5.0, 10.0, 20.0};
  MctsRunSpec zeros = soft;
  zeros.method = HeatmapMethod::zeros;
  zeros.tau.reset();

  const auto a = run_bench(instances, soft, kWorkers);
  const auto b = run_bench(instances, zeros, kWorkers);
  double sum_a = 0.0, sum_b = 0.0;
  for (const auto& r : a) {
    sum_a += r.length;
    g_trace_audit.check(r.trace, r.length, r.elapsed, params.time_budget);
  }
  for (const auto& r : b) {
    sum_b += r.length;
    g_trace_audit.check(r.trace, r.length, r.elapsed, params.time_budget);
  }
  g_suite5_ran = true;
  const double ma = sum_a / a.size(), mb = sum_b / b.size();
  return {ma <= 1.002 * mb, "softdist(" + io::format_double(tau) + ") mean " + fmt(ma, 5) +
                                " vs zeros " + fmt(mb, 5) + " (ratio " + fmt(ma / mb, 5) +
                                ", need <= 1.002)"};
}

Outcome criterion6() {
  if (!g_suite1_ran || !g_suite5_ran) return {false, "needs criteria 1 and 5 in the same run"};
  const bool pass = g_trace_audit.bad_monotone == 0 && g_trace_audit.bad_final == 0 &&
                    g_trace_audit.bad_budget == 0;
  return {pass, std::to_string(g_trace_audit.runs) + " traced runs; non-monotone " +
                    std::to_string(g_trace_audit.bad_monotone) + ", final mismatch " +
                    std::to_string(g_trace_audit.bad_final) + ", over budget " +
                    std::to_string(g_trace_audit.bad_budget) + " (worst elapsed/budget " +
                    fmt(g_trace_audit.worst_overrun, 4) + ")"};
}

Outcome criterion7() {
  std::vector<std::string> failures;
  auto near = [&](const char* what, double got, double want) {
    if (std::abs(got - want) > 1e-9) failures.push_back(what);
  };

  // Uniform W of 5 on six vertices.
  const auto inst6 = generate_instance(6, 7007, 0);
  std::vector<double> uniform(36, 0.05);
  for (int i = 0; i < 6; ++i) uniform[i * 6 + i] = 0.0;
  MctsParams p;
  Rng rng(7007);
  MctsState s(inst6, Heatmap(6, uniform), p, rng);
  near("Z at M=0", s.edge_potential(4, 5), 1.0);
  s.record_action(KoptAction{{0, 1, 2, 3, 0}});
  near("Z at M=1, Q=0", s.edge_potential(4, 5), 1.0 + std::sqrt(std::log(2.0)));
  near("Z at M=1, Q=1", s.edge_potential(1, 2), 1.0 + std::sqrt(std::log(2.0) / 2.0));
  near("Z 1.832555", s.edge_potential(4, 5), 1.8325546111576977);
  near("Z 1.588705", s.edge_potential(1, 2), 1.5887050112577374);

  near("increment 0", backprop_increment(10.0, 5.0, 5.0), 0.0);
  near("increment 0.1005017", backprop_increment(10.0, 100.0, 99.0), 0.10050167084168057);
  near("increment 0.6487213", backprop_increment(1.0, 2.0, 1.0), 0.6487212707001282);
  const double w_before = s.weight(1, 3);
  s.backpropagate(100.0, 99.0, KoptAction{{0, 1, 3, 2, 0}});
  near("backpropagate W update", s.weight(1, 3) - w_before, 0.10050167084168057);
  near("backpropagate symmetric", s.weight(3, 1) - w_before, 0.10050167084168057);
  near("backpropagate untouched", s.weight(4, 5), 5.0);

  // Delta identity over sampled actions on random tours.
  int checked = 0;
  double worst = 0.0;
  for (int seed = 0; checked < 1000; ++seed) {
    const int n = 6 + seed % 60;
    const auto inst = generate_instance(n, 7070, seed);
    MctsParams q;
    q.max_depth = 2 + seed % 9;
    q.candidates = 3 + seed % 8;
    Rng r(seed, 7);
    MctsState st(inst, softdist(inst, 0.02 + 0.01 * (seed % 5)), q, r);
    for (int k = 0; k < 4 && checked < 1000; ++k) {
      st.set_current(random_tour(n, r));
      const auto action = st.sample_kopt(r);
      if (!action) continue;
      const Tour before = st.current();
      const Tour after = apply_kopt(inst, before, *action);
      const double delta = tour_length(inst, after) - tour_length(inst, before);
      worst = std::max(worst, std::abs(delta - kopt_delta(inst, *action)));
      ++checked;
    }
  }
  if (worst > 1e-9) failures.push_back("delta identity");
  std::string detail = "edge potential and backprop units ";
  detail += failures.empty() ? "ok" : "FAILED:";
  for (const auto& f : failures) detail += " [" + f + "]";
  detail += "; delta identity over " + std::to_string(checked) + " actions, worst error " +
            fmt(worst, 15);
  return {failures.empty(), detail};
}

Outcome criterion8() {
  const auto instances = generate_instances(60, 24, 8008);
  MctsParams params;
  params.time_budget = 600.0;
  params.max_samples = 4000;
  params.stagnation_limit = 1000;
  MctsRunSpec spec;
  spec.method = HeatmapMethod::softdist;
  spec.tau = 0.01;
  spec.params = params;
  const auto base = run_bench(instances, spec, 1);
  std::size_t mismatches = 0;
  for (int workers : {4, 8}) {
    const auto other = run_bench(instances, spec, workers);
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (std::memcmp(&base[i].length, &other[i].length, sizeof(double)) != 0) ++mismatches;
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "tsplab_acceptance";
  std::filesystem::create_directories(dir);
  bool heatmap_ok = true;
  for (std::size_t i = 0; i < 4; ++i) {
    const Heatmap h = softdist(instances[i], 0.0066);
    const auto path = dir / ("h" + std::to_string(i) + ".bin");
    io::write_heatmap_file(path, h, io::HeatmapFormat::binary);
    const Heatmap back = io::read_heatmap(path);
    heatmap_ok = heatmap_ok && back.size() == h.size() &&
                 std::memcmp(back.values().data(), h.values().data(),
                             h.values().size() * sizeof(double)) == 0;
  }
  std::vector<io::InstanceEntry> entries;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    entries.push_back({instances[i], i % 2 == 0 ? std::optional<Tour>(base[i].tour) : std::nullopt});
  }
  io::write_instances_file(dir / "instances.txt", entries);
  const auto back = io::read_instances(dir / "instances.txt");
  bool instances_ok = back.size() == entries.size();
  for (std::size_t i = 0; instances_ok && i < back.size(); ++i) {
    instances_ok = back[i].instance == entries[i].instance && back[i].reference == entries[i].reference;
  }
  std::filesystem::remove_all(dir);

  return {mismatches == 0 && heatmap_ok && instances_ok,
          std::to_string(base.size()) + " records x workers {1,4,8}: " +
              std::to_string(mismatches) + " length mismatches; binary heatmap round-trip " +
              (heatmap_ok ? "exact" : "BROKEN") + "; instance file round-trip " +
              (instances_ok ? "exact" : "BROKEN")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", criterion1},    {"softdist formula suite", criterion2},
      {"published metric arithmetic", criterion3}, {"tuner shape", criterion4},
      {"heatmap vs zeros", criterion5},      {"anytime traces", criterion6},
      {"engine formula units", criterion7},  {"determinism and round-trips", criterion8}};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  // The trace audit reads what suites 1 and 5 record.
  if (selected.count(6)) selected.insert({1, 5});

  std::cout << "kernel: " << kernels::name(kernels::active().isa) << ", workers: " << kWorkers
            << ", hardware threads: " << std::thread::hardware_concurrency() << std::endl;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
              << "): " << o.detail << " [" << fmt(secs, 1) << "s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
