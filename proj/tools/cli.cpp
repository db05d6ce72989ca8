#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsplab/bench.hpp"
#include "tsplab/errors.hpp"
#include "tsplab/geometry.hpp"
#include "tsplab/heatmap.hpp"
#include "tsplab/io.hpp"
#include "tsplab/kernels.hpp"
#include "tsplab/mcts.hpp"
#include "tsplab/tuner.hpp"

#ifndef TSPLAB_VERSION
#define TSPLAB_VERSION "0.0.0"
#endif

namespace tsplab::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Destination that is either a file or the caller's stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback, bool binary = false) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(
        path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct SearchFlags {
  double alpha = 1.0;
  double beta = 10.0;
  int k = kDefaultCandidates;
  int depth = 10;
  std::optional<double> budget;  // default n / 10
  std::uint64_t seed = 1234;
  std::uint64_t stagnation = 0;
  std::uint64_t max_samples = 0;

  void add_to(CLI::App* app) {
    app->add_option("--alpha", alpha, "exploration weight")->check(CLI::NonNegativeNumber);
    app->add_option("--beta", beta, "weight update rate")->check(CLI::NonNegativeNumber);
    app->add_option("--k", k, "candidate set size")->check(CLI::PositiveNumber);
    app->add_option("--depth", depth, "maximum k of a k-opt action")->check(CLI::Range(2, 1 << 20));
    app->add_option("--budget", budget, "seconds per instance (default n/10)")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "base seed");
    app->add_option("--stagnation", stagnation,
                    "non-improving samples before a restart (0 = 100n)");
    app->add_option("--max-samples", max_samples, "sampling attempts per solve (0 = no cap)");
  }

  MctsParams params(std::size_t n) const {
    MctsParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.candidates = k;
    p.max_depth = depth;
    p.time_budget = budget.value_or(default_time_budget(n));
    p.seed = seed;
    p.stagnation_limit = stagnation;
    p.max_samples = max_samples;
    return p;
  }
};

std::vector<TspInstance> load_instances(const std::string& path,
                                        std::vector<io::InstanceEntry>* entries = nullptr) {
  auto parsed = io::read_instances(path);
  if (parsed.empty()) throw InvalidArgument("'" + path + "' contains no instances");
  std::vector<TspInstance> out;
  out.reserve(parsed.size());
  for (const auto& e : parsed) out.push_back(e.instance);
  if (entries) *entries = std::move(parsed);
  return out;
}

std::string expand_id(std::string pattern, std::size_t id) {
  if (const auto at = pattern.find("{id}"); at != std::string::npos) {
    pattern.replace(at, 4, std::to_string(id));
  }
  return pattern;
}

nlohmann::ordered_json describe_options(const CLI::App* app) {
  nlohmann::ordered_json args = nlohmann::ordered_json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    const std::string key = opt->get_single_name();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1) {
        args[key] = results.front();
      } else {
        args[key] = results;
      }
    } else if (opt->get_default_str() == "{}") {
      args[key] = nlohmann::ordered_json::array();
    } else if (!opt->get_default_str().empty()) {
      args[key] = opt->get_default_str();
    } else {
      args[key] = nullptr;
    }
  }
  return args;
}

void emit_manifest(const CLI::App* sub, const std::string& out_path,
                   const std::string& manifest_path, nlohmann::ordered_json extra,
                   std::ostream& err) {
  nlohmann::ordered_json m;
  m["tool"] = "tsplab";
  m["version"] = TSPLAB_VERSION;
  m["command"] = sub->get_name();
  m["kernel"] = std::string(kernels::name(kernels::active().isa));
  m["args"] = describe_options(sub);
  if (!extra.is_null()) m["resolved"] = std::move(extra);

  std::string target = manifest_path;
  if (target.empty() && !out_path.empty() && out_path != "-") target = out_path + ".manifest.json";
  if (target.empty()) {
    err << "manifest: " << m.dump() << '\n';
    return;
  }
  std::ofstream f(target, std::ios::trunc);
  if (!f) throw IoError("cannot write manifest '" + target + "'");
  f << m.dump(2) << '\n';
}

nlohmann::ordered_json params_json(const MctsParams& p) {
  return {{"alpha", p.alpha},
          {"beta", p.beta},
          {"candidates", p.candidates},
          {"max_depth", p.max_depth},
          {"time_budget", p.time_budget},
          {"seed", p.seed},
          {"stagnation_limit", p.stagnation_limit},
          {"max_samples", p.max_samples}};
}

void write_tour_csv_header(std::ostream& out) {
  out << "instance_id,method,length,elapsed,actions,seed\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tsplab: heatmap-guided MCTS for the Euclidean TSP"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", TSPLAB_VERSION);

  std::string kernel = "auto";
  std::string manifest_path;
  app.add_option("--kernel", kernel, "auto | scalar | avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_option("--manifest", manifest_path, "manifest path (default <out>.manifest.json)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate uniform random instances");
  int gen_n = 0, gen_count = 0;
  std::uint64_t gen_seed = 1234;
  std::string gen_out;
  gen->add_option("--n", gen_n, "points per instance")->required()->check(CLI::Range(2, 1 << 24));
  gen->add_option("--count", gen_count, "number of instances")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "instance file (default stdout)");

  // heatmap
  auto* hm = app.add_subcommand("heatmap", "write a SoftDist or zeros heatmap");
  std::string hm_method = "softdist", hm_in, hm_out, hm_format = "text";
  std::optional<double> hm_tau;
  std::optional<std::size_t> hm_index;
  hm->add_option("--method", hm_method)->check(CLI::IsMember({"softdist", "zeros"}));
  hm->add_option("--tau", hm_tau, "temperature (default: tuned value for n)")
      ->check(CLI::PositiveNumber);
  hm->add_option("--in", hm_in, "instance file")->required();
  hm->add_option("--out", hm_out, "heatmap file; use {id} for multi-instance input")->required();
  hm->add_option("--format", hm_format)->check(CLI::IsMember({"text", "binary"}));
  hm->add_option("--index", hm_index, "only this instance (0-based)");

  // solve
  auto* solve = app.add_subcommand("solve", "run the MCTS search on every instance");
  std::string solve_in, solve_heatmap, solve_method = "softdist", solve_out, solve_tours,
                        solve_trace_out;
  std::optional<double> solve_tau;
  std::vector<double> solve_trace;
  int solve_workers = 1;
  SearchFlags solve_flags;
  solve->add_option("--in", solve_in, "instance file")->required();
  auto* heatmap_opt = solve->add_option("--heatmap", solve_heatmap,
                                        "external heatmap file ({id} expands to the instance id)");
  solve->add_option("--method", solve_method)
      ->check(CLI::IsMember({"softdist", "zeros"}))
      ->excludes(heatmap_opt);
  solve->add_option("--tau", solve_tau, "SoftDist temperature (default: tuned value for n)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--trace", solve_trace, "checkpoint times in seconds, comma separated")
      ->delimiter(',');
  solve->add_option("--trace-out", solve_trace_out, "trace CSV (default stdout)");
  solve->add_option("--workers", solve_workers)->check(CLI::PositiveNumber);
  solve->add_option("--out", solve_out, "results CSV (default stdout)");
  solve->add_option("--tours", solve_tours, "write best tours as an instance file");
  solve_flags.add_to(solve);

  // tune
  auto* tune = app.add_subcommand("tune", "two-stage grid search over the SoftDist temperature");
  std::string tune_in, tune_out;
  std::vector<double> tune_coarse = GridSpec::standard().coarse;
  double tune_step = 0.0001, tune_radius = 0.0010;
  int tune_workers = 1;
  SearchFlags tune_flags;
  tune->add_option("--in", tune_in, "instance file")->required();
  tune->add_option("--coarse", tune_coarse, "coarse temperatures, comma separated")->delimiter(',');
  tune->add_option("--refine-step", tune_step)->check(CLI::PositiveNumber);
  tune->add_option("--refine-radius", tune_radius)->check(CLI::PositiveNumber);
  tune->add_option("--workers", tune_workers)->check(CLI::PositiveNumber);
  tune->add_option("--out", tune_out, "tuning table CSV (default stdout)");
  tune_flags.add_to(tune);

  // bench
  auto* bench = app.add_subcommand("bench", "batch solves with Gap and Score reporting");
  std::string bench_in, bench_refs, bench_lkh, bench_report = "md", bench_out, bench_records;
  std::vector<std::string> bench_specs;
  std::vector<double> bench_trace;
  int bench_workers = 1;
  SearchFlags bench_flags;
  bench->add_option("--in", bench_in, "instance file")->required();
  bench->add_option("--spec", bench_specs,
                    "softdist:<tau> | softdist | zeros | external:<path>; repeatable")
      ->required();
  bench->add_option("--refs", bench_refs,
                    "reference lengths CSV (default: tours in the instance file, else exact "
                    "optimum for n <= 12)");
  bench->add_option("--lkh-refs", bench_lkh, "LKH-3 lengths CSV, enables Score");
  bench->add_option("--workers", bench_workers)->check(CLI::PositiveNumber);
  bench->add_option("--report", bench_report)->check(CLI::IsMember({"csv", "json", "md"}));
  bench->add_option("--out", bench_out, "report (default stdout)");
  bench->add_option("--records", bench_records, "per-instance records CSV");
  bench->add_option("--trace", bench_trace, "checkpoint times in seconds")->delimiter(',');
  bench_flags.add_to(bench);

  // score
  auto* score = app.add_subcommand("score", "Score = Gap_LKH / Gap_MCTS");
  std::vector<double> score_gaps;
  std::string score_refs, score_lengths, score_lkh;
  auto* gaps_opt = score->add_option("--gaps", score_gaps, "gap_lkh,gap_mcts as fractions")
                       ->delimiter(',')
                       ->expected(2);
  auto* refs_opt = score->add_option("--refs", score_refs, "reference lengths CSV")
                       ->excludes(gaps_opt);
  score->add_option("--lengths", score_lengths, "MCTS lengths CSV")->needs(refs_opt);
  score->add_option("--lkh-lengths", score_lkh, "LKH-3 lengths CSV")->needs(refs_opt);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact optimum by enumeration (n <= 12)");
  std::string oracle_in, oracle_out;
  oracle->add_option("--in", oracle_in, "instance file")->required();
  oracle->add_option("--out", oracle_out, "reference lengths CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests are successes that CLI11 reports as exceptions.
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (kernel != "auto") kernels::force(kernels::parse_isa(kernel));

    if (gen->parsed()) {
      const auto instances = generate_instances(gen_n, gen_count, gen_seed);
      Output dst(gen_out, out);
      io::write_instances(dst.stream(), instances);
      emit_manifest(gen, gen_out, manifest_path, nullptr, err);
      return 0;
    }

    if (hm->parsed()) {
      const auto instances = load_instances(hm_in);
      if (hm_index && *hm_index >= instances.size()) {
        throw UsageError("--index " + std::to_string(*hm_index) + " out of range");
      }
      const bool many = !hm_index && instances.size() > 1;
      if (many && hm_out.find("{id}") == std::string::npos) {
        throw UsageError("--out needs an {id} placeholder for multi-instance input");
      }
      const auto format = hm_format == "binary" ? io::HeatmapFormat::binary : io::HeatmapFormat::text;
      nlohmann::ordered_json taus = nlohmann::ordered_json::array();
      for (std::size_t id = 0; id < instances.size(); ++id) {
        if (hm_index && id != *hm_index) continue;
        const auto& inst = instances[id];
        const double tau = hm_tau.value_or(default_tau(inst.size()));
        const Heatmap h = hm_method == "zeros" ? zeros_heatmap(inst.size()) : softdist(inst, tau);
        io::write_heatmap_file(expand_id(hm_out, id), h, format);
        if (hm_method == "softdist") taus.push_back(tau);
      }
      emit_manifest(hm, expand_id(hm_out, hm_index.value_or(0)), manifest_path,
                    {{"tau", taus}}, err);
      return 0;
    }

    if (solve->parsed()) {
      const auto instances = load_instances(solve_in);
      Output dst(solve_out, out);
      write_tour_csv_header(dst.stream());
      std::vector<io::InstanceEntry> best_tours;
      std::vector<RunRecord> all;
      nlohmann::ordered_json resolved = nlohmann::ordered_json::array();
      for (std::size_t id = 0; id < instances.size(); ++id) {
        const auto& inst = instances[id];
        MctsRunSpec spec;
        spec.params = solve_flags.params(inst.size());
        spec.checkpoints = solve_trace;
        if (!solve_heatmap.empty()) {
          spec.method = HeatmapMethod::external;
          spec.heatmap_path = solve_heatmap;
        } else if (solve_method == "zeros") {
          spec.method = HeatmapMethod::zeros;
        } else {
          spec.method = HeatmapMethod::softdist;
          spec.tau = solve_tau.value_or(default_tau(inst.size()));
        }
        const std::size_t ids[] = {id};
        auto records = run_bench(std::span(&inst, 1), spec, 1, ids);
        auto& r = records.front();
        dst.stream() << r.instance_id << ',' << r.method << ',' << io::format_double(r.length)
                     << ',' << io::format_double(r.elapsed) << ',' << r.actions << ',' << r.seed
                     << '\n';
        resolved.push_back({{"instance_id", id}, {"method", r.method}, {"params", params_json(spec.params)}});
        best_tours.push_back({inst, r.tour});
        all.push_back(std::move(r));
      }
      if (!solve_tours.empty()) io::write_instances_file(solve_tours, best_tours);
      if (!solve_trace.empty()) {
        Output tdst(solve_trace_out, out);
        if (!tdst.is_file()) tdst.stream() << '\n';
        tdst.stream() << "instance_id,time,best_length\n";
        for (const auto& r : all) {
          for (const auto& p : r.trace) {
            tdst.stream() << r.instance_id << ',' << io::format_double(p.time) << ','
                          << io::format_double(p.best_length) << '\n';
          }
        }
      }
      emit_manifest(solve, solve_out, manifest_path, resolved, err);
      return 0;
    }

    if (tune->parsed()) {
      const auto instances = load_instances(tune_in);
      GridSpec grid{tune_coarse, tune_radius, tune_step};
      const MctsParams params = tune_flags.params(instances.front().size());
      const TuneResult result = grid_search_tau(instances, params, grid, tune_workers);
      Output dst(tune_out, out);
      dst.stream() << "stage,tau,mean_length,best\n";
      for (const auto& e : result.table) {
        dst.stream() << e.stage << ',' << io::format_double(e.tau) << ','
                     << io::format_double(e.mean_length) << ','
                     << (e.tau == result.best_tau ? 1 : 0) << '\n';
      }
      emit_manifest(tune, tune_out, manifest_path,
                    {{"params", params_json(params)}, {"best_tau", result.best_tau}}, err);
      return 0;
    }

    if (bench->parsed()) {
      std::vector<io::InstanceEntry> entries;
      const auto instances = load_instances(bench_in, &entries);
      const std::size_t n = instances.front().size();

      RefLengths refs;
      std::string ref_source;
      if (!bench_refs.empty()) {
        refs = io::read_ref_lengths(bench_refs);
        ref_source = bench_refs;
      } else if (std::all_of(entries.begin(), entries.end(),
                             [](const auto& e) { return e.reference.has_value(); })) {
        for (std::size_t id = 0; id < entries.size(); ++id) {
          refs[id] = tour_length(entries[id].instance, *entries[id].reference);
        }
        ref_source = "instance-file tours";
      } else if (std::all_of(instances.begin(), instances.end(),
                             [](const auto& i) { return i.size() <= kBruteForceMaxSize; })) {
        for (std::size_t id = 0; id < instances.size(); ++id) {
          refs[id] = brute_force_optimal(instances[id]).second;
        }
        ref_source = "exact enumeration";
      } else {
        throw UsageError("no reference lengths: pass --refs or use instances with tours");
      }
      std::optional<RefLengths> lkh;
      if (!bench_lkh.empty()) lkh = io::read_ref_lengths(bench_lkh);

      const MctsParams params = bench_flags.params(n);
      std::vector<RunRecord> records;
      nlohmann::ordered_json methods = nlohmann::ordered_json::array();
      const auto t0 = std::chrono::steady_clock::now();
      for (const auto& text : bench_specs) {
        MctsRunSpec spec = text == "softdist"
                               ? MctsRunSpec::parse("softdist:" + io::format_double(default_tau(n)),
                                                    params)
                               : MctsRunSpec::parse(text, params);
        spec.checkpoints = bench_trace;
        auto batch = run_bench(instances, spec, bench_workers);
        records.insert(records.end(), batch.begin(), batch.end());
        methods.push_back(spec.label());
      }
      BenchReport report = aggregate(records, refs, lkh ? &*lkh : nullptr);
      report.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      Output dst(bench_out, out);
      io::write_report(dst.stream(), report, io::parse_report_format(bench_report));
      if (!bench_records.empty()) {
        Output rec(bench_records, out);
        io::write_records_csv(rec.stream(), report.records);
      }
      emit_manifest(bench, bench_out, manifest_path,
                    {{"params", params_json(params)}, {"methods", methods},
                     {"references", ref_source}},
                    err);
      return 0;
    }

    if (score->parsed()) {
      double gap_lkh = 0.0, gap_mcts = 0.0;
      if (!score_gaps.empty()) {
        gap_lkh = score_gaps.at(0);
        gap_mcts = score_gaps.at(1);
      } else if (!score_refs.empty() && !score_lengths.empty() && !score_lkh.empty()) {
        const auto refs = io::read_ref_lengths(score_refs);
        const auto mcts = io::read_ref_lengths(score_lengths);
        const auto lkh = io::read_ref_lengths(score_lkh);
        std::vector<double> r, m, l;
        for (const auto& [id, len] : mcts) {
          if (!refs.count(id) || !lkh.count(id)) {
            throw InvalidArgument("instance " + std::to_string(id) +
                                  " lacks a reference or LKH length");
          }
          r.push_back(refs.at(id));
          m.push_back(len);
          l.push_back(lkh.at(id));
        }
        gap_mcts = compute_gap(m, r);
        gap_lkh = compute_gap(l, r);
        out << "gap_mcts " << io::format_percent(gap_mcts, 4) << '\n'
            << "gap_lkh " << io::format_percent(gap_lkh, 4) << '\n';
      } else {
        throw UsageError("score needs --gaps, or --refs with --lengths and --lkh-lengths");
      }
      if (gap_mcts > 0.0) {
        out << io::format_percent(compute_score(gap_lkh, gap_mcts)) << '\n';
      } else {
        out << "\xe2\x89\xa5" "100%\n";
      }
      emit_manifest(score, "", manifest_path, nullptr, err);
      return 0;
    }

    if (oracle->parsed()) {
      const auto instances = load_instances(oracle_in);
      RefLengths refs;
      for (std::size_t id = 0; id < instances.size(); ++id) {
        refs[id] = brute_force_optimal(instances[id]).second;
      }
      Output dst(oracle_out, out);
      io::write_ref_lengths(dst.stream(), refs);
      emit_manifest(oracle, oracle_out, manifest_path, nullptr, err);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace tsplab::cli
