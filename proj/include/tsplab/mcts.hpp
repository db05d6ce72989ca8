#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "tsplab/errors.hpp"
#include "tsplab/geometry.hpp"
#include "tsplab/heatmap.hpp"
#include "tsplab/rng.hpp"

namespace tsplab {

struct MctsParams {
  double alpha = 1.0;   // exploration weight
  double beta = 10.0;   // weight update rate
  int candidates = kDefaultCandidates;
  int max_depth = 10;   // largest k in a k-opt action
  double time_budget = 1.0;  // wall-clock seconds, initialization included
  std::uint64_t seed = 1234;
  // Consecutive non-improving samples before the current tour is rebuilt.
  // 0 selects 100 * n.
  std::uint64_t stagnation_limit = 0;
  // Stop after this many sampling attempts, 0 for no cap. With a cap that
  // binds before the time budget, a solve is a pure function of its inputs.
  std::uint64_t max_samples = 0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
  std::uint64_t effective_stagnation_limit(std::size_t n) const noexcept {
    return stagnation_limit != 0 ? stagnation_limit : 100 * static_cast<std::uint64_t>(n);
  }

  friend bool operator==(const MctsParams&, const MctsParams&) = default;
};

/// n / 10 seconds per instance.
double default_time_budget(std::size_t n) noexcept;

/// Vertex decision sequence (a1, b1, a2, b2, ..., ak, bk, a1): edges (ai, bi)
/// are deleted and edges (bi, a(i+1)) are added.
struct KoptAction {
  std::vector<Vertex> sequence;

  int k() const noexcept { return static_cast<int>(sequence.size() / 2); }
  Vertex a(int i) const noexcept { return sequence[2 * i]; }
  Vertex b(int i) const noexcept { return sequence[2 * i + 1]; }

  std::vector<std::pair<Vertex, Vertex>> deleted_edges() const;
  std::vector<std::pair<Vertex, Vertex>> added_edges() const;

  friend bool operator==(const KoptAction&, const KoptAction&) = default;
};

/// Sum of added edge lengths minus sum of deleted edge lengths.
double kopt_delta(const TspInstance& instance, const KoptAction& action);

/// Rebuilds the tour after the exchange. Throws InvalidAction when the
/// action is malformed or does not leave a single Hamiltonian cycle.
Tour apply_kopt(const TspInstance& instance, const Tour& tour, const KoptAction& action);

/// W increment for an improvement from c_old to c_new.
inline double backprop_increment(double beta, double c_old, double c_new) noexcept {
  return beta * (std::exp((c_old - c_new) / c_old) - 1.0);
}

/// Search state of one heatmap-guided run. Holds a reference to the instance,
/// which must outlive it. Not thread safe; one state per run.
class MctsState {
 public:
  /// W = 100 * H, Q = 0, M = 0, current = best = two_opt(random tour).
  /// Throws InvalidArgument when the heatmap size differs from the instance.
  MctsState(const TspInstance& instance, const Heatmap& heatmap, const MctsParams& params,
            Rng& rng);

  std::size_t size() const noexcept { return n_; }
  const TspInstance& instance() const noexcept { return *instance_; }
  const MctsParams& params() const noexcept { return params_; }
  const CandidateSets& candidates() const noexcept { return candidates_; }

  double weight(Vertex i, Vertex j) const noexcept { return w_[idx(i, j)]; }
  std::uint32_t visits(Vertex i, Vertex j) const noexcept { return q_[idx(i, j)]; }
  std::uint64_t actions() const noexcept { return m_; }

  const Tour& current() const noexcept { return current_; }
  double current_length() const noexcept { return current_length_; }
  const Tour& best() const noexcept { return best_; }
  double best_length() const noexcept { return best_length_; }

  /// Mean weight of the edges incident to i.
  double omega(Vertex i) const noexcept {
    return w_row_sum_[i] / static_cast<double>(n_ - 1);
  }

  /// W/omega plus the alpha-scaled exploration bonus. The first term is taken
  /// as 0 for a vertex whose weights are all zero.
  double edge_potential(Vertex i, Vertex j) const noexcept {
    const double om = omega(i);
    const double exploit = om > 0.0 ? w_[idx(i, j)] / om : 0.0;
    const double explore =
        params_.alpha * std::sqrt(std::log(static_cast<double>(m_) + 1.0) /
                                  (static_cast<double>(q_[idx(i, j)]) + 1.0));
    return exploit + explore;
  }

  /// Next-vertex distribution over the candidates of v not matched by
  /// `excluded`. All-zero potentials give a uniform distribution. Throws
  /// NoCandidate when nothing is allowed.
  template <class Excluded>
  std::vector<std::pair<Vertex, double>> transition_probs(Vertex v, Excluded&& excluded) const {
    std::vector<std::pair<Vertex, double>> out;
    double total = 0.0;
    for (Vertex c : candidates_[v]) {
      if (excluded(c)) continue;
      const double z = edge_potential(v, c);
      out.emplace_back(c, z);
      total += z;
    }
    if (out.empty()) throw NoCandidate("no allowed candidate for vertex " + std::to_string(v));
    for (auto& [c, p] : out) p = total > 0.0 ? p / total : 1.0 / static_cast<double>(out.size());
    return out;
  }

  /// Chain-rule tour sampling from a uniform start; falls back to the nearest
  /// unvisited vertex when every candidate has been visited.
  Tour construct_tour(Rng& rng) const;

  /// Samples one k-opt action against the current tour and records it in M
  /// and Q. Returns nullopt, leaving M and Q untouched, when no feasible
  /// action was found.
  std::optional<KoptAction> sample_kopt(Rng& rng);

  /// M += 1 and Q += 1 (both directions) on every added edge of the action.
  void record_action(const KoptAction& action);

  /// Raises W on every added edge. Requires c_new < c_old.
  void backpropagate(double c_old, double c_new, const KoptAction& action);

  /// Replaces the current tour and updates best when it improves.
  void set_current(Tour tour, double length);
  void set_current(Tour tour);

 private:
  std::size_t idx(Vertex i, Vertex j) const noexcept {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }

  template <class Excluded>
  std::optional<Vertex> sample_next(Vertex v, Excluded&& excluded, Rng& rng) const;

  const TspInstance* instance_;
  MctsParams params_;
  std::size_t n_;
  std::vector<double> w_;
  std::vector<double> w_row_sum_;
  std::vector<std::uint32_t> q_;
  std::uint64_t m_ = 0;
  CandidateSets candidates_;
  Tour current_;
  double current_length_ = 0.0;
  Tour best_;
  double best_length_ = 0.0;
  mutable std::vector<std::pair<Vertex, double>> scratch_;
};

struct SolveResult {
  Tour best;
  double best_length = 0.0;
  std::uint64_t actions_sampled = 0;
  double elapsed = 0.0;  // seconds
  double initial_length = 0.0;
  std::uint64_t restarts = 0;
};

struct TracePoint {
  double time = 0.0;
  double best_length = 0.0;
};

struct TracedSolve {
  SolveResult result;
  std::vector<TracePoint> trace;
};

/// Anytime search until the time budget (or sample cap) is spent.
SolveResult mcts_solve(const TspInstance& instance, const Heatmap& heatmap,
                       const MctsParams& params);

/// mcts_solve that also samples the best length at each checkpoint (seconds
/// since start). Checkpoints must be strictly increasing, positive and no
/// later than the budget.
TracedSolve solve_with_trace(const TspInstance& instance, const Heatmap& heatmap,
                             const MctsParams& params, std::span<const double> checkpoints);

}  // namespace tsplab
