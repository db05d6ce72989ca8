#include "tsplab/mcts.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>
#include <string>

#include "tsplab/kernels.hpp"

namespace tsplab {
namespace {

constexpr double kMinImprovement = 1e-12;
constexpr double kWeightScale = 100.0;

using Edge = std::pair<Vertex, Vertex>;

Edge normalized(Vertex a, Vertex b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

bool contains_edge(std::span<const Edge> edges, Vertex a, Vertex b) noexcept {
  const Edge e = normalized(a, b);
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

// The current tour with a1's successor edge removed, listed from a1 to the
// free end, as a short run of (possibly reversed) slices of the original
// tour. Each chain step reverses a suffix of the listing, which costs O(#slices)
// instead of O(n).
class SlicedPath {
 public:
  SlicedPath(std::span<const Vertex> order, std::span<const int> pos, Vertex first)
      : order_(order), pos_(pos), n_(static_cast<int>(order.size())) {
    slices_.push_back({pos_[first], n_, -1});
  }

  Vertex at(int index) const noexcept {
    for (const auto& s : slices_) {
      if (index < s.len) return order_[wrap(s.start + s.dir * index)];
      index -= s.len;
    }
    return -1;
  }

  int index_of(Vertex v) const noexcept {
    const int p = pos_[v];
    int prefix = 0;
    for (const auto& s : slices_) {
      const int off = s.dir > 0 ? wrap(p - s.start) : wrap(s.start - p);
      if (off < s.len) return prefix + off;
      prefix += s.len;
    }
    return -1;
  }

  Vertex last() const noexcept { return at(n_ - 1); }
  // The only path neighbor of the free end.
  Vertex before_last() const noexcept { return at(n_ - 2); }
  // The only path neighbor of the fixed end.
  Vertex second() const noexcept { return at(1); }

  // Reverses listing[from, n).
  void reverse_suffix(int from) {
    std::vector<Slice> head;
    std::vector<Slice> tail;
    int prefix = 0;
    for (const auto& s : slices_) {
      if (prefix + s.len <= from) {
        head.push_back(s);
      } else if (prefix >= from) {
        tail.push_back(s);
      } else {
        const int cut = from - prefix;
        head.push_back({s.start, cut, s.dir});
        tail.push_back({wrap(s.start + s.dir * cut), s.len - cut, s.dir});
      }
      prefix += s.len;
    }
    slices_ = std::move(head);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
      slices_.push_back({wrap(it->start + it->dir * (it->len - 1)), it->len, -it->dir});
    }
  }

 private:
  struct Slice {
    int start;  // position in the original order
    int len;
    int dir;    // +1 or -1 through the original order
  };

  int wrap(int p) const noexcept {
    p %= n_;
    return p < 0 ? p + n_ : p;
  }

  std::span<const Vertex> order_;
  std::span<const int> pos_;
  int n_;
  std::vector<Slice> slices_;
};

}  // namespace

void MctsParams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 0");
  if (candidates < 1) throw InvalidArgument("candidate count must be >= 1");
  if (max_depth < 2) throw InvalidArgument("max_depth must be >= 2");
  if (!(time_budget > 0.0) || !std::isfinite(time_budget)) {
    throw InvalidArgument("time budget must be positive");
  }
}

double default_time_budget(std::size_t n) noexcept { return static_cast<double>(n) / 10.0; }

std::vector<std::pair<Vertex, Vertex>> KoptAction::deleted_edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (int i = 0; i < k(); ++i) out.emplace_back(a(i), b(i));
  return out;
}

std::vector<std::pair<Vertex, Vertex>> KoptAction::added_edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (int i = 0; i < k(); ++i) out.emplace_back(b(i), sequence[2 * i + 2]);
  return out;
}

double kopt_delta(const TspInstance& instance, const KoptAction& action) {
  double delta = 0.0;
  for (const auto& [u, v] : action.added_edges()) delta += instance.distance(u, v);
  for (const auto& [u, v] : action.deleted_edges()) delta -= instance.distance(u, v);
  return delta;
}

Tour apply_kopt(const TspInstance& instance, const Tour& tour, const KoptAction& action) {
  const int n = static_cast<int>(instance.size());
  if (static_cast<int>(tour.size()) != n) throw InvalidArgument("tour size mismatch");
  const auto& seq = action.sequence;
  if (seq.size() < 5 || seq.size() % 2 == 0 || seq.front() != seq.back()) {
    throw InvalidAction("action must be (a1, b1, ..., ak, bk, a1) with k >= 2");
  }
  for (Vertex v : seq) {
    if (v < 0 || v >= n) throw InvalidAction("action vertex out of range");
  }

  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[tour[i]] = i;
  auto is_tour_edge = [&](Vertex u, Vertex v) {
    const int d = std::abs(pos[u] - pos[v]);
    return d == 1 || d == n - 1;
  };

  std::vector<Edge> deleted;
  for (const auto& [u, v] : action.deleted_edges()) {
    if (u == v || !is_tour_edge(u, v)) throw InvalidAction("deleted edge is not a tour edge");
    if (contains_edge(deleted, u, v)) throw InvalidAction("edge deleted twice");
    deleted.push_back(normalized(u, v));
  }
  std::vector<Edge> added;
  for (const auto& [u, v] : action.added_edges()) {
    if (u == v) throw InvalidAction("added edge is a self loop");
    if (contains_edge(deleted, u, v)) throw InvalidAction("added edge was deleted");
    if (contains_edge(added, u, v)) throw InvalidAction("edge added twice");
    added.push_back(normalized(u, v));
  }

  // Degree-2 adjacency of the exchanged edge set.
  std::vector<std::array<Vertex, 2>> adj(n, {-1, -1});
  auto link = [&](Vertex u, Vertex v) {
    for (Vertex x : {u, v}) {
      const Vertex y = x == u ? v : u;
      auto& slot = adj[x];
      if (slot[0] < 0) {
        slot[0] = y;
      } else if (slot[1] < 0) {
        slot[1] = y;
      } else {
        throw InvalidAction("vertex " + std::to_string(x) + " would have degree > 2");
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    const Vertex u = tour[i], v = tour[(i + 1) % n];
    if (!contains_edge(deleted, u, v)) link(u, v);
  }
  for (const auto& [u, v] : added) link(u, v);

  std::vector<Vertex> order;
  order.reserve(n);
  const Vertex start = tour[0];
  const Vertex succ = tour[1 % n];
  Vertex prev = start;
  Vertex cur = (adj[start][0] == succ || adj[start][1] == succ) ? succ : adj[start][0];
  if (cur < 0 || adj[start][1] < 0) throw InvalidAction("action leaves a dangling vertex");
  order.push_back(start);
  while (cur != start) {
    if (static_cast<int>(order.size()) >= n || cur < 0) {
      throw InvalidAction("action does not yield a Hamiltonian cycle");
    }
    order.push_back(cur);
    const Vertex next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != n) {
    throw InvalidAction("action splits the tour into subtours");
  }
  return Tour(std::move(order));
}

MctsState::MctsState(const TspInstance& instance, const Heatmap& heatmap,
                     const MctsParams& params, Rng& rng)
    : instance_(&instance),
      params_(params),
      n_(instance.size()),
      candidates_({}) {
  params_.validate();
  if (heatmap.size() != n_) {
    throw InvalidArgument("heatmap is " + std::to_string(heatmap.size()) +
                          "x" + std::to_string(heatmap.size()) + " but instance has " +
                          std::to_string(n_) + " vertices");
  }
  w_.resize(n_ * n_);
  w_row_sum_.resize(n_);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) w_[i * n_ + j] = kWeightScale * heatmap(i, j);
    w_row_sum_[i] = k.sum(w_.data() + i * n_, n_);
  }
  q_.assign(n_ * n_, 0);
  candidates_ = candidate_sets(heatmap, params_.candidates);
  set_current(two_opt(instance, random_tour(static_cast<int>(n_), rng)));
  best_ = current_;
  best_length_ = current_length_;
}

void MctsState::set_current(Tour tour, double length) {
  current_ = std::move(tour);
  current_length_ = length;
  if (best_.size() == 0 || length < best_length_) {
    best_ = current_;
    best_length_ = length;
  }
}

void MctsState::set_current(Tour tour) {
  const double len = tour_length(*instance_, tour);
  set_current(std::move(tour), len);
}

template <class Excluded>
std::optional<Vertex> MctsState::sample_next(Vertex v, Excluded&& excluded, Rng& rng) const {
  scratch_.clear();
  double total = 0.0;
  for (Vertex c : candidates_[v]) {
    if (excluded(c)) continue;
    const double z = edge_potential(v, c);
    scratch_.emplace_back(c, z);
    total += z;
  }
  if (scratch_.empty()) return std::nullopt;
  if (!(total > 0.0)) return scratch_[rng.below(scratch_.size())].first;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (const auto& [c, z] : scratch_) {
    acc += z;
    if (u < acc) return c;
  }
  return scratch_.back().first;
}

Tour MctsState::construct_tour(Rng& rng) const {
  const auto n = static_cast<Vertex>(n_);
  std::vector<char> visited(n_, 0);
  std::vector<Vertex> order;
  order.reserve(n_);
  Vertex cur = static_cast<Vertex>(rng.below(n_));
  visited[cur] = 1;
  order.push_back(cur);
  while (order.size() < n_) {
    auto next = sample_next(cur, [&](Vertex c) { return visited[c] != 0; }, rng);
    if (!next) {
      double best = std::numeric_limits<double>::infinity();
      for (Vertex v = 0; v < n; ++v) {
        if (visited[v]) continue;
        const double d = instance_->distance(cur, v);
        if (d < best) {
          best = d;
          next = v;
        }
      }
    }
    cur = *next;
    visited[cur] = 1;
    order.push_back(cur);
  }
  return Tour(std::move(order));
}

std::optional<KoptAction> MctsState::sample_kopt(Rng& rng) {
  const auto n = static_cast<int>(n_);
  if (n < 4) return std::nullopt;
  const auto& order = current_.order();
  std::vector<int> pos(n_);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  const Vertex a1 = static_cast<Vertex>(rng.below(n_));
  const Vertex b1 = order[(pos[a1] + 1) % n];
  SlicedPath path(order, pos, a1);

  std::vector<Vertex> seq{a1, b1};
  std::vector<Edge> deleted{normalized(a1, b1)};
  std::vector<Edge> added;
  double gain = instance_->distance(a1, b1);

  for (int depth = 1;; ++depth) {
    const Vertex b = seq.back();
    bool can_close = false;
    if (depth >= 2) {
      can_close = b != path.second() && !contains_edge(deleted, b, a1);
      if (can_close && gain - instance_->distance(b, a1) > kMinImprovement) break;
      if (depth >= params_.max_depth) {
        if (can_close) break;
        return std::nullopt;
      }
    }

    const Vertex b_neighbor = path.before_last();
    auto excluded = [&](Vertex c) {
      if (c == a1 || c == b || c == b_neighbor) return true;
      if (contains_edge(deleted, b, c)) return true;
      const Vertex c_next = path.at(path.index_of(c) + 1);
      return contains_edge(added, c, c_next);
    };
    const auto a_next = sample_next(b, excluded, rng);
    if (!a_next) {
      if (can_close) break;
      return std::nullopt;
    }
    const int at = path.index_of(*a_next);
    const Vertex b_next = path.at(at + 1);
    gain += instance_->distance(*a_next, b_next) - instance_->distance(b, *a_next);
    added.push_back(normalized(b, *a_next));
    deleted.push_back(normalized(*a_next, b_next));
    seq.push_back(*a_next);
    seq.push_back(b_next);
    path.reverse_suffix(at + 1);
  }

  seq.push_back(a1);
  KoptAction action{std::move(seq)};
  record_action(action);
  return action;
}

void MctsState::record_action(const KoptAction& action) {
  ++m_;
  for (const auto& [u, v] : action.added_edges()) {
    ++q_[idx(u, v)];
    ++q_[idx(v, u)];
  }
}

void MctsState::backpropagate(double c_old, double c_new, const KoptAction& action) {
  if (!(c_new < c_old)) {
    throw ContractViolation("backpropagate requires an improvement (c_new < c_old)");
  }
  const double inc = backprop_increment(params_.beta, c_old, c_new);
  for (const auto& [u, v] : action.added_edges()) {
    w_[idx(u, v)] += inc;
    w_[idx(v, u)] += inc;
    w_row_sum_[u] += inc;
    w_row_sum_[v] += inc;
  }
}

namespace {

TracedSolve run_search(const TspInstance& instance, const Heatmap& heatmap,
                       const MctsParams& params, std::span<const double> checkpoints) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds_since_start = [&] {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  params.validate();
  if (heatmap.size() != instance.size()) {
    throw InvalidArgument("heatmap size does not match instance");
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > 0.0) || (i > 0 && !(checkpoints[i] > checkpoints[i - 1]))) {
      throw InvalidArgument("checkpoints must be positive and strictly increasing");
    }
  }
  if (!checkpoints.empty() && checkpoints.back() > params.time_budget) {
    throw InvalidArgument("last checkpoint exceeds the time budget");
  }

  Rng rng(params.seed, 0, Purpose::search);
  MctsState state(instance, heatmap, params, rng);
  const std::uint64_t stagnation_limit = state.params().effective_stagnation_limit(state.size());

  TracedSolve out;
  out.result.initial_length = state.best_length();
  out.trace.reserve(checkpoints.size());
  std::size_t next_checkpoint = 0;
  std::uint64_t samples = 0;
  std::uint64_t stagnation = 0;

  for (;;) {
    const double now = seconds_since_start();
    while (next_checkpoint < checkpoints.size() && now >= checkpoints[next_checkpoint]) {
      out.trace.push_back({checkpoints[next_checkpoint], state.best_length()});
      ++next_checkpoint;
    }
    if (now >= params.time_budget) break;
    if (params.max_samples != 0 && samples >= params.max_samples) break;
    ++samples;

    bool improved = false;
    if (auto action = state.sample_kopt(rng)) {
      if (kopt_delta(instance, *action) < -kMinImprovement) {
        Tour next = apply_kopt(instance, state.current(), *action);
        const double c_old = state.current_length();
        const double c_new = tour_length(instance, next);
        if (c_new < c_old) {
          state.backpropagate(c_old, c_new, *action);
          state.set_current(std::move(next), c_new);
          improved = true;
        }
      }
    }
    if (improved) {
      stagnation = 0;
    } else if (++stagnation >= stagnation_limit) {
      state.set_current(two_opt(instance, state.construct_tour(rng)));
      ++out.result.restarts;
      stagnation = 0;
    }
  }
  // Checkpoints not reached (sample cap hit first) see the final best.
  for (; next_checkpoint < checkpoints.size(); ++next_checkpoint) {
    out.trace.push_back({checkpoints[next_checkpoint], state.best_length()});
  }

  out.result.best = state.best();
  out.result.best_length = state.best_length();
  out.result.actions_sampled = state.actions();
  out.result.elapsed = seconds_since_start();
  return out;
}

}  // namespace

SolveResult mcts_solve(const TspInstance& instance, const Heatmap& heatmap,
                       const MctsParams& params) {
  return run_search(instance, heatmap, params, {}).result;
}

TracedSolve solve_with_trace(const TspInstance& instance, const Heatmap& heatmap,
                             const MctsParams& params, std::span<const double> checkpoints) {
  return run_search(instance, heatmap, params, checkpoints);
}

}  // namespace tsplab
