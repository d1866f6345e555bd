#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "nestfix/eqsys.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/games.hpp"
#include "nestfix/universal.hpp"

namespace nestfix {

// ---------------------------------------------------------------------------
// Measures map (basis element, equation index) to tree leaves or the top
// sentinel star. Leaves are stored as ordinal ranks in leaf order, star as
// num_leaves, so comparisons are integer comparisons.

class Measure {
public:
  Measure() = default;
  Measure(int basis_size, int arity, int64_t star)
      : basis_size_(basis_size), arity_(arity), star_(star), val_(size_t(basis_size) * arity, 0) {}

  int64_t& at(int basis_index, int eq_index) { return val_[size_t(basis_index) * arity_ + eq_index]; }
  int64_t at(int basis_index, int eq_index) const { return val_[size_t(basis_index) * arity_ + eq_index]; }
  int64_t star() const { return star_; }
  bool is_star(int basis_index, int eq_index) const { return at(basis_index, eq_index) == star_; }
  int basis_size() const { return basis_size_; }
  int arity() const { return arity_; }
  const std::vector<int64_t>& raw() const { return val_; }

  bool operator==(const Measure&) const = default;

  bool pointwise_leq(const Measure& o) const {
    for (size_t i = 0; i < val_.size(); ++i)
      if (val_[i] > o.val_[i]) return false;
    return true;
  }

private:
  int basis_size_ = 0, arity_ = 0;
  int64_t star_ = 0;
  std::vector<int64_t> val_;
};

struct SolveStats {
  uint64_t lift_calls = 0;  // successful (strictly increasing) node lifts
  uint64_t sweeps = 0;
  uint64_t tree_size = 0;
  uint64_t bound = 0;  // n*(d+1)*|Z|
};

template <Lattice L>
struct SolveResult {
  // E = {(v,p) | mu(v,p) != star}, as (basis index, equation index) pairs.
  std::vector<std::pair<int, int>> members;
  std::vector<typename L::Element> solutions;  // one per equation index
  Measure measure;
  SolveStats stats;
};

enum class SweepOrder { forward, backward, shuffled };

struct LiftOptions {
  SweepOrder order = SweepOrder::forward;
  uint64_t shuffle_seed = 1;
  bool jacobi = false;  // snapshot sweeps merged by pointwise max
};

// Default tree parameters: wide enough for every history-free witness
// ((k+1)*|B_L| nodes), one level per odd label in [d].
template <Lattice L>
std::pair<uint32_t, uint32_t> default_tree_params(const EquationSystem<L>& sys) {
  uint32_t l = std::max<uint32_t>(1, static_cast<uint32_t>(sys.lattice.basis().size()) * sys.arity());
  uint32_t h = std::max<uint32_t>(1, (static_cast<uint32_t>(sys.depth()) + 1) / 2);
  return {l, h};
}

// U_i^{mu,q}: join of the basis elements u whose measure at equation i lies
// below the ad(i)-successor of q; bottom when that successor is undefined.
template <Lattice L>
typename L::Element u_component(const EquationSystem<L>& sys, const LeafTable& table, const Measure& mu,
                                int64_t q_rank, int i) {
  const L& lat = sys.lattice;
  int64_t s = table.succ[sys.ad[i]][static_cast<size_t>(q_rank)];
  auto acc = lat.bottom();
  if (s < 0) return acc;
  const auto& basis = lat.basis();
  for (int u = 0; u < static_cast<int>(basis.size()); ++u)
    if (mu.at(u, i) <= s) acc = lat.join(acc, basis[u]);
  return acc;
}

// Least leaf q (scanning upward from mu(v,p), sound on the ascending Kleene
// sequence) with v <= f_p(U_0^{mu,q},..,U_k^{mu,q}); star when none exists.
template <Lattice L>
int64_t lift_node(const EquationSystem<L>& sys, const LeafTable& table, const Measure& mu, int v, int p) {
  const L& lat = sys.lattice;
  const auto& basis = lat.basis();
  const int arity = sys.arity();
  int64_t start = mu.at(v, p);
  if (start == mu.star()) return mu.star();
  std::vector<typename L::Element> args(arity, lat.bottom());
  for (int64_t q = start; q < static_cast<int64_t>(table.num_leaves); ++q) {
    for (int i = 0; i < arity; ++i) args[i] = u_component(sys, table, mu, q, i);
    if (lat.leq(basis[v], sys.apply(p, args))) return q;
  }
  return mu.star();
}

namespace detail {

template <Lattice L>
SolveResult<L> finish_lift(const EquationSystem<L>& sys, Measure mu, SolveStats stats) {
  SolveResult<L> res;
  const auto& basis = sys.lattice.basis();
  res.solutions.assign(sys.arity(), sys.lattice.bottom());
  for (int u = 0; u < static_cast<int>(basis.size()); ++u)
    for (int i = 0; i < sys.arity(); ++i)
      if (!mu.is_star(u, i)) {
        res.members.emplace_back(u, i);
        res.solutions[i] = sys.lattice.join(res.solutions[i], basis[u]);
      }
  res.measure = std::move(mu);
  res.stats = stats;
  return res;
}

}  // namespace detail

// The lifting algorithm: ascending chaotic iteration of Lift from the minimal
// measure until stabilization. Any fair sweep order reaches the same least
// fixpoint; star entries are absorbing and never re-examined.
template <Lattice L>
SolveResult<L> lift_solve(const EquationSystem<L>& sys, const LeafTable& table, LiftOptions opts = {}) {
  const int n = static_cast<int>(sys.lattice.basis().size());
  const int arity = sys.arity();
  Measure mu(n, arity, static_cast<int64_t>(table.num_leaves));

  SolveStats stats;
  stats.tree_size = table.num_leaves;
  stats.bound = uint64_t(n) * (sys.depth() + 1) * table.num_leaves;

  std::vector<std::pair<int, int>> order;
  order.reserve(size_t(n) * arity);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < arity; ++i) order.emplace_back(u, i);
  if (opts.order == SweepOrder::backward) std::reverse(order.begin(), order.end());
  if (opts.order == SweepOrder::shuffled) {
    std::mt19937_64 rng(opts.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    ++stats.sweeps;
    if (opts.jacobi) {
      Measure snapshot = mu;
      for (auto [v, p] : order) {
        if (snapshot.is_star(v, p)) continue;
        int64_t next = lift_node(sys, table, snapshot, v, p);
        if (next > mu.at(v, p)) {
          mu.at(v, p) = next;
          ++stats.lift_calls;
          changed = true;
        }
      }
    } else {
      for (auto [v, p] : order) {
        if (mu.is_star(v, p)) continue;
        int64_t next = lift_node(sys, table, mu, v, p);
        if (next != mu.at(v, p)) {
          if (next < mu.at(v, p)) throw std::logic_error("lift decreased a measure");
          mu.at(v, p) = next;
          ++stats.lift_calls;
          changed = true;
        }
      }
    }
    if (stats.lift_calls > stats.bound)
      throw std::logic_error("lift increments exceeded the n*(d+1)*|Z| bound");
  }
  return detail::finish_lift(sys, std::move(mu), stats);
}

template <Lattice L, UniversalTree T>
SolveResult<L> lift_solve(const EquationSystem<L>& sys, const T& tree, LiftOptions opts = {}) {
  return lift_solve(sys, compile_tree(tree, sys.depth()), opts);
}

// lift_solve on the default succinct tree.
template <Lattice L>
SolveResult<L> lift_solve(const EquationSystem<L>& sys, LiftOptions opts = {}) {
  auto [l, h] = default_tree_params(sys);
  return lift_solve(sys, SuccinctTree(l, h), opts);
}

// ---------------------------------------------------------------------------
// Chained-product greatest fixpoint over B_L x [k] x Z: the oracle-grade
// single-GFP formulation. Kept dense; refuses above the configured cap.

struct ChainedState {
  int basis_size = 0, arity = 0;
  uint64_t num_leaves = 0;
  std::vector<char> in;  // (u*arity + i)*num_leaves + q

  size_t index(int u, int i, int64_t q) const {
    return (size_t(u) * arity + i) * num_leaves + static_cast<size_t>(q);
  }
  bool contains(int u, int i, int64_t q) const { return in[index(u, i, q)] != 0; }
  uint64_t count() const { return static_cast<uint64_t>(std::count(in.begin(), in.end(), 1)); }

  static ChainedState full(int basis_size, int arity, uint64_t num_leaves) {
    ChainedState s{basis_size, arity, num_leaves, {}};
    s.in.assign(size_t(basis_size) * arity * num_leaves, 1);
    return s;
  }
  bool operator==(const ChainedState&) const = default;
};

// One application of g: keep exactly the triples (v,p,q) with
// v <= f_p(P_0^{U,q},..,P_k^{U,q}).
template <Lattice L>
ChainedState chained_step(const EquationSystem<L>& sys, const LeafTable& table, const ChainedState& u) {
  const L& lat = sys.lattice;
  const auto& basis = lat.basis();
  const int arity = sys.arity();

  // P_i^{U,s} joined once per (i, s).
  std::vector<typename L::Element> joined(size_t(arity) * table.num_leaves, lat.bottom());
  for (int b = 0; b < static_cast<int>(basis.size()); ++b)
    for (int i = 0; i < arity; ++i)
      for (uint64_t s = 0; s < table.num_leaves; ++s)
        if (u.contains(b, i, static_cast<int64_t>(s))) {
          auto& j = joined[size_t(i) * table.num_leaves + s];
          j = lat.join(j, basis[b]);
        }

  ChainedState next{u.basis_size, u.arity, u.num_leaves, std::vector<char>(u.in.size(), 0)};
  std::vector<typename L::Element> args(arity, lat.bottom());
  for (uint64_t q = 0; q < table.num_leaves; ++q) {
    for (int i = 0; i < arity; ++i) {
      int64_t s = table.succ[sys.ad[i]][q];
      args[i] = s < 0 ? lat.bottom() : joined[size_t(i) * table.num_leaves + s];
    }
    for (int p = 0; p < arity; ++p) {
      auto val = sys.apply(p, args);
      for (int b = 0; b < static_cast<int>(basis.size()); ++b)
        if (lat.leq(basis[b], val)) next.in[next.index(b, p, static_cast<int64_t>(q))] = 1;
    }
  }
  return next;
}

template <Lattice L>
struct ChainedResult {
  std::vector<typename L::Element> solutions;
  ChainedState fixpoint;
  SolveStats stats;  // sweeps = number of g-iterations
};

// GFP of g from the full product. Iterations recompute only the rows whose
// P-components changed; membership never returns once lost.
template <Lattice L>
ChainedResult<L> chained_solve(const EquationSystem<L>& sys, const LeafTable& table,
                               uint64_t cap = 1'000'000) {
  const L& lat = sys.lattice;
  const auto& basis = lat.basis();
  const int arity = sys.arity();
  const uint64_t product = uint64_t(basis.size()) * arity * table.num_leaves;
  if (product > cap)
    throw SizeLimitError("chained product |B_L|*(k+1)*|Z| = " + std::to_string(product) +
                         " exceeds cap " + std::to_string(cap));

  ChainedState state = ChainedState::full(static_cast<int>(basis.size()), arity, table.num_leaves);
  SolveStats stats;
  stats.tree_size = table.num_leaves;
  stats.bound = uint64_t(basis.size()) * (sys.depth() + 1) * table.num_leaves;

  std::vector<typename L::Element> joined(size_t(arity) * table.num_leaves, lat.bottom());
  std::vector<char> stale(size_t(arity) * table.num_leaves, 1);

  bool changed = true;
  while (changed) {
    changed = false;
    ++stats.sweeps;
    // Recompute the P-joins and note which (i,s) shrank.
    std::vector<char> next_stale(stale.size(), 0);
    for (int i = 0; i < arity; ++i)
      for (uint64_t s = 0; s < table.num_leaves; ++s) {
        auto j = lat.bottom();
        for (int b = 0; b < static_cast<int>(basis.size()); ++b)
          if (state.contains(b, i, static_cast<int64_t>(s))) j = lat.join(j, basis[b]);
        size_t pos = size_t(i) * table.num_leaves + s;
        if (!(j == joined[pos])) {
          joined[pos] = std::move(j);
          next_stale[pos] = 1;
        }
      }
    std::vector<typename L::Element> args(arity, lat.bottom());
    for (uint64_t q = 0; q < table.num_leaves; ++q) {
      bool affected = false;
      for (int i = 0; i < arity; ++i) {
        int64_t s = table.succ[sys.ad[i]][q];
        if (s >= 0 && (stale[size_t(i) * table.num_leaves + s] || next_stale[size_t(i) * table.num_leaves + s]))
          affected = true;
      }
      if (!affected) continue;
      for (int i = 0; i < arity; ++i) {
        int64_t s = table.succ[sys.ad[i]][q];
        args[i] = s < 0 ? lat.bottom() : joined[size_t(i) * table.num_leaves + s];
      }
      for (int p = 0; p < arity; ++p) {
        auto val = sys.apply(p, args);
        for (int b = 0; b < static_cast<int>(basis.size()); ++b) {
          size_t pos = state.index(b, p, static_cast<int64_t>(q));
          if (state.in[pos] && !lat.leq(basis[b], val)) {
            state.in[pos] = 0;
            changed = true;
          }
        }
      }
    }
    stale = std::move(next_stale);
  }

  ChainedResult<L> res;
  res.solutions.assign(arity, lat.bottom());
  for (int b = 0; b < static_cast<int>(basis.size()); ++b)
    for (int i = 0; i < arity; ++i)
      for (uint64_t q = 0; q < table.num_leaves; ++q)
        if (state.contains(b, i, static_cast<int64_t>(q))) {
          res.solutions[i] = lat.join(res.solutions[i], basis[b]);
          break;
        }
  res.fixpoint = std::move(state);
  res.stats = stats;
  return res;
}

template <Lattice L, UniversalTree T>
ChainedResult<L> chained_solve(const EquationSystem<L>& sys, const T& tree, uint64_t cap = 1'000'000) {
  return chained_solve(sys, compile_tree(tree, sys.depth()), cap);
}

template <Lattice L>
ChainedResult<L> chained_solve(const EquationSystem<L>& sys, uint64_t cap = 1'000'000) {
  auto [l, h] = default_tree_params(sys);
  return chained_solve(sys, SuccinctTree(l, h), cap);
}

// ---------------------------------------------------------------------------
// Witness extraction from a stabilized measure: nodes are E, edges
// ((u,i), ad(j), (w,j)) whenever some s in K_ad(j)(mu(u,i)) lies above
// mu(w,j); restricted to the part reachable from the start pair.

template <Lattice L>
Witness extract_witness(const EquationSystem<L>& sys, const LeafTable& table, const Measure& mu,
                        std::pair<int, int> start) {
  if (mu.is_star(start.first, start.second))
    throw std::invalid_argument("extract_witness: start pair is not in E");
  const int arity = sys.arity();

  std::vector<std::pair<int, int>> members;
  std::vector<int> node_index(size_t(mu.basis_size()) * arity, -1);
  for (int u = 0; u < mu.basis_size(); ++u)
    for (int i = 0; i < arity; ++i)
      if (!mu.is_star(u, i)) members.emplace_back(u, i);

  auto edge_exists = [&](std::pair<int, int> from, std::pair<int, int> to) {
    int64_t s = table.succ[sys.ad[to.second]][static_cast<size_t>(mu.at(from.first, from.second))];
    return s >= 0 && mu.at(to.first, to.second) <= s;
  };

  Witness w;
  std::vector<std::pair<int, int>> queue{start};
  node_index[size_t(start.first) * arity + start.second] = 0;
  w.nodes.push_back({start.first, start.second});
  w.start = 0;
  while (!queue.empty()) {
    auto from = queue.back();
    queue.pop_back();
    int from_idx = node_index[size_t(from.first) * arity + from.second];
    for (const auto& to : members) {
      if (!edge_exists(from, to)) continue;
      int& to_idx = node_index[size_t(to.first) * arity + to.second];
      if (to_idx == -1) {
        to_idx = static_cast<int>(w.nodes.size());
        w.nodes.push_back({to.first, to.second});
        queue.push_back(to);
      }
      w.edges.push_back({from_idx, sys.ad[to.second], to_idx});
    }
  }
  return w;
}

}  // namespace nestfix
