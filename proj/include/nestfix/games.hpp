#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nestfix/bitset.hpp"
#include "nestfix/eqsys.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/universal.hpp"

namespace nestfix {

// ---------------------------------------------------------------------------
// Explicit parity games and the Zielonka oracle.

struct ParityGame {
  enum class Owner : uint8_t { eloise, abelard };
  struct Node {
    Owner owner = Owner::eloise;
    int priority = 0;
    std::vector<int> moves;
    std::string name;
    long long ext_id = -1;  // id from the source file; -1 means "use the index"
  };
  std::vector<Node> nodes;

  long long display_id(int v) const { return nodes[v].ext_id < 0 ? v : nodes[v].ext_id; }

  int size() const { return static_cast<int>(nodes.size()); }
  int max_priority() const {
    int p = 0;
    for (const auto& n : nodes) p = std::max(p, n.priority);
    return p;
  }
  void validate() const {
    for (size_t v = 0; v < nodes.size(); ++v) {
      if (nodes[v].moves.empty())
        throw ValidationError("node " + std::to_string(v) + " has no moves (game must be left-total)");
      for (int w : nodes[v].moves)
        if (w < 0 || w >= size()) throw ValidationError("move target out of range");
      if (nodes[v].priority < 0) throw ValidationError("negative priority");
    }
  }
};

struct GameSolution {
  Bitset win_eloise, win_abelard;
  // History-free Eloise strategy on her winning region; -1 elsewhere.
  std::vector<int> eloise_strategy;
};

namespace detail {

class ZielonkaSolver {
public:
  explicit ZielonkaSolver(const ParityGame& g) : g_(g), strategy_(g.nodes.size(), -1) {}

  GameSolution run() {
    std::vector<char> alive(g_.nodes.size(), 1);
    auto [we, wa] = solve(alive);
    GameSolution sol{Bitset(static_cast<uint32_t>(g_.nodes.size())),
                     Bitset(static_cast<uint32_t>(g_.nodes.size())), std::move(strategy_)};
    for (size_t v = 0; v < g_.nodes.size(); ++v) {
      if (we[v])
        sol.win_eloise.set(static_cast<uint32_t>(v));
      else
        sol.win_abelard.set(static_cast<uint32_t>(v));
    }
    for (size_t v = 0; v < g_.nodes.size(); ++v)
      if (!we[v] || g_.nodes[v].owner != ParityGame::Owner::eloise) sol.eloise_strategy[v] = -1;
    return sol;
  }

private:
  using Set = std::vector<char>;

  bool empty(const Set& s) const { return std::find(s.begin(), s.end(), 1) == s.end(); }

  // Attractor of `targets` for `player` within `alive`; records moves for
  // Eloise nodes when she is the attracting player. Subgames of a left-total
  // game stay left-total under attractor removal.
  Set attractor(const Set& alive, const Set& targets, ParityGame::Owner player) {
    Set set = targets;
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t v = 0; v < g_.nodes.size(); ++v) {
        if (!alive[v] || set[v]) continue;
        const auto& node = g_.nodes[v];
        if (node.owner == player) {
          for (int w : node.moves) {
            if (alive[w] && set[w]) {
              set[v] = 1;
              if (player == ParityGame::Owner::eloise) strategy_[v] = w;
              changed = true;
              break;
            }
          }
        } else {
          bool all = true;
          for (int w : node.moves)
            if (alive[w] && !set[w]) {
              all = false;
              break;
            }
          if (all) {
            set[v] = 1;
            changed = true;
          }
        }
      }
    }
    return set;
  }

  std::pair<Set, Set> solve(const Set& alive) {
    Set we(g_.nodes.size(), 0), wa(g_.nodes.size(), 0);
    if (empty(alive)) return {we, wa};
    int p = -1;
    for (size_t v = 0; v < g_.nodes.size(); ++v)
      if (alive[v]) p = std::max(p, g_.nodes[v].priority);
    auto player = p % 2 == 0 ? ParityGame::Owner::eloise : ParityGame::Owner::abelard;

    Set targets(g_.nodes.size(), 0);
    for (size_t v = 0; v < g_.nodes.size(); ++v)
      if (alive[v] && g_.nodes[v].priority == p) targets[v] = 1;
    Set a = attractor(alive, targets, player);

    Set rest = alive;
    for (size_t v = 0; v < g_.nodes.size(); ++v)
      if (a[v]) rest[v] = 0;
    auto [sub_we, sub_wa] = solve(rest);
    Set& opp_sub = player == ParityGame::Owner::eloise ? sub_wa : sub_we;

    if (empty(opp_sub)) {
      // Player wins all of `alive`: attractor moves on A, any alive move on
      // the priority-p nodes themselves, recursive strategy elsewhere.
      if (player == ParityGame::Owner::eloise) {
        for (size_t v = 0; v < g_.nodes.size(); ++v) {
          if (!alive[v] || !targets[v] || g_.nodes[v].owner != ParityGame::Owner::eloise) continue;
          if (strategy_[v] == -1 || !alive[strategy_[v]]) {
            for (int w : g_.nodes[v].moves)
              if (alive[w]) {
                strategy_[v] = w;
                break;
              }
          }
        }
        return {alive, wa};
      }
      return {we, alive};
    }

    Set b = attractor(alive, opp_sub, player == ParityGame::Owner::eloise ? ParityGame::Owner::abelard
                                                                          : ParityGame::Owner::eloise);
    Set rest2 = alive;
    for (size_t v = 0; v < g_.nodes.size(); ++v)
      if (b[v]) rest2[v] = 0;
    auto [we2, wa2] = solve(rest2);
    if (player == ParityGame::Owner::eloise) {
      // Abelard keeps B plus his part of the second recursion.
      for (size_t v = 0; v < g_.nodes.size(); ++v) {
        if (b[v] || wa2[v]) wa[v] = 1;
        if (we2[v]) we[v] = 1;
      }
    } else {
      for (size_t v = 0; v < g_.nodes.size(); ++v) {
        if (b[v] || we2[v]) we[v] = 1;
        if (wa2[v]) wa[v] = 1;
      }
    }
    return {we, wa};
  }

  const ParityGame& g_;
  std::vector<int> strategy_;
};

}  // namespace detail

// Winning-region partition by Zielonka's recursive algorithm; the parity
// oracle for everything else in the library.
inline GameSolution zielonka_solve(const ParityGame& g) {
  g.validate();
  return detail::ZielonkaSolver(g).run();
}

// ---------------------------------------------------------------------------
// The fixpoint game of an equation system: Eloise claims u <= [[X_i]] at pair
// nodes, Abelard challenges with argument tuples. Node (u,i) has priority
// ad(i); tuples have priority 0. Dead ends get a move to a losing sink.

template <Lattice L>
struct FixpointGame {
  ParityGame game;
  int num_pairs = 0;   // Eloise nodes u*(k+1)+i for u in basis order
  int num_tuples = 0;  // Abelard nodes, mixed-radix over enumerate_all()
  int sink_eloise = -1, sink_abelard = -1;

  int pair_node(int basis_index, int eq_index, int arity) const {
    return basis_index * arity + eq_index;
  }
};

template <Lattice L>
FixpointGame<L> build_fixpoint_game(const EquationSystem<L>& sys, uint64_t cap = 10'000) {
  const L& lat = sys.lattice;
  const auto& basis = lat.basis();
  const int arity = sys.arity();
  auto carrier = lat.enumerate_all(cap);

  double tuples_est = 1;
  for (int i = 0; i < arity; ++i) tuples_est *= static_cast<double>(carrier.size());
  if (tuples_est > static_cast<double>(cap))
    throw SizeLimitError("fixpoint game: |L|^(k+1) = " + std::to_string(tuples_est) +
                         " exceeds cap " + std::to_string(cap));
  const int num_tuples = static_cast<int>(tuples_est);
  const int num_pairs = static_cast<int>(basis.size()) * arity;

  FixpointGame<L> fg;
  fg.num_pairs = num_pairs;
  fg.num_tuples = num_tuples;
  fg.game.nodes.resize(num_pairs + num_tuples);

  std::vector<typename L::Element> tuple(arity, lat.bottom());
  std::vector<int> digits(arity, 0);
  auto ensure_sink = [&](int& sink, int priority) {
    if (sink == -1) {
      sink = fg.game.size();
      ParityGame::Node s;
      s.owner = ParityGame::Owner::abelard;
      s.priority = priority;
      s.moves = {sink};
      s.name = priority % 2 ? "sink_odd" : "sink_even";
      fg.game.nodes.push_back(std::move(s));
    }
  };

  for (int t = 0; t < num_tuples; ++t) {
    for (int j = 0; j < arity; ++j) tuple[j] = carrier[digits[j]];
    // Eloise moves into this tuple.
    for (size_t u = 0; u < basis.size(); ++u) {
      for (int i = 0; i < arity; ++i) {
        if (lat.leq(basis[u], sys.apply(i, tuple)))
          fg.game.nodes[fg.pair_node(static_cast<int>(u), i, arity)].moves.push_back(num_pairs + t);
      }
    }
    // Abelard moves out of it.
    auto& tnode = fg.game.nodes[num_pairs + t];
    tnode.owner = ParityGame::Owner::abelard;
    tnode.priority = 0;
    for (size_t u = 0; u < basis.size(); ++u)
      for (int i = 0; i < arity; ++i)
        if (lat.leq(basis[u], tuple[i])) tnode.moves.push_back(fg.pair_node(static_cast<int>(u), i, arity));
    // Next tuple in mixed radix.
    int j = 0;
    while (j < arity && ++digits[j] == static_cast<int>(carrier.size())) digits[j++] = 0;
  }

  for (size_t u = 0; u < basis.size(); ++u) {
    for (int i = 0; i < arity; ++i) {
      auto& pnode = fg.game.nodes[fg.pair_node(static_cast<int>(u), i, arity)];
      pnode.owner = ParityGame::Owner::eloise;
      pnode.priority = sys.ad[i];
      if (pnode.moves.empty()) {
        ensure_sink(fg.sink_eloise, 1);
        pnode.moves.push_back(fg.sink_eloise);
      }
    }
  }
  for (int t = 0; t < num_tuples; ++t) {
    auto& tnode = fg.game.nodes[num_pairs + t];
    if (tnode.moves.empty()) {
      ensure_sink(fg.sink_abelard, 2);
      tnode.moves.push_back(fg.sink_abelard);
    }
  }
  return fg;
}

// ---------------------------------------------------------------------------
// History-free witnesses: an even labelled graph over (basis element,
// equation index) pairs certifying v <= f_p of the joins of its labelled
// successors.

struct Witness {
  struct Node {
    int basis_index;
    int eq_index;
    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;
  std::vector<LabelledGraph::Edge> edges;  // indices into `nodes`
  int start = 0;
};

struct WitnessCheck {
  bool ok = false;
  std::string diagnostic;
};

template <Lattice L>
WitnessCheck check_witness(const EquationSystem<L>& sys, const Witness& w) {
  const L& lat = sys.lattice;
  const auto& basis = lat.basis();
  const int arity = sys.arity();
  const int d = sys.depth();

  if (w.nodes.empty() || w.start < 0 || w.start >= static_cast<int>(w.nodes.size()))
    return {false, "start node missing from witness"};
  if (w.nodes.size() > basis.size() * static_cast<size_t>(arity))
    return {false, "witness larger than (k+1)*|B_L|"};
  for (const auto& n : w.nodes)
    if (n.basis_index < 0 || n.basis_index >= static_cast<int>(basis.size()) || n.eq_index < 0 ||
        n.eq_index >= arity)
      return {false, "witness node out of range"};
  for (const auto& e : w.edges) {
    if (e.src < 0 || e.src >= static_cast<int>(w.nodes.size()) || e.dst < 0 ||
        e.dst >= static_cast<int>(w.nodes.size()))
      return {false, "witness edge out of range"};
    if (e.label < 0 || e.label > d) return {false, "witness edge label outside [d]"};
  }

  // Local inequality: v <= f_p(U_0,..,U_k) with U_j joined from the
  // label-ad(j) successors.
  for (size_t idx = 0; idx < w.nodes.size(); ++idx) {
    std::vector<typename L::Element> args(arity, lat.bottom());
    for (int j = 0; j < arity; ++j) {
      for (const auto& e : w.edges)
        if (e.src == static_cast<int>(idx) && e.label == sys.ad[j])
          args[j] = lat.join(args[j], basis[w.nodes[e.dst].basis_index]);
    }
    const auto& n = w.nodes[idx];
    if (!lat.leq(basis[n.basis_index], sys.apply(n.eq_index, args)))
      return {false, "local inequality fails at witness node (" + std::to_string(n.basis_index) + "," +
                         std::to_string(n.eq_index) + ")"};
  }

  LabelledGraph g{static_cast<int>(w.nodes.size()), w.edges};
  if (auto odd = find_odd_dominated_cycle(g))
    return {false, "odd-dominated cycle through node " + std::to_string(odd->node) + " at label " +
                       std::to_string(odd->label)};
  return {true, ""};
}

}  // namespace nestfix
