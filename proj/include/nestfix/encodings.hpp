#pragma once

#include <cstdlib>
#include <set>
#include <vector>

#include "nestfix/eqsys.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/games.hpp"
#include "nestfix/rational.hpp"

namespace nestfix {

// ---------------------------------------------------------------------------
// Standard parity games as canonical systems over P(V).

// f_exists(V_0,..,V_k): Eloise nodes that can reach V_{Omega(v)} in one move,
// plus Abelard nodes that cannot avoid it.
inline EquationSystem<PowersetLattice>::Rhs parity_rhs(const ParityGame& g) {
  return [g](std::span<const Bitset> args) {
    Bitset out(static_cast<uint32_t>(g.nodes.size()));
    for (size_t v = 0; v < g.nodes.size(); ++v) {
      const auto& node = g.nodes[v];
      const Bitset& target = args[static_cast<size_t>(node.priority)];
      bool in;
      if (node.owner == ParityGame::Owner::eloise) {
        in = false;
        for (int w : node.moves)
          if (target.test(static_cast<uint32_t>(w))) {
            in = true;
            break;
          }
      } else {
        in = true;
        for (int w : node.moves)
          if (!target.test(static_cast<uint32_t>(w))) {
            in = false;
            break;
          }
      }
      if (in) out.set(static_cast<uint32_t>(v));
    }
    return out;
  };
}

inline EquationSystem<PowersetLattice> parity_system(const ParityGame& g) {
  g.validate();
  std::vector<std::string> names;
  names.reserve(g.nodes.size());
  for (size_t v = 0; v < g.nodes.size(); ++v)
    names.push_back(g.nodes[v].name.empty() ? std::to_string(v) : g.nodes[v].name);
  return canonical_system(PowersetLattice(std::move(names)), g.max_priority(), parity_rhs(g));
}

// ---------------------------------------------------------------------------
// Energy parity games over the lattice PointwiseLattice(V, b+2).
//
// Lattice elements store headroom b+1-c rather than the credit c itself, so
// that lattice top is "credit 0 everywhere" and the canonical GFP yields the
// minimal-credit solution; energy_credits() decodes.

struct EnergyGame {
  ParityGame game;
  std::vector<std::vector<long long>> weights;  // parallel to game.nodes[v].moves

  void validate() const {
    game.validate();
    if (weights.size() != game.nodes.size()) throw ValidationError("energy: weight rows mismatch nodes");
    for (size_t v = 0; v < weights.size(); ++v)
      if (weights[v].size() != game.nodes[v].moves.size())
        throw ValidationError("energy: weight row length mismatch at node " + std::to_string(v));
  }
  long long max_abs_weight() const {
    long long w = 0;
    for (const auto& row : weights)
      for (long long x : row) w = std::max(w, std::llabs(x));
    return w;
  }
  int distinct_priorities() const {
    std::set<int> ps;
    for (const auto& n : game.nodes) ps.insert(n.priority);
    return static_cast<int>(ps.size());
  }
  // b = n * (#distinct priorities) * W, a sufficient credit accumulation bound.
  long long credit_bound() const {
    return static_cast<long long>(game.nodes.size()) * distinct_priorities() * max_abs_weight();
  }
};

// en(v, sigma): successor credit requirements, clamped at 0; b+1 stands in
// for any overflow, and overflowed successors (sigma(u) > b) propagate it.
inline std::set<long long> en(const EnergyGame& g, int v, const std::vector<long long>& sigma,
                              long long b) {
  std::set<long long> out;
  const auto& moves = g.game.nodes[v].moves;
  for (size_t m = 0; m < moves.size(); ++m) {
    long long su = sigma[static_cast<size_t>(moves[m])];
    long long need = std::max(0ll, su - g.weights[v][m]);
    if (su > b || need > b)
      out.insert(b + 1);
    else
      out.insert(need);
  }
  return out;
}

// f_energy: per node the min (Eloise) or max (Abelard) of en over the
// argument for its priority, in headroom encoding.
inline EquationSystem<PointwiseLattice>::Rhs energy_rhs(const EnergyGame& g) {
  const long long b = g.credit_bound();
  return [g, b](std::span<const std::vector<uint32_t>> args) {
    const size_t n = g.game.nodes.size();
    std::vector<uint32_t> out(n);
    std::vector<long long> credit(n);
    for (size_t v = 0; v < n; ++v) {
      const auto& arg = args[static_cast<size_t>(g.game.nodes[v].priority)];
      for (size_t u = 0; u < n; ++u) credit[u] = b + 1 - arg[u];
      auto costs = en(g, static_cast<int>(v), credit, b);
      long long c = g.game.nodes[v].owner == ParityGame::Owner::eloise ? *costs.begin() : *costs.rbegin();
      out[v] = static_cast<uint32_t>(b + 1 - c);
    }
    return out;
  };
}

inline EquationSystem<PointwiseLattice> energy_system(const EnergyGame& g) {
  g.validate();
  long long b = g.credit_bound();
  return canonical_system(PointwiseLattice(static_cast<uint32_t>(g.game.nodes.size()),
                                           static_cast<uint32_t>(b + 2)),
                          g.game.max_priority(), energy_rhs(g));
}

// Minimal sufficient initial credits; b+1 means Eloise loses the node.
inline std::vector<long long> energy_credits(const EnergyGame& g,
                                             const PointwiseLattice::Element& solution) {
  long long b = g.credit_bound();
  std::vector<long long> out(solution.size());
  for (size_t v = 0; v < solution.size(); ++v) out[v] = b + 1 - solution[v];
  return out;
}

// ---------------------------------------------------------------------------
// Probabilistic parity games: Eloise picks move sets whose joint probability
// beats the node threshold. Exact rationals throughout.

struct ProbabilisticGame {
  struct Node {
    int priority = 0;
    Rational threshold;                        // sigma(v) in [0,1]
    std::vector<std::pair<int, Rational>> moves;  // successor, probability
    std::string name;
    long long ext_id = -1;
  };
  std::vector<Node> nodes;

  long long display_id(int v) const { return nodes[v].ext_id < 0 ? v : nodes[v].ext_id; }

  int max_priority() const {
    int p = 0;
    for (const auto& n : nodes) p = std::max(p, n.priority);
    return p;
  }
  void validate() const {
    for (size_t v = 0; v < nodes.size(); ++v) {
      Rational sum(0);
      for (const auto& [w, pr] : nodes[v].moves) {
        if (w < 0 || w >= static_cast<int>(nodes.size())) throw ValidationError("prob: move out of range");
        if (pr < Rational(0)) throw ValidationError("prob: negative probability");
        sum += pr;
      }
      if (sum != Rational(1))
        throw ValidationError("prob: distribution at node " + std::to_string(v) + " sums to " +
                              sum.to_string() + ", not 1");
      if (nodes[v].threshold < Rational(0) || nodes[v].threshold > Rational(1))
        throw ValidationError("prob: threshold outside [0,1]");
      if (nodes[v].priority < 0) throw ValidationError("prob: negative priority");
    }
  }
};

// f_{exists p}(V_0,..,V_k) = {v | sum of D(v) over V_{Omega(v)} > sigma(v)}.
inline EquationSystem<PowersetLattice>::Rhs prob_rhs(const ProbabilisticGame& g) {
  return [g](std::span<const Bitset> args) {
    Bitset out(static_cast<uint32_t>(g.nodes.size()));
    for (size_t v = 0; v < g.nodes.size(); ++v) {
      const Bitset& target = args[static_cast<size_t>(g.nodes[v].priority)];
      Rational mass(0);
      for (const auto& [w, pr] : g.nodes[v].moves)
        if (target.test(static_cast<uint32_t>(w))) mass += pr;
      if (mass > g.nodes[v].threshold) out.set(static_cast<uint32_t>(v));
    }
    return out;
  };
}

inline EquationSystem<PowersetLattice> prob_system(const ProbabilisticGame& g) {
  g.validate();
  std::vector<std::string> names;
  names.reserve(g.nodes.size());
  for (size_t v = 0; v < g.nodes.size(); ++v)
    names.push_back(g.nodes[v].name.empty() ? std::to_string(v) : g.nodes[v].name);
  return canonical_system(PowersetLattice(std::move(names)), g.max_priority(), prob_rhs(g));
}

}  // namespace nestfix
