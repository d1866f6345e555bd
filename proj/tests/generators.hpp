#pragma once

// Seeded random instance generators shared by the unit suites and the
// acceptance runner. Everything is deterministic in the supplied rng.

#include <algorithm>
#include <random>
#include <vector>

#include "nestfix/encodings.hpp"
#include "nestfix/eqsys.hpp"
#include "nestfix/games.hpp"
#include "nestfix/mucalc.hpp"
#include "nestfix/universal.hpp"

namespace nestfix::gen {

inline ParityGame random_parity_game(std::mt19937_64& rng, int max_nodes, int max_priority) {
  int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_nodes));
  ParityGame g;
  g.nodes.resize(n);
  for (int v = 0; v < n; ++v) {
    auto& node = g.nodes[v];
    node.owner = rng() & 1 ? ParityGame::Owner::eloise : ParityGame::Owner::abelard;
    node.priority = static_cast<int>(rng() % static_cast<uint64_t>(max_priority + 1));
    int degree = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < degree; ++i) node.moves.push_back(static_cast<int>(rng() % n));
    std::sort(node.moves.begin(), node.moves.end());
    node.moves.erase(std::unique(node.moves.begin(), node.moves.end()), node.moves.end());
  }
  return g;
}

inline EnergyGame random_energy_game(std::mt19937_64& rng, int max_nodes, long long max_weight,
                                     int max_priority) {
  EnergyGame g;
  g.game = random_parity_game(rng, max_nodes, max_priority);
  g.weights.resize(g.game.nodes.size());
  for (size_t v = 0; v < g.game.nodes.size(); ++v)
    for (size_t m = 0; m < g.game.nodes[v].moves.size(); ++m)
      g.weights[v].push_back(static_cast<long long>(rng() % (2 * max_weight + 1)) - max_weight);
  return g;
}

// Random monotone rhs: a term over joins, meets, argument projections and
// constants; monotone by construction.
template <Lattice L>
typename EquationSystem<L>::Rhs random_monotone_rhs(const L& lat, int arity, std::mt19937_64& rng,
                                                    int depth = 3) {
  struct Term {
    enum class Kind { constant, arg, join, meet } kind;
    typename L::Element value;
    int arg = 0;
    std::vector<Term> children;
  };
  auto build = [&](auto&& self, int d) -> Term {
    uint64_t pick = rng() % (d == 0 ? 2 : 4);
    switch (pick) {
      case 0: return Term{Term::Kind::constant, lat.sample(rng), 0, {}};
      case 1: return Term{Term::Kind::arg, lat.bottom(), static_cast<int>(rng() % arity), {}};
      case 2: {
        Term t{Term::Kind::join, lat.bottom(), 0, {}};
        t.children.push_back(self(self, d - 1));
        t.children.push_back(self(self, d - 1));
        return t;
      }
      default: {
        Term t{Term::Kind::meet, lat.bottom(), 0, {}};
        t.children.push_back(self(self, d - 1));
        t.children.push_back(self(self, d - 1));
        return t;
      }
    }
  };
  Term root = build(build, depth);
  auto eval = [lat](auto&& self, const Term& t, std::span<const typename L::Element> args) ->
      typename L::Element {
        switch (t.kind) {
          case Term::Kind::constant: return t.value;
          case Term::Kind::arg: return args[static_cast<size_t>(t.arg)];
          case Term::Kind::join: return lat.join(self(self, t.children[0], args), self(self, t.children[1], args));
          default: return lat.meet(self(self, t.children[0], args), self(self, t.children[1], args));
        }
      };
  return [root = std::move(root), eval](std::span<const typename L::Element> args) {
    return eval(eval, root, args);
  };
}

template <Lattice L>
EquationSystem<L> random_monotone_system(L lat, int k, std::mt19937_64& rng) {
  std::vector<Polarity> pol;
  std::vector<typename EquationSystem<L>::Rhs> rhs;
  for (int i = 0; i <= k; ++i) {
    pol.push_back(rng() & 1 ? Polarity::gfp : Polarity::lfp);
    rhs.push_back(random_monotone_rhs(lat, k + 1, rng));
  }
  return make_system(std::move(lat), std::move(pol), std::move(rhs));
}

// Random even labelled graph: sample edges, then delete one edge of each
// odd-dominated cycle until the evenness check passes.
inline LabelledGraph random_even_graph(std::mt19937_64& rng, int max_nodes, int max_label) {
  LabelledGraph g;
  g.num_nodes = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_nodes));
  int edges = static_cast<int>(rng() % static_cast<uint64_t>(2 * g.num_nodes + 2));
  for (int i = 0; i < edges; ++i)
    g.edges.push_back({static_cast<int>(rng() % g.num_nodes),
                       static_cast<int>(rng() % static_cast<uint64_t>(max_label + 1)),
                       static_cast<int>(rng() % g.num_nodes)});
  while (auto odd = find_odd_dominated_cycle(g)) {
    for (size_t i = 0; i < g.edges.size(); ++i) {
      if (g.edges[i].label == odd->label) {
        g.edges.erase(g.edges.begin() + static_cast<long>(i + rng() % (g.edges.size() - i)));
        break;
      }
    }
  }
  return g;
}

// Random clean closed formula whose modalities match the model kind.
inline mucalc::FormulaPtr random_formula(std::mt19937_64& rng, mucalc::Model::Kind kind, int depth,
                                         const std::vector<std::string>& atoms, int& next_var,
                                         std::vector<std::string> scope = {}) {
  using namespace mucalc;
  auto modal = [&]() -> ModalOp {
    switch (kind) {
      case Model::Kind::kripke:
        return rng() & 1 ? ModalOp{ModalOp::Family::diamond, 0, {}, ""}
                         : ModalOp{ModalOp::Family::box, 0, {}, ""};
      case Model::Kind::multigraph:
        return rng() & 1 ? ModalOp{ModalOp::Family::graded_diamond, rng() % 3, {}, ""}
                         : ModalOp{ModalOp::Family::graded_box, rng() % 3, {}, ""};
      default:
        return rng() & 1
                   ? ModalOp{ModalOp::Family::prob_diamond, 0, Rational(1 + (long long)(rng() % 9), 10), ""}
                   : ModalOp{ModalOp::Family::prob_box, 0, Rational(1 + (long long)(rng() % 9), 10), ""};
    }
  };
  uint64_t pick = rng() % (depth == 0 ? 4 : 8);
  switch (pick) {
    case 0: return f_top();
    case 1: return f_bot();
    case 2:
      if (!atoms.empty()) return f_atom(atoms[rng() % atoms.size()]);
      return f_top();
    case 3:
      if (!scope.empty()) return f_var(scope[rng() % scope.size()]);
      return f_bot();
    case 4:
      return f_or(random_formula(rng, kind, depth - 1, atoms, next_var, scope),
                  random_formula(rng, kind, depth - 1, atoms, next_var, scope));
    case 5:
      return f_and(random_formula(rng, kind, depth - 1, atoms, next_var, scope),
                   random_formula(rng, kind, depth - 1, atoms, next_var, scope));
    case 6: return f_modal(modal(), random_formula(rng, kind, depth - 1, atoms, next_var, scope));
    default: {
      std::string var = "X" + std::to_string(next_var++);
      scope.push_back(var);
      auto body = random_formula(rng, kind, depth - 1, atoms, next_var, scope);
      return f_fix(rng() & 1 ? Polarity::gfp : Polarity::lfp, var, body);
    }
  }
}

inline mucalc::FormulaPtr random_formula(std::mt19937_64& rng, mucalc::Model::Kind kind, int depth,
                                         const std::vector<std::string>& atoms) {
  int next_var = 0;
  return random_formula(rng, kind, depth, atoms, next_var);
}

inline mucalc::Model random_model(std::mt19937_64& rng, mucalc::Model::Kind kind, int max_states,
                                  const std::vector<std::string>& atoms) {
  using namespace mucalc;
  Model m;
  m.kind = kind;
  int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_states));
  for (int i = 0; i < n; ++i) m.states.push_back("s" + std::to_string(i));
  m.succ.resize(n);
  m.grades.resize(n);
  m.dist.resize(n);
  for (int x = 0; x < n; ++x) {
    switch (kind) {
      case Model::Kind::kripke:
        for (int y = 0; y < n; ++y)
          if (rng() & 1) m.succ[x].push_back(y);
        break;
      case Model::Kind::multigraph:
        for (int y = 0; y < n; ++y) {
          uint64_t w = rng() % 4;
          if (w == 3 && (rng() % 8) == 0) {
            m.grades[x].emplace_back(y, kInfiniteGrade);
          } else if (w) {
            m.grades[x].emplace_back(y, w);
          }
        }
        break;
      case Model::Kind::markov: {
        // Integer weights normalized to an exact distribution.
        std::vector<long long> w(n, 0);
        long long total = 0;
        for (int y = 0; y < n; ++y) {
          w[y] = static_cast<long long>(rng() % 4);
          total += w[y];
        }
        if (total == 0) {
          w[static_cast<size_t>(rng() % n)] = 1;
          total = 1;
        }
        for (int y = 0; y < n; ++y)
          if (w[y]) m.dist[x].emplace_back(y, Rational(w[y], total));
        break;
      }
    }
  }
  for (const auto& atom : atoms)
    for (int x = 0; x < n; ++x)
      if (rng() & 1) m.labels[atom].push_back(x);
  return m;
}

}  // namespace nestfix::gen
