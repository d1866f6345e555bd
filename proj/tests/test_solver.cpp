#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "nestfix/encodings.hpp"
#include "nestfix/solver.hpp"

using namespace nestfix;

namespace {

const PowersetLattice kOnePoint(std::vector<std::string>{"x"});

EquationSystem<PowersetLattice>::Rhs constant(Bitset c) {
  return [c = std::move(c)](std::span<const Bitset>) { return c; };
}

// X_0 =_GFP X_1, X_1 =_LFP X_0 over P({x}); solutions are all bottom.
EquationSystem<PowersetLattice> cross_system() {
  return make_system(kOnePoint, {Polarity::gfp, Polarity::lfp},
                     {projection_rhs<PowersetLattice>(1), projection_rhs<PowersetLattice>(0)});
}

template <Lattice L>
LeafTable table_for(const EquationSystem<L>& sys) {
  auto [l, h] = default_tree_params(sys);
  return compile_tree(SuccinctTree(l, h), sys.depth());
}

Measure uniform_measure(const EquationSystem<PowersetLattice>& sys, const LeafTable& t, int64_t value) {
  Measure mu(static_cast<int>(sys.lattice.basis().size()), sys.arity(), t.star());
  for (int u = 0; u < mu.basis_size(); ++u)
    for (int i = 0; i < mu.arity(); ++i) mu.at(u, i) = value;
  return mu;
}

}  // namespace

TEST_CASE("u_component extremes") {
  auto sys = cross_system();
  auto table = table_for(sys);
  auto star_mu = uniform_measure(sys, table, table.star());
  auto min_mu = uniform_measure(sys, table, 0);

  for (int64_t q = 0; q < static_cast<int64_t>(table.num_leaves); ++q) {
    for (int i = 0; i < sys.arity(); ++i) {
      CHECK(u_component(sys, table, star_mu, q, i) == kOnePoint.bottom());
      auto expected = table.succ[sys.ad[i]][static_cast<size_t>(q)] < 0 ? kOnePoint.bottom()
                                                                        : kOnePoint.top();
      CHECK(u_component(sys, table, min_mu, q, i) == expected);
    }
  }
}

TEST_CASE("lift_node on constant functions") {
  auto top_sys = canonical_system(kOnePoint, 1, constant(kOnePoint.top()));
  auto table = table_for(top_sys);
  auto mu = uniform_measure(top_sys, table, 0);
  // f_0 constant top: the minimal leaf already works.
  CHECK(lift_node(top_sys, table, mu, 0, 0) == 0);

  auto bot_sys = canonical_system(kOnePoint, 1, constant(kOnePoint.bottom()));
  auto table2 = table_for(bot_sys);
  auto mu2 = uniform_measure(bot_sys, table2, 0);
  CHECK(lift_node(bot_sys, table2, mu2, 0, 0) == table2.star());
}

TEST_CASE("lift_solve on the trivial GFP") {
  PowersetLattice lat(std::vector<std::string>{"x", "y"});
  auto sys = canonical_system(lat, 0, constant(lat.top()));
  auto res = lift_solve(sys);
  CHECK(res.solutions[0] == lat.top());
  REQUIRE(res.members.size() == 2);
  CHECK(res.members[0] == std::pair{0, 0});
  CHECK(res.members[1] == std::pair{1, 0});
}

TEST_CASE("lift_solve drives unfounded claims to star") {
  auto sys = cross_system();
  auto res = lift_solve(sys);
  CHECK(res.members.empty());
  CHECK(res.solutions[0] == kOnePoint.bottom());
  CHECK(res.solutions[1] == kOnePoint.bottom());
  CHECK(res.measure.is_star(0, 0));
  CHECK(res.measure.is_star(0, 1));
}

TEST_CASE("chained_step examples") {
  auto sys = cross_system();
  auto table = table_for(sys);
  // Empty state stays empty under strict functions (projections).
  ChainedState empty{1, sys.arity(), table.num_leaves,
                     std::vector<char>(sys.arity() * table.num_leaves, 0)};
  CHECK(chained_step(sys, table, empty) == empty);

  auto top_sys = canonical_system(kOnePoint, 1, constant(kOnePoint.top()));
  auto top_table = table_for(top_sys);
  auto full = ChainedState::full(1, top_sys.arity(), top_table.num_leaves);
  auto stepped = chained_step(top_sys, top_table, full);
  // f_0 is constant top, but the chain equation X_1 = X_0 can lose triples
  // where K_{ad(1)} is empty.
  for (uint64_t q = 0; q < top_table.num_leaves; ++q) {
    CHECK(stepped.contains(0, 0, static_cast<int64_t>(q)));
    bool expect = top_table.succ[top_sys.ad[1]][q] >= 0;
    CHECK(stepped.contains(0, 1, static_cast<int64_t>(q)) == expect);
  }
}

TEST_CASE("chained_solve agrees with lift_solve and kleene on fixed instances") {
  auto top_sys = canonical_system(kOnePoint, 0, constant(kOnePoint.top()));
  auto chained = chained_solve(top_sys);
  CHECK(chained.solutions[0] == kOnePoint.top());
  // Full product is the fixpoint for the constant-top k=0 system.
  CHECK(chained.fixpoint.count() == chained.fixpoint.in.size());

  auto sys = cross_system();
  auto res = chained_solve(sys);
  CHECK(res.solutions[0] == kOnePoint.bottom());
  CHECK(res.solutions[1] == kOnePoint.bottom());
  CHECK(res.fixpoint.count() == 0);
}

TEST_CASE("chained cap refuses oversized products") {
  auto sys = cross_system();
  CHECK_THROWS_AS(chained_solve(sys, uint64_t{1}), SizeLimitError);
}

TEST_CASE("four-way agreement on random systems") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 3));
    int k = static_cast<int>(rng() % 3);
    auto sys = gen::random_monotone_system(lat, k, rng);
    auto kleene = kleene_solve_all(sys);
    auto lifted = lift_solve(sys);
    auto chained = chained_solve(sys);
    for (int i = 0; i <= k; ++i) {
      CHECK(lifted.solutions[static_cast<size_t>(i)] == kleene[static_cast<size_t>(i)]);
      CHECK(chained.solutions[static_cast<size_t>(i)] == kleene[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("theorem-main set equality between kleene decomposition and chained fixpoint") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 3));
    int k = static_cast<int>(rng() % 3);
    auto sys = gen::random_monotone_system(lat, k, rng);
    auto [l, h] = default_tree_params(sys);
    auto table = compile_tree(SuccinctTree(l, h), sys.depth());
    auto chained = chained_solve(sys, table);
    auto kleene = kleene_solve_all(sys);
    for (int i = 0; i <= k; ++i) {
      for (size_t u = 0; u < lat.basis().size(); ++u) {
        bool in_kleene = lat.leq(lat.basis()[u], kleene[static_cast<size_t>(i)]);
        bool in_chained = false;
        for (uint64_t q = 0; q < table.num_leaves && !in_chained; ++q)
          in_chained = chained.fixpoint.contains(static_cast<int>(u), i, static_cast<int64_t>(q));
        CHECK(in_kleene == in_chained);
      }
    }
  }
}

TEST_CASE("sweep order does not change the least fixpoint") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 3));
    auto sys = gen::random_monotone_system(lat, static_cast<int>(rng() % 3), rng);
    auto forward = lift_solve(sys, LiftOptions{SweepOrder::forward, 1, false});
    auto backward = lift_solve(sys, LiftOptions{SweepOrder::backward, 1, false});
    auto shuffled = lift_solve(sys, LiftOptions{SweepOrder::shuffled, rng(), false});
    auto jacobi = lift_solve(sys, LiftOptions{SweepOrder::forward, 1, true});
    CHECK(forward.measure == backward.measure);
    CHECK(forward.measure == shuffled.measure);
    CHECK(forward.measure == jacobi.measure);
  }
}

TEST_CASE("lift operator is monotone in the measure") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 2));
    auto sys = gen::random_monotone_system(lat, static_cast<int>(rng() % 2), rng);
    auto table = table_for(sys);
    int n = static_cast<int>(lat.basis().size());
    Measure lo(n, sys.arity(), table.star()), hi(n, sys.arity(), table.star());
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < sys.arity(); ++i) {
        lo.at(u, i) = static_cast<int64_t>(rng() % (table.num_leaves + 1));
        hi.at(u, i) = lo.at(u, i) + static_cast<int64_t>(rng() % (table.num_leaves + 1 -
                                                                  static_cast<uint64_t>(lo.at(u, i))));
      }
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < sys.arity(); ++i) {
        if (lo.is_star(u, i)) continue;
        int64_t a = lift_node(sys, table, lo, u, i);
        int64_t b = hi.is_star(u, i) ? hi.star() : lift_node(sys, table, hi, u, i);
        CHECK(a <= b);
      }
  }
}

TEST_CASE("lifting on random parity games matches zielonka") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = gen::random_parity_game(rng, 6, 4);
    auto sys = parity_system(g);
    auto res = lift_solve(sys);
    auto oracle = zielonka_solve(g);
    CHECK(res.solutions.back() == oracle.win_eloise);
    CHECK(res.stats.lift_calls <= res.stats.bound);
  }
}

TEST_CASE("extracted witnesses pass check_witness; odd mutations fail") {
  std::mt19937_64 rng(59);
  int mutations_checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto g = gen::random_parity_game(rng, 6, 4);
    auto sys = parity_system(g);
    auto [l, h] = default_tree_params(sys);
    auto table = compile_tree(SuccinctTree(l, h), sys.depth());
    auto res = lift_solve(sys, table);
    for (auto [u, i] : res.members) {
      auto w = extract_witness(sys, table, res.measure, {u, i});
      auto check = check_witness(sys, w);
      INFO(check.diagnostic);
      CHECK(check.ok);
      CHECK(w.nodes.size() <= sys.lattice.basis().size() * static_cast<size_t>(sys.arity()));

      // Relabel one even edge on a cycle to the next odd label.
      if (mutations_checked < 25) {
        LabelledGraph graph{static_cast<int>(w.nodes.size()), w.edges};
        for (size_t e = 0; e < w.edges.size(); ++e) {
          int a = w.edges[e].label;
          if (a % 2 != 0 || a + 1 > sys.depth()) continue;
          LabelledGraph probe = graph;
          probe.edges[e].label = a + 1;
          auto cyc = find_odd_dominated_cycle(probe);
          if (!cyc || cyc->label != a + 1) continue;
          Witness bad = w;
          bad.edges[e].label = a + 1;
          CHECK_FALSE(check_witness(sys, bad).ok);
          ++mutations_checked;
          break;
        }
      }
    }
  }
  CHECK(mutations_checked > 0);
}

TEST_CASE("extract_witness rejects starts outside E") {
  auto sys = cross_system();
  auto table = table_for(sys);
  auto res = lift_solve(sys, table);
  CHECK_THROWS_AS(extract_witness(sys, table, res.measure, {0, 0}), std::invalid_argument);
}

TEST_CASE("stats carry the tree size and the paper bound") {
  auto g = gen::random_parity_game;
  (void)g;
  PowersetLattice lat(2);
  auto sys = canonical_system(lat, 2, constant(lat.top()));
  auto [l, h] = default_tree_params(sys);
  SuccinctTree tree(l, h);
  auto res = lift_solve(sys, tree);
  CHECK(res.stats.tree_size == tree.size());
  CHECK(res.stats.bound == lat.basis().size() * static_cast<uint64_t>(sys.depth() + 1) * tree.size());
  CHECK(res.stats.sweeps >= 1);
}
