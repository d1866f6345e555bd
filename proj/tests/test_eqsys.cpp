#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "nestfix/eqsys.hpp"

using namespace nestfix;

namespace {

const PowersetLattice kOnePoint(std::vector<std::string>{"x"});

EquationSystem<PowersetLattice>::Rhs constant(Bitset c) {
  return [c = std::move(c)](std::span<const Bitset>) { return c; };
}

}  // namespace

TEST_CASE("alternation depths follow the mutual recursion") {
  using P = Polarity;
  CHECK(alternation_depths({P::gfp, P::lfp, P::gfp}) == std::vector<int>{0, 1, 2});
  CHECK(alternation_depths({P::gfp, P::gfp, P::gfp, P::gfp}) == std::vector<int>{0, 0, 0, 0});
  // Inner mu, outer nu: the appendix example shape (ad(phi)=1, ad(psi)=2).
  CHECK(alternation_depths({P::lfp, P::gfp}) == std::vector<int>{1, 2});
  CHECK(alternation_depths({P::lfp}) == std::vector<int>{1});
  CHECK(alternation_depths({P::gfp}) == std::vector<int>{0});
}

TEST_CASE("alternation depth invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int k = static_cast<int>(rng() % 5);
    std::vector<Polarity> pol;
    for (int i = 0; i <= k; ++i) pol.push_back(rng() & 1 ? Polarity::gfp : Polarity::lfp);
    auto ad = alternation_depths(pol);
    for (int i = 0; i < k; ++i) CHECK(ad[i] <= ad[i + 1]);
    for (int i = 0; i <= k; ++i) CHECK((ad[i] % 2 == 0) == (pol[i] == Polarity::gfp));
    // ad(k) <= k holds whenever the innermost equation is a GFP; one extra
    // level appears when an LFP sits at the bottom.
    CHECK(ad[k] <= k + (pol[0] == Polarity::lfp ? 1 : 0));
  }
}

TEST_CASE("canonical system shape") {
  auto top = kOnePoint.top();
  auto sys0 = canonical_system(kOnePoint, 0, constant(top));
  CHECK(sys0.arity() == 1);
  CHECK(sys0.polarities == std::vector<Polarity>{Polarity::gfp});
  CHECK(kleene_solve(sys0, 0) == top);

  auto sys2 = canonical_system(kOnePoint, 2, constant(top));
  CHECK(sys2.polarities == std::vector<Polarity>{Polarity::gfp, Polarity::lfp, Polarity::gfp});
  // Chain equations project onto the previous variable.
  std::vector<Bitset> args{kOnePoint.bottom(), kOnePoint.top(), kOnePoint.bottom()};
  CHECK(sys2.apply(1, args) == args[0]);
  CHECK(sys2.apply(2, args) == args[1]);

  CHECK_THROWS_AS(canonical_system(kOnePoint, -1, constant(top)), std::invalid_argument);
}

TEST_CASE("kleene on constants and extremal fixpoints") {
  auto c = kOnePoint.top();
  auto sys = canonical_system(kOnePoint, 0, constant(c));
  CHECK(kleene_solve(sys, 0) == c);

  auto identity = make_system(kOnePoint, {Polarity::lfp}, {projection_rhs<PowersetLattice>(0)});
  CHECK(kleene_solve(identity, 0) == kOnePoint.bottom());
  auto identity_gfp = make_system(kOnePoint, {Polarity::gfp}, {projection_rhs<PowersetLattice>(0)});
  CHECK(kleene_solve(identity_gfp, 0) == kOnePoint.top());
}

TEST_CASE("two cross-referencing equations solve to bottom") {
  // X_0 =_GFP X_1, X_1 =_LFP X_0 over P({x}).
  auto sys = make_system(kOnePoint, {Polarity::gfp, Polarity::lfp},
                         {projection_rhs<PowersetLattice>(1), projection_rhs<PowersetLattice>(0)});
  CHECK(kleene_solve(sys, 1) == kOnePoint.bottom());
  CHECK(kleene_solve(sys, 0) == kOnePoint.bottom());
}

TEST_CASE("canonical k=1 with f0 projecting the top chain variable") {
  auto sys = canonical_system(kOnePoint, 1, projection_rhs<PowersetLattice>(1));
  CHECK(kleene_solve(sys, 1) == kOnePoint.bottom());
}

TEST_CASE("check_monotone") {
  PowersetLattice lat(3);
  auto constant_sys = canonical_system(lat, 1, constant(Bitset::singleton(3, 1)));
  CHECK(check_monotone(constant_sys, 25, 3).ok());

  auto complement = make_system(
      lat, {Polarity::gfp},
      {EquationSystem<PowersetLattice>::Rhs([](std::span<const Bitset> a) { return ~a[0]; })});
  CHECK_FALSE(check_monotone(complement, 50, 3).ok());

  auto unions = make_system(lat, {Polarity::gfp, Polarity::lfp},
                            {EquationSystem<PowersetLattice>::Rhs(
                                 [](std::span<const Bitset> a) { return a[0] | a[1]; }),
                             EquationSystem<PowersetLattice>::Rhs(
                                 [](std::span<const Bitset> a) { return a[0] | a[1]; })});
  CHECK(check_monotone(unions, 50, 3).ok());
}

TEST_CASE("solution vector is a simultaneous fixpoint") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 3));
    int k = static_cast<int>(rng() % 3);
    auto sys = gen::random_monotone_system(lat, k, rng);
    auto sol = kleene_solve_all(sys);
    for (int i = 0; i <= k; ++i) CHECK(sys.apply(i, sol) == sol[i]);
  }
}

TEST_CASE("kleene is idempotent in sigma") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    PowersetLattice lat(1 + static_cast<uint32_t>(rng() % 4));
    int k = static_cast<int>(rng() % 3);
    auto sys = gen::random_monotone_system(lat, k, rng);
    auto sol = kleene_solve_all(sys);

    Valuation<PowersetLattice> full(sys.arity());
    for (int j = 0; j <= k; ++j) full[static_cast<size_t>(j)] = sol[static_cast<size_t>(j)];
    for (int i = 0; i <= k; ++i) CHECK(kleene_solve(sys, i, full) == sol[static_cast<size_t>(i)]);

    Valuation<PowersetLattice> partial(sys.arity());
    for (int j = 0; j <= k; ++j)
      if (rng() & 1) partial[static_cast<size_t>(j)] = sol[static_cast<size_t>(j)];
    for (int i = 0; i <= k; ++i) CHECK(kleene_solve(sys, i, partial) == sol[static_cast<size_t>(i)]);
  }
}

TEST_CASE("free variables are read from sigma") {
  // X_0 =_GFP X_1 with X_1 pinned by sigma.
  auto sys = make_system(kOnePoint, {Polarity::gfp, Polarity::lfp},
                         {projection_rhs<PowersetLattice>(1), projection_rhs<PowersetLattice>(0)});
  Valuation<PowersetLattice> sigma(2);
  sigma[1] = kOnePoint.top();
  CHECK(kleene_solve(sys, 0, sigma) == kOnePoint.top());
  CHECK(kleene_solve(sys, 0) == kOnePoint.bottom());
}
