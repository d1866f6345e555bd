#include <catch2/catch_amalgamated.hpp>

#include "nestfix/lattice.hpp"

using namespace nestfix;

namespace {

Bitset set_of(const PowersetLattice& lat, std::initializer_list<uint32_t> xs) {
  Bitset b(lat.points());
  for (auto x : xs) b.set(x);
  return b;
}

}  // namespace

TEST_CASE("powerset order and joins") {
  PowersetLattice lat(std::vector<std::string>{"x", "y"});
  auto x = set_of(lat, {0}), y = set_of(lat, {1}), xy = set_of(lat, {0, 1});

  CHECK(lat.leq(x, xy));
  CHECK_FALSE(lat.leq(x, y));
  CHECK(lat.join(x, y) == xy);
  CHECK(lat.meet(x, xy) == x);
  CHECK(big_join(lat, std::vector<Bitset>{x, y}) == xy);
  CHECK(big_join(lat, std::vector<Bitset>{}) == lat.bottom());
  CHECK(lat.top() == xy);
}

TEST_CASE("pointwise order and joins") {
  PointwiseLattice lat(2, 3);
  PointwiseLattice::Element f{1, 2}, g{2, 2};
  CHECK(lat.leq(f, g));
  CHECK_FALSE(lat.leq(g, f));
  CHECK(lat.join(PointwiseLattice::Element{1, 0}, PointwiseLattice::Element{0, 2}) ==
        PointwiseLattice::Element{1, 2});
  CHECK(lat.top() == PointwiseLattice::Element{2, 2});
  CHECK(lat.bottom() == PointwiseLattice::Element{0, 0});
}

TEST_CASE("decompose reconstructs via join") {
  PowersetLattice lat(std::vector<std::string>{"x", "y"});
  auto parts = decompose(lat, lat.top());
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == set_of(lat, {0}));
  CHECK(parts[1] == set_of(lat, {1}));
  CHECK(decompose(lat, lat.bottom()).empty());

  PointwiseLattice pw(1, 3);
  PointwiseLattice::Element two{2};
  auto spikes = decompose(pw, two);
  // Oracle: enumerate all basis elements, keep those below, join reconstructs.
  std::vector<PointwiseLattice::Element> expected;
  for (const auto& b : pw.basis())
    if (pw.leq(b, two)) expected.push_back(b);
  CHECK(spikes == expected);
  REQUIRE(spikes.size() == 2);
  CHECK(spikes[0] == PointwiseLattice::Element{1});
  CHECK(spikes[1] == PointwiseLattice::Element{2});
  CHECK(big_join(pw, spikes) == two);
}

TEST_CASE("basis law holds on every element of desk-scale instances") {
  PowersetLattice ps(4);
  for (const auto& l : ps.enumerate_all()) CHECK(big_join(ps, decompose(ps, l)) == l);

  for (uint32_t pts = 1; pts <= 3; ++pts) {
    for (uint32_t n = 2; n <= 4; ++n) {
      PointwiseLattice pw(pts, n);
      CHECK(pw.basis().size() == pts * (n - 1));
      for (const auto& l : pw.enumerate_all()) CHECK(big_join(pw, decompose(pw, l)) == l);
    }
  }
}

TEST_CASE("basis excludes bottom and is deterministic") {
  PointwiseLattice pw(2, 3);
  for (const auto& b : pw.basis()) CHECK_FALSE(b == pw.bottom());
  PointwiseLattice pw2(2, 3);
  CHECK(pw.basis() == pw2.basis());
  // Lexicographic on (point, value): spikes at point 0 first.
  CHECK(pw.basis()[0] == PointwiseLattice::Element{1, 0});
  CHECK(pw.basis()[1] == PointwiseLattice::Element{2, 0});
  CHECK(pw.basis()[2] == PointwiseLattice::Element{0, 1});
}

TEST_CASE("lattice laws on sampled elements") {
  PowersetLattice lat(5);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = lat.sample(rng), b = lat.sample(rng), c = lat.sample(rng);
    CHECK(lat.join(a, b) == lat.join(b, a));
    CHECK(lat.meet(a, b) == lat.meet(b, a));
    CHECK(lat.join(a, lat.join(b, c)) == lat.join(lat.join(a, b), c));
    CHECK(lat.join(a, a) == a);
    CHECK(lat.join(a, lat.meet(a, b)) == a);
    CHECK(lat.meet(a, lat.join(a, b)) == a);
    CHECK(lat.leq(a, b) == (lat.join(a, b) == b));
    CHECK(lat.leq(lat.bottom(), a));
    CHECK(lat.leq(a, lat.top()));
  }
}

TEST_CASE("mismatched universes are a usage error") {
  PowersetLattice small(2), big(3);
  CHECK_THROWS_AS(small.leq(small.top(), big.top()), std::invalid_argument);
}
