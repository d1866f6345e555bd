#pragma once

#include <concepts>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestfix/bitset.hpp"

namespace nestfix {

// A finite lattice with a distinguished basis (bottom excluded). Elements are
// immutable values with structural equality; every operation is pure.
template <typename L>
concept Lattice =
    std::copyable<L> && requires(const L& lat, const typename L::Element& a,
                                 const typename L::Element& b, std::mt19937_64& rng) {
      typename L::Element;
      { lat.leq(a, b) } -> std::same_as<bool>;
      { lat.join(a, b) } -> std::same_as<typename L::Element>;
      { lat.meet(a, b) } -> std::same_as<typename L::Element>;
      { lat.top() } -> std::same_as<typename L::Element>;
      { lat.bottom() } -> std::same_as<typename L::Element>;
      { lat.basis() } -> std::same_as<const std::vector<typename L::Element>&>;
      { lat.height() } -> std::same_as<size_t>;
      { lat.sample(rng) } -> std::same_as<typename L::Element>;
      { lat.to_string(a) } -> std::same_as<std::string>;
    };

// Least upper bound of a collection; the empty join is bottom.
template <Lattice L>
typename L::Element big_join(const L& lat, std::span<const typename L::Element> xs) {
  auto acc = lat.bottom();
  for (const auto& x : xs) acc = lat.join(acc, x);
  return acc;
}

template <Lattice L>
typename L::Element big_join(const L& lat, const std::vector<typename L::Element>& xs) {
  return big_join(lat, std::span<const typename L::Element>(xs));
}

// Basis elements below l, in basis order; their join reconstructs l.
template <Lattice L>
std::vector<typename L::Element> decompose(const L& lat, const typename L::Element& l) {
  std::vector<typename L::Element> out;
  for (const auto& b : lat.basis())
    if (lat.leq(b, l)) out.push_back(b);
  return out;
}

// Subsets of a finite ground set, ordered by inclusion. Basis: singletons.
class PowersetLattice {
public:
  using Element = Bitset;

  explicit PowersetLattice(std::vector<std::string> names) : names_(std::move(names)) {
    build_basis();
  }
  explicit PowersetLattice(uint32_t n) {
    names_.reserve(n);
    for (uint32_t i = 0; i < n; ++i) names_.push_back(std::to_string(i));
    build_basis();
  }

  uint32_t points() const { return static_cast<uint32_t>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  bool leq(const Element& a, const Element& b) const { return a.subset_of(b); }
  Element join(const Element& a, const Element& b) const { return a | b; }
  Element meet(const Element& a, const Element& b) const { return a & b; }
  Element top() const { return Bitset::full(points()); }
  Element bottom() const { return Bitset(points()); }
  const std::vector<Element>& basis() const { return basis_; }
  size_t height() const { return points() + 1; }

  Element sample(std::mt19937_64& rng) const {
    Element e(points());
    for (uint32_t i = 0; i < points(); ++i)
      if (rng() & 1) e.set(i);
    return e;
  }

  // Desk-scale only; oracles iterate the whole carrier.
  std::vector<Element> enumerate_all(size_t cap = 1u << 20) const {
    if (points() >= 63 || (size_t{1} << points()) > cap)
      throw std::length_error("PowersetLattice: carrier too large to enumerate");
    std::vector<Element> out;
    out.reserve(size_t{1} << points());
    for (uint64_t m = 0; m < (uint64_t{1} << points()); ++m) {
      Element e(points());
      for (uint32_t i = 0; i < points(); ++i)
        if ((m >> i) & 1) e.set(i);
      out.push_back(std::move(e));
    }
    return out;
  }

  std::string to_string(const Element& e) const {
    std::string s = "{";
    bool first = true;
    e.for_each([&](uint32_t i) {
      if (!first) s += ",";
      first = false;
      s += names_[i];
    });
    return s + "}";
  }

private:
  void build_basis() {
    basis_.reserve(names_.size());
    for (uint32_t i = 0; i < names_.size(); ++i) basis_.push_back(Bitset::singleton(points(), i));
  }

  std::vector<std::string> names_;
  std::vector<Element> basis_;
};

// Total maps U -> {0,..,n-1} under the pointwise order. Basis: maps that are
// m > 0 at exactly one point and 0 elsewhere, ordered by (point, value).
class PointwiseLattice {
public:
  using Element = std::vector<uint32_t>;

  PointwiseLattice(uint32_t points, uint32_t n) : points_(points), n_(n) {
    if (n == 0) throw std::invalid_argument("PointwiseLattice: empty value range");
    for (uint32_t p = 0; p < points_; ++p)
      for (uint32_t m = 1; m < n_; ++m) {
        Element e(points_, 0);
        e[p] = m;
        basis_.push_back(std::move(e));
      }
  }

  uint32_t points() const { return points_; }
  uint32_t bound() const { return n_; }

  bool leq(const Element& a, const Element& b) const {
    check(a);
    check(b);
    for (uint32_t i = 0; i < points_; ++i)
      if (a[i] > b[i]) return false;
    return true;
  }
  Element join(const Element& a, const Element& b) const {
    check(a);
    check(b);
    Element r(points_);
    for (uint32_t i = 0; i < points_; ++i) r[i] = std::max(a[i], b[i]);
    return r;
  }
  Element meet(const Element& a, const Element& b) const {
    check(a);
    check(b);
    Element r(points_);
    for (uint32_t i = 0; i < points_; ++i) r[i] = std::min(a[i], b[i]);
    return r;
  }
  Element top() const { return Element(points_, n_ - 1); }
  Element bottom() const { return Element(points_, 0); }
  const std::vector<Element>& basis() const { return basis_; }
  size_t height() const { return size_t{points_} * (n_ - 1) + 1; }

  Element sample(std::mt19937_64& rng) const {
    Element e(points_);
    for (uint32_t i = 0; i < points_; ++i) e[i] = static_cast<uint32_t>(rng() % n_);
    return e;
  }

  std::vector<Element> enumerate_all(size_t cap = 1u << 20) const {
    double total = 1;
    for (uint32_t i = 0; i < points_; ++i) total *= n_;
    if (total > static_cast<double>(cap))
      throw std::length_error("PointwiseLattice: carrier too large to enumerate");
    std::vector<Element> out;
    Element cur(points_, 0);
    while (true) {
      out.push_back(cur);
      uint32_t i = 0;
      while (i < points_ && cur[i] + 1 == n_) cur[i++] = 0;
      if (i == points_) break;
      ++cur[i];
    }
    return out;
  }

  std::string to_string(const Element& e) const {
    std::string s = "(";
    for (uint32_t i = 0; i < points_; ++i) {
      if (i) s += ",";
      s += std::to_string(e[i]);
    }
    return s + ")";
  }

private:
  void check(const Element& e) const {
    if (e.size() != points_) throw std::invalid_argument("PointwiseLattice: mismatched element");
  }

  uint32_t points_, n_;
  std::vector<Element> basis_;
};

static_assert(Lattice<PowersetLattice>);
static_assert(Lattice<PointwiseLattice>);

}  // namespace nestfix
