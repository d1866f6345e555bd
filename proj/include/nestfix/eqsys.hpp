#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nestfix/lattice.hpp"

namespace nestfix {

enum class Polarity { lfp, gfp };

// Alternation depths per the mutual ad^mu/ad^nu recursion. Depths are
// monotone in the equation index and even exactly for GFP equations.
inline std::vector<int> alternation_depths(const std::vector<Polarity>& pol) {
  std::vector<int> ad_mu(pol.size()), ad_nu(pol.size()), ad(pol.size());
  for (size_t i = 0; i < pol.size(); ++i) {
    if (i == 0) {
      ad_mu[0] = 1;
      ad_nu[0] = 0;
    } else if (pol[i - 1] == Polarity::lfp) {
      ad_mu[i] = ad_mu[i - 1];
      ad_nu[i] = ad_mu[i - 1] + 1;
    } else {
      ad_mu[i] = ad_nu[i - 1] + 1;
      ad_nu[i] = ad_nu[i - 1];
    }
    ad[i] = pol[i] == Polarity::lfp ? ad_mu[i] : ad_nu[i];
  }
  return ad;
}

// System X_i =_{eta_i} f_i(X_0,..,X_k) over one lattice. The rhs handles are
// opaque monotone callables; monotonicity is a contract spot-checked by
// check_monotone, not enforced.
template <Lattice L>
struct EquationSystem {
  using Element = typename L::Element;
  using Rhs = std::function<Element(std::span<const Element>)>;

  L lattice;
  std::vector<Polarity> polarities;
  std::vector<Rhs> rhs;
  std::vector<int> ad;

  int k() const { return static_cast<int>(polarities.size()) - 1; }
  int arity() const { return static_cast<int>(polarities.size()); }
  // d = ad(k), the number of distinct priorities minus one in the fixpoint game.
  int depth() const { return ad.back(); }

  Element apply(int i, std::span<const Element> args) const { return rhs[i](args); }
};

template <Lattice L>
EquationSystem<L> make_system(L lattice, std::vector<Polarity> polarities,
                              std::vector<typename EquationSystem<L>::Rhs> rhs) {
  if (polarities.empty() || polarities.size() != rhs.size())
    throw std::invalid_argument("make_system: need one rhs per polarity, at least one equation");
  EquationSystem<L> sys{std::move(lattice), std::move(polarities), std::move(rhs), {}};
  sys.ad = alternation_depths(sys.polarities);
  return sys;
}

// Projection onto argument j; the rhs of the chain equations X_i = X_{i-1}.
template <Lattice L>
typename EquationSystem<L>::Rhs projection_rhs(int j) {
  return [j](std::span<const typename L::Element> args) { return args[j]; };
}

// X_0 =_GFP f0(X_0,..,X_k); X_i = X_{i-1} with LFP at odd i, GFP at even i.
template <Lattice L>
EquationSystem<L> canonical_system(L lattice, int k, typename EquationSystem<L>::Rhs f0) {
  if (k < 0) throw std::invalid_argument("canonical_system: negative k");
  std::vector<Polarity> pol;
  std::vector<typename EquationSystem<L>::Rhs> rhs;
  pol.push_back(Polarity::gfp);
  rhs.push_back(std::move(f0));
  for (int i = 1; i <= k; ++i) {
    pol.push_back(i % 2 ? Polarity::lfp : Polarity::gfp);
    rhs.push_back(projection_rhs<L>(i - 1));
  }
  return make_system(std::move(lattice), std::move(pol), std::move(rhs));
}

template <Lattice L>
using Valuation = std::vector<std::optional<typename L::Element>>;

// Naive nested Kleene iteration; the ground-truth oracle. Exponential in the
// nesting depth, memoized on (index, sigma) to keep desk-scale tests fast.
template <Lattice L>
class KleeneSolver {
public:
  using Element = typename L::Element;

  explicit KleeneSolver(const EquationSystem<L>& sys) : sys_(sys) {}

  Element solve(int i) { return solve(i, Valuation<L>(sys_.arity())); }

  Element solve(int i, Valuation<L> sigma) {
    if (i < 0 || i > sys_.k()) throw std::out_of_range("KleeneSolver: equation index");
    if (sigma.size() != static_cast<size_t>(sys_.arity()))
      throw std::invalid_argument("KleeneSolver: valuation arity mismatch");
    return solve_rec(i, sigma);
  }

  std::vector<Element> solve_all() {
    std::vector<Element> out;
    for (int i = 0; i <= sys_.k(); ++i) out.push_back(solve(i));
    return out;
  }

  uint64_t rhs_evals() const { return rhs_evals_; }

private:
  struct Key {
    int idx;
    Valuation<L> sigma;
    bool operator==(const Key& o) const { return idx == o.idx && sigma == o.sigma; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = 0xcbf29ce484222325ull ^ static_cast<size_t>(k.idx);
      for (const auto& e : k.sigma) {
        h = (h * 0x100000001b3ull) ^ (e ? hash_value(*e) : 0x5bd1e995u);
      }
      return h;
    }
  };

  Element solve_rec(int i, const Valuation<L>& sigma) {
    Key key{i, sigma};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const L& lat = sys_.lattice;
    Element a = sys_.polarities[i] == Polarity::gfp ? lat.top() : lat.bottom();
    std::vector<Element> args(sys_.arity(), lat.bottom());
    // Consecutive iterates form a chain, so height()+1 steps suffice; running
    // past that means a rhs broke the monotonicity contract.
    for (size_t step = 0; step <= lat.height() + 1; ++step) {
      Valuation<L> inner = sigma;
      inner[i] = a;
      for (int j = 0; j <= sys_.k(); ++j) {
        if (j == i)
          args[j] = a;
        else if (j < i)
          args[j] = solve_rec(j, inner);
        else
          args[j] = inner[j] ? *inner[j] : solve_rec(j, inner);
      }
      ++rhs_evals_;
      Element next = sys_.apply(i, args);
      if (next == a) {
        memo_.emplace(std::move(key), a);
        return a;
      }
      a = std::move(next);
    }
    throw std::runtime_error("kleene iteration did not converge; non-monotone rhs?");
  }

  const EquationSystem<L>& sys_;
  std::unordered_map<Key, Element, KeyHash> memo_;
  uint64_t rhs_evals_ = 0;
};

template <Lattice L>
typename L::Element kleene_solve(const EquationSystem<L>& sys, int i) {
  return KleeneSolver<L>(sys).solve(i);
}

template <Lattice L>
typename L::Element kleene_solve(const EquationSystem<L>& sys, int i, Valuation<L> sigma) {
  return KleeneSolver<L>(sys).solve(i, std::move(sigma));
}

template <Lattice L>
std::vector<typename L::Element> kleene_solve_all(const EquationSystem<L>& sys) {
  return KleeneSolver<L>(sys).solve_all();
}

template <Lattice L>
struct MonotonicityReport {
  struct Violation {
    int equation;
    std::vector<typename L::Element> args_lo, args_hi;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Draws pointwise-ordered argument tuples and reports any rhs that fails
// f(lo) <= f(hi). Violations are reported, never thrown.
template <Lattice L>
MonotonicityReport<L> check_monotone(const EquationSystem<L>& sys, int samples, uint64_t seed) {
  MonotonicityReport<L> report;
  std::mt19937_64 rng(seed);
  const L& lat = sys.lattice;
  for (int i = 0; i <= sys.k(); ++i) {
    for (int s = 0; s < samples; ++s) {
      std::vector<typename L::Element> lo, hi;
      for (int j = 0; j <= sys.k(); ++j) {
        auto a = lat.sample(rng);
        lo.push_back(a);
        hi.push_back(lat.join(a, lat.sample(rng)));
      }
      if (!lat.leq(sys.apply(i, lo), sys.apply(i, hi)))
        report.violations.push_back({i, lo, hi});
    }
  }
  return report;
}

}  // namespace nestfix
