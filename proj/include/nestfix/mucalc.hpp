#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "nestfix/bitset.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/eqsys.hpp"
#include "nestfix/rational.hpp"

namespace nestfix {
namespace mucalc {

// ---------------------------------------------------------------------------
// Formulas: top | bot | or | and | modality | variable | mu/nu binder.
// Atoms are nullary modalities; the grammar is negation-free, duals are
// primitive modalities.

struct ModalOp {
  enum class Family : uint8_t { diamond, box, graded_diamond, graded_box, prob_diamond, prob_box, atom };
  Family family = Family::diamond;
  uint64_t grade = 0;       // graded_*
  Rational prob;            // prob_*
  std::string atom;         // atom
  bool operator==(const ModalOp&) const = default;

  int arity() const { return family == Family::atom ? 0 : 1; }
  std::string to_string() const {
    switch (family) {
      case Family::diamond: return "<>";
      case Family::box: return "[]";
      case Family::graded_diamond: return "<" + std::to_string(grade) + ">";
      case Family::graded_box: return "[" + std::to_string(grade) + "]";
      case Family::prob_diamond: return "<p " + prob.to_string() + ">";
      case Family::prob_box: return "[p " + prob.to_string() + "]";
      case Family::atom: return atom;
    }
    return "?";
  }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind : uint8_t { top, bot, lor, land, modal, var, fix };
  Kind kind = Kind::top;
  FormulaPtr lhs, rhs;  // lor/land children; modal/fix body in lhs
  ModalOp op;           // modal
  std::string var;      // var name / fix bound variable
  Polarity pol = Polarity::gfp;  // fix
};

inline FormulaPtr f_top() { return std::make_shared<Formula>(Formula{Formula::Kind::top, {}, {}, {}, "", {}}); }
inline FormulaPtr f_bot() { return std::make_shared<Formula>(Formula{Formula::Kind::bot, {}, {}, {}, "", {}}); }
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{Formula::Kind::lor, std::move(a), std::move(b), {}, "", {}});
}
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{Formula::Kind::land, std::move(a), std::move(b), {}, "", {}});
}
inline FormulaPtr f_modal(ModalOp op, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{Formula::Kind::modal, std::move(body), {}, std::move(op), "", {}});
}
inline FormulaPtr f_atom(std::string name) {
  return f_modal(ModalOp{ModalOp::Family::atom, 0, {}, std::move(name)}, nullptr);
}
inline FormulaPtr f_var(std::string name) {
  return std::make_shared<Formula>(Formula{Formula::Kind::var, {}, {}, {}, std::move(name), {}});
}
inline FormulaPtr f_fix(Polarity pol, std::string var, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{Formula::Kind::fix, std::move(body), {}, {}, std::move(var), pol});
}

inline bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::top:
    case Formula::Kind::bot: return true;
    case Formula::Kind::lor:
    case Formula::Kind::land: return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
    case Formula::Kind::modal: return a->op == b->op && formula_equal(a->lhs, b->lhs);
    case Formula::Kind::var: return a->var == b->var;
    case Formula::Kind::fix:
      return a->pol == b->pol && a->var == b->var && formula_equal(a->lhs, b->lhs);
  }
  return false;
}

inline std::string to_string(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::top: return "tt";
    case Formula::Kind::bot: return "ff";
    case Formula::Kind::lor: return "(" + to_string(f->lhs) + " | " + to_string(f->rhs) + ")";
    case Formula::Kind::land: return "(" + to_string(f->lhs) + " & " + to_string(f->rhs) + ")";
    case Formula::Kind::modal:
      return f->op.arity() == 0 ? f->op.to_string() : f->op.to_string() + " " + to_string(f->lhs);
    case Formula::Kind::var: return f->var;
    case Formula::Kind::fix:
      return std::string(f->pol == Polarity::lfp ? "mu " : "nu ") + f->var + ". " + to_string(f->lhs);
  }
  return "?";
}

// Clean: every variable bound at most once, no free variables when closed.
inline void validate_clean_closed(const FormulaPtr& f) {
  std::vector<std::string> bound_anywhere;
  auto walk = [&](auto&& self, const FormulaPtr& g, std::vector<std::string> scope) -> void {
    switch (g->kind) {
      case Formula::Kind::top:
      case Formula::Kind::bot: return;
      case Formula::Kind::lor:
      case Formula::Kind::land:
        self(self, g->lhs, scope);
        self(self, g->rhs, scope);
        return;
      case Formula::Kind::modal:
        if (g->lhs) self(self, g->lhs, scope);
        return;
      case Formula::Kind::var:
        for (const auto& v : scope)
          if (v == g->var) return;
        throw ValidationError("free fixpoint variable " + g->var);
      case Formula::Kind::fix:
        for (const auto& v : bound_anywhere)
          if (v == g->var) throw ValidationError("formula not clean: variable " + g->var + " bound twice");
        bound_anywhere.push_back(g->var);
        scope.push_back(g->var);
        self(self, g->lhs, std::move(scope));
        return;
    }
  };
  walk(walk, f, {});
}

// ---------------------------------------------------------------------------
// Closure: all subformulas, first-occurrence order, structurally deduplicated;
// theta maps each bound variable to the closure index of its binder.

struct Closure {
  std::vector<FormulaPtr> items;
  std::unordered_map<std::string, int> binder_of_var;  // theta
  int index_of(const FormulaPtr& f) const {
    for (size_t i = 0; i < items.size(); ++i)
      if (formula_equal(items[i], f)) return static_cast<int>(i);
    throw std::logic_error("closure: formula not found");
  }
  size_t size() const { return items.size(); }
};

inline Closure closure(const FormulaPtr& chi) {
  validate_clean_closed(chi);
  Closure cl;
  auto add = [&](auto&& self, const FormulaPtr& f) -> void {
    for (const auto& g : cl.items)
      if (formula_equal(g, f)) return;
    cl.items.push_back(f);
    switch (f->kind) {
      case Formula::Kind::lor:
      case Formula::Kind::land:
        self(self, f->lhs);
        self(self, f->rhs);
        break;
      case Formula::Kind::modal:
        if (f->lhs) self(self, f->lhs);
        break;
      case Formula::Kind::fix:
        self(self, f->lhs);
        break;
      default: break;
    }
  };
  add(add, chi);
  for (size_t i = 0; i < cl.items.size(); ++i)
    if (cl.items[i]->kind == Formula::Kind::fix) cl.binder_of_var[cl.items[i]->var] = static_cast<int>(i);
  return cl;
}

// Binder subformulas innermost-first (post-order); their polarities feed the
// shared alternation-depth recursion, which reproduces the appendix values.
inline std::vector<FormulaPtr> binders_innermost_first(const FormulaPtr& chi) {
  std::vector<FormulaPtr> out;
  auto walk = [&](auto&& self, const FormulaPtr& f) -> void {
    switch (f->kind) {
      case Formula::Kind::lor:
      case Formula::Kind::land:
        self(self, f->lhs);
        self(self, f->rhs);
        break;
      case Formula::Kind::modal:
        if (f->lhs) self(self, f->lhs);
        break;
      case Formula::Kind::fix:
        self(self, f->lhs);
        out.push_back(f);
        break;
      default: break;
    }
  };
  walk(walk, chi);
  return out;
}

struct AlternationInfo {
  int depth = 0;                                 // ad(chi), the system arity - 1
  std::map<std::string, int> binder_depth;       // ad(theta(X)) per bound variable
};

inline AlternationInfo alternation_info(const FormulaPtr& chi) {
  AlternationInfo info;
  auto binders = binders_innermost_first(chi);
  if (binders.empty()) return info;
  std::vector<Polarity> pol;
  pol.reserve(binders.size());
  for (const auto& b : binders) pol.push_back(b->pol);
  auto ad = alternation_depths(pol);
  for (size_t i = 0; i < binders.size(); ++i) info.binder_depth[binders[i]->var] = ad[i];
  info.depth = ad.back();
  return info;
}

// ---------------------------------------------------------------------------
// Models: Kripke frames, multigraphs (grades in N plus infinity), Markov
// chains with exact rational rows.

inline constexpr uint64_t kInfiniteGrade = ~uint64_t{0};

struct Model {
  enum class Kind : uint8_t { kripke, multigraph, markov };
  Kind kind = Kind::kripke;
  std::vector<std::string> states;
  std::vector<std::vector<int>> succ;                           // kripke
  std::vector<std::vector<std::pair<int, uint64_t>>> grades;    // multigraph
  std::vector<std::vector<std::pair<int, Rational>>> dist;      // markov
  std::map<std::string, std::vector<int>> labels;

  uint32_t size() const { return static_cast<uint32_t>(states.size()); }

  void validate() const {
    if (kind == Kind::markov) {
      if (dist.size() != states.size()) throw ValidationError("markov model: row count mismatch");
      for (size_t x = 0; x < dist.size(); ++x) {
        Rational sum(0);
        for (const auto& [y, p] : dist[x]) {
          if (y < 0 || y >= static_cast<int>(states.size())) throw ValidationError("model: successor range");
          sum += p;
        }
        if (sum != Rational(1))
          throw ValidationError("markov row " + states[x] + " sums to " + sum.to_string() + ", not 1");
      }
    }
  }
  Bitset label_set(const std::string& atom) const {
    Bitset b(size());
    if (auto it = labels.find(atom); it != labels.end())
      for (int s : it->second) b.set(static_cast<uint32_t>(s));
    return b;
  }
};

// One-step modal evaluation: diamonds by their lifting, boxes by the
// complement identity dual(A) = ~diamond(~A).
inline Bitset eval_one_step(const Model& m, const ModalOp& op, const Bitset& arg) {
  using F = ModalOp::Family;
  auto require_kind = [&](Model::Kind k, const char* what) {
    if (m.kind != k) throw ValidationError(std::string("modality ") + op.to_string() + " needs a " + what + " model");
  };
  Bitset out(m.size());
  switch (op.family) {
    case F::atom: return m.label_set(op.atom);
    case F::diamond:
      require_kind(Model::Kind::kripke, "kripke");
      for (uint32_t x = 0; x < m.size(); ++x)
        for (int y : m.succ[x])
          if (arg.test(static_cast<uint32_t>(y))) {
            out.set(x);
            break;
          }
      return out;
    case F::box: {
      ModalOp dual{F::diamond, 0, {}, ""};
      return ~eval_one_step(m, dual, ~arg);
    }
    case F::graded_diamond: {
      require_kind(Model::Kind::multigraph, "multigraph");
      for (uint32_t x = 0; x < m.size(); ++x) {
        uint64_t total = 0;
        bool inf = false;
        for (const auto& [y, g] : m.grades[x])
          if (arg.test(static_cast<uint32_t>(y))) {
            if (g == kInfiniteGrade) inf = true;
            else total += g;
          }
        if (inf || total > op.grade) out.set(x);
      }
      return out;
    }
    case F::graded_box: {
      ModalOp dual{F::graded_diamond, op.grade, {}, ""};
      return ~eval_one_step(m, dual, ~arg);
    }
    case F::prob_diamond: {
      require_kind(Model::Kind::markov, "markov");
      for (uint32_t x = 0; x < m.size(); ++x) {
        Rational mass(0);
        for (const auto& [y, p] : m.dist[x])
          if (arg.test(static_cast<uint32_t>(y))) mass += p;
        if (mass > op.prob) out.set(x);
      }
      return out;
    }
    case F::prob_box: {
      ModalOp dual{F::prob_diamond, 0, op.prob, ""};
      return ~eval_one_step(m, dual, ~arg);
    }
  }
  throw std::logic_error("eval_one_step: unknown modality");
}

// ---------------------------------------------------------------------------
// Direct recursive semantics: the oracle path. Fixpoints by Kleene iteration
// over P(C).

inline Bitset direct_eval(const Model& m, const FormulaPtr& f, std::map<std::string, Bitset>& valuation) {
  switch (f->kind) {
    case Formula::Kind::top: return Bitset::full(m.size());
    case Formula::Kind::bot: return Bitset(m.size());
    case Formula::Kind::lor: return direct_eval(m, f->lhs, valuation) | direct_eval(m, f->rhs, valuation);
    case Formula::Kind::land: return direct_eval(m, f->lhs, valuation) & direct_eval(m, f->rhs, valuation);
    case Formula::Kind::modal:
      return eval_one_step(m, f->op, f->lhs ? direct_eval(m, f->lhs, valuation) : Bitset(m.size()));
    case Formula::Kind::var: {
      auto it = valuation.find(f->var);
      if (it == valuation.end()) throw ValidationError("uncovered free variable " + f->var);
      return it->second;
    }
    case Formula::Kind::fix: {
      Bitset a = f->pol == Polarity::gfp ? Bitset::full(m.size()) : Bitset(m.size());
      while (true) {
        valuation[f->var] = a;
        Bitset next = direct_eval(m, f->lhs, valuation);
        valuation.erase(f->var);
        if (next == a) return a;
        a = std::move(next);
      }
    }
  }
  throw std::logic_error("direct_eval: unknown formula kind");
}

inline Bitset direct_eval(const Model& m, const FormulaPtr& f) {
  std::map<std::string, Bitset> val;
  return direct_eval(m, f, val);
}

// ---------------------------------------------------------------------------
// The coalgebraic model-checking function alpha_mc over P(Cl(chi) x C), plus
// its canonical system of arity ad(chi)+1. Solving at index k and filtering
// the (chi, x) pairs yields the truth set.

struct ModelChecker {
  Model model;
  Closure cl;
  AlternationInfo alt;
  PowersetLattice lattice{0u};
  int chi_index = 0;

  uint32_t pair_index(int formula_idx, uint32_t state) const {
    return static_cast<uint32_t>(formula_idx) * model.size() + state;
  }
};

inline ModelChecker make_model_checker(const Model& m, const FormulaPtr& chi) {
  m.validate();
  ModelChecker mc;
  mc.model = m;
  mc.cl = closure(chi);
  mc.alt = alternation_info(chi);
  std::vector<std::string> names;
  names.reserve(mc.cl.size() * m.size());
  for (const auto& f : mc.cl.items)
    for (const auto& s : m.states) names.push_back("(" + to_string(f) + "," + s + ")");
  mc.lattice = PowersetLattice(std::move(names));
  mc.chi_index = mc.cl.index_of(chi);
  return mc;
}

// alpha_mc itself; argument j (0-based) realizes the paper's U_{j+1}. The
// clause table is compiled up front so the rhs owns everything it touches.
inline EquationSystem<PowersetLattice>::Rhs alpha_mc_rhs(const ModelChecker& mc) {
  struct Row {
    Formula::Kind kind;
    int a = -1, b = -1;  // child closure indices
    int level = 0;       // variable clause: ad(theta(X))
    ModalOp op;
  };
  std::vector<Row> rows;
  rows.reserve(mc.cl.size());
  for (const auto& f : mc.cl.items) {
    Row r{f->kind, -1, -1, 0, {}};
    switch (f->kind) {
      case Formula::Kind::lor:
      case Formula::Kind::land:
        r.a = mc.cl.index_of(f->lhs);
        r.b = mc.cl.index_of(f->rhs);
        break;
      case Formula::Kind::modal:
        r.op = f->op;
        if (f->lhs) r.a = mc.cl.index_of(f->lhs);
        break;
      case Formula::Kind::fix: r.a = mc.cl.index_of(f->lhs); break;
      case Formula::Kind::var:
        r.a = mc.cl.binder_of_var.at(f->var);
        r.level = mc.alt.binder_depth.at(f->var);
        break;
      default: break;
    }
    rows.push_back(std::move(r));
  }

  return [model = mc.model, rows = std::move(rows), nstates = mc.model.size()](std::span<const Bitset> args) {
    auto pair_index = [&](int fi, uint32_t x) { return static_cast<uint32_t>(fi) * nstates + x; };
    Bitset out(static_cast<uint32_t>(rows.size()) * nstates);
    for (size_t fi = 0; fi < rows.size(); ++fi) {
      const Row& r = rows[fi];
      switch (r.kind) {
        case Formula::Kind::top:
          for (uint32_t x = 0; x < nstates; ++x) out.set(pair_index(static_cast<int>(fi), x));
          break;
        case Formula::Kind::bot: break;
        case Formula::Kind::modal: {
          Bitset sub(nstates);
          if (r.a >= 0)
            for (uint32_t x = 0; x < nstates; ++x)
              if (args[0].test(pair_index(r.a, x))) sub.set(x);
          Bitset sat = eval_one_step(model, r.op, sub);
          sat.for_each([&](uint32_t x) { out.set(pair_index(static_cast<int>(fi), x)); });
          break;
        }
        case Formula::Kind::lor:
          for (uint32_t x = 0; x < nstates; ++x)
            if (args[0].test(pair_index(r.a, x)) || args[0].test(pair_index(r.b, x)))
              out.set(pair_index(static_cast<int>(fi), x));
          break;
        case Formula::Kind::land:
          for (uint32_t x = 0; x < nstates; ++x)
            if (args[0].test(pair_index(r.a, x)) && args[0].test(pair_index(r.b, x)))
              out.set(pair_index(static_cast<int>(fi), x));
          break;
        case Formula::Kind::fix:
          for (uint32_t x = 0; x < nstates; ++x)
            if (args[0].test(pair_index(r.a, x))) out.set(pair_index(static_cast<int>(fi), x));
          break;
        case Formula::Kind::var:
          for (uint32_t x = 0; x < nstates; ++x)
            if (args[static_cast<size_t>(r.level)].test(pair_index(r.a, x)))
              out.set(pair_index(static_cast<int>(fi), x));
          break;
      }
    }
    return out;
  };
}

inline EquationSystem<PowersetLattice> alpha_mc_system(const ModelChecker& mc) {
  return canonical_system(mc.lattice, mc.alt.depth, alpha_mc_rhs(mc));
}

// Truth set of chi from the canonical solution at index k.
inline Bitset truth_from_solution(const ModelChecker& mc, const Bitset& solution_k) {
  Bitset out(mc.model.size());
  for (uint32_t x = 0; x < mc.model.size(); ++x)
    if (solution_k.test(mc.pair_index(mc.chi_index, x))) out.set(x);
  return out;
}

}  // namespace mucalc
}  // namespace nestfix
