#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nestfix/encodings.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/games.hpp"
#include "nestfix/mucalc.hpp"

namespace nestfix {

namespace detail {

// Shared tokenizer for the line-based game formats; whitespace-insensitive,
// tracks line/column for diagnostics.
class GameLexer {
public:
  explicit GameLexer(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }
  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }
  bool try_keyword(const std::string& kw) {
    skip_ws();
    if (text_.compare(pos_, kw.size(), kw) == 0 &&
        (pos_ + kw.size() >= text_.size() ||
         !std::isalnum(static_cast<unsigned char>(text_[pos_ + kw.size()])))) {
      for (size_t i = 0; i < kw.size(); ++i) advance();
      return true;
    }
    return false;
  }
  long long integer() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(text_[start]))))
      fail("expected integer");
    try {
      return std::stoll(text_.substr(start, pos_ - start));
    } catch (const std::out_of_range&) {
      fail("integer literal out of range");
    }
    return 0;
  }
  // p/q or exact decimal.
  Rational rational() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '/' || text_[pos_] == '.'))
      advance();
    if (pos_ == start) fail("expected rational");
    try {
      return Rational::parse(text_.substr(start, pos_ - start));
    } catch (const std::exception& e) {
      fail(e.what());
    }
    return Rational(0);
  }
  std::string quoted_string() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      out += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    advance();
    return out;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

struct RawNode {
  long long id;
  int priority;
  int owner;                      // pgsolver convention: 0 = Eloise
  Rational sigma;                 // prob only
  std::vector<long long> succs;
  std::vector<long long> weights;    // energy only
  std::vector<Rational> probs;       // prob only
  std::string name;
};

enum class GameFlavor { parity, energy, prob };

inline std::vector<RawNode> parse_game_lines(GameLexer& lex, GameFlavor flavor) {
  std::vector<RawNode> out;
  while (!lex.eof()) {
    RawNode n{};
    n.id = lex.integer();
    if (n.id < 0) lex.fail("negative node id");
    n.priority = static_cast<int>(lex.integer());
    if (n.priority < 0) lex.fail("negative priority");
    if (flavor == GameFlavor::prob) {
      n.sigma = lex.rational();
    } else {
      n.owner = static_cast<int>(lex.integer());
      if (n.owner != 0 && n.owner != 1) lex.fail("owner must be 0 (Eloise) or 1 (Abelard)");
    }
    if (lex.peek() == ';') lex.fail("empty successor list");
    do {
      n.succs.push_back(lex.integer());
      if (flavor != GameFlavor::parity) {
        lex.expect(':');
        if (flavor == GameFlavor::energy)
          n.weights.push_back(lex.integer());
        else
          n.probs.push_back(lex.rational());
      }
    } while (lex.try_consume(','));
    if (lex.peek() == '"') n.name = lex.quoted_string();
    lex.expect(';');
    out.push_back(std::move(n));
  }
  return out;
}

// Node ids may be sparse; map to dense indices in ascending id order.
inline std::map<long long, int> index_by_id(const std::vector<RawNode>& raw) {
  std::map<long long, int> idx;
  for (const auto& n : raw)
    if (!idx.emplace(n.id, 0).second)
      throw ValidationError("duplicate node id " + std::to_string(n.id));
  int i = 0;
  for (auto& [id, v] : idx) v = i++;
  return idx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PGSolver parity-game format: optional `parity <maxId>;` header, then
// `<id> <priority> <owner> <succ>(,<succ>)* ("name")? ;` with owner 0 = Eloise.

inline ParityGame parse_pgsolver(const std::string& text) {
  detail::GameLexer lex(text);
  if (lex.try_keyword("parity")) {
    lex.integer();
    lex.expect(';');
  }
  auto raw = detail::parse_game_lines(lex, detail::GameFlavor::parity);
  auto idx = detail::index_by_id(raw);
  ParityGame g;
  g.nodes.resize(raw.size());
  for (const auto& n : raw) {
    auto& node = g.nodes[static_cast<size_t>(idx.at(n.id))];
    node.owner = n.owner == 0 ? ParityGame::Owner::eloise : ParityGame::Owner::abelard;
    node.priority = n.priority;
    node.name = n.name;
    node.ext_id = n.id;
    for (long long s : n.succs) {
      auto it = idx.find(s);
      if (it == idx.end()) throw ValidationError("unknown successor id " + std::to_string(s));
      node.moves.push_back(it->second);
    }
  }
  g.validate();
  return g;
}

inline std::string write_pgsolver(const ParityGame& g) {
  std::ostringstream os;
  long long max_id = 0;
  for (int v = 0; v < g.size(); ++v) max_id = std::max(max_id, g.display_id(v));
  os << "parity " << max_id << ";\n";
  for (int v = 0; v < g.size(); ++v) {
    const auto& n = g.nodes[v];
    os << g.display_id(v) << ' ' << n.priority << ' '
       << (n.owner == ParityGame::Owner::eloise ? 0 : 1) << ' ';
    for (size_t i = 0; i < n.moves.size(); ++i) os << (i ? "," : "") << g.display_id(n.moves[i]);
    if (!n.name.empty()) os << " \"" << n.name << '"';
    os << ";\n";
  }
  return os.str();
}

// Energy games: `energy <maxId>;` then `<id> <pri> <owner> <succ>:<weight>,...;`.
inline EnergyGame parse_energy(const std::string& text) {
  detail::GameLexer lex(text);
  if (lex.try_keyword("energy")) {
    lex.integer();
    lex.expect(';');
  }
  auto raw = detail::parse_game_lines(lex, detail::GameFlavor::energy);
  auto idx = detail::index_by_id(raw);
  EnergyGame g;
  g.game.nodes.resize(raw.size());
  g.weights.resize(raw.size());
  for (const auto& n : raw) {
    int v = idx.at(n.id);
    auto& node = g.game.nodes[static_cast<size_t>(v)];
    node.owner = n.owner == 0 ? ParityGame::Owner::eloise : ParityGame::Owner::abelard;
    node.priority = n.priority;
    node.name = n.name;
    node.ext_id = n.id;
    for (size_t i = 0; i < n.succs.size(); ++i) {
      auto it = idx.find(n.succs[i]);
      if (it == idx.end()) throw ValidationError("unknown successor id " + std::to_string(n.succs[i]));
      node.moves.push_back(it->second);
      g.weights[static_cast<size_t>(v)].push_back(n.weights[i]);
    }
  }
  g.validate();
  return g;
}

inline std::string write_energy(const EnergyGame& g) {
  std::ostringstream os;
  long long max_id = 0;
  for (int v = 0; v < g.game.size(); ++v) max_id = std::max(max_id, g.game.display_id(v));
  os << "energy " << max_id << ";\n";
  for (int v = 0; v < g.game.size(); ++v) {
    const auto& n = g.game.nodes[v];
    os << g.game.display_id(v) << ' ' << n.priority << ' '
       << (n.owner == ParityGame::Owner::eloise ? 0 : 1) << ' ';
    for (size_t i = 0; i < n.moves.size(); ++i)
      os << (i ? "," : "") << g.game.display_id(n.moves[i]) << ':' << g.weights[v][i];
    if (!n.name.empty()) os << " \"" << n.name << '"';
    os << ";\n";
  }
  return os.str();
}

// Probabilistic games: `prob <maxId>;` then `<id> <pri> <sigma> <succ>:<prob>,...;`
// with probabilities and thresholds as p/q or exact decimals.
inline ProbabilisticGame parse_prob(const std::string& text) {
  detail::GameLexer lex(text);
  if (lex.try_keyword("prob")) {
    lex.integer();
    lex.expect(';');
  }
  auto raw = detail::parse_game_lines(lex, detail::GameFlavor::prob);
  auto idx = detail::index_by_id(raw);
  ProbabilisticGame g;
  g.nodes.resize(raw.size());
  for (const auto& n : raw) {
    auto& node = g.nodes[static_cast<size_t>(idx.at(n.id))];
    node.priority = n.priority;
    node.threshold = n.sigma;
    node.name = n.name;
    node.ext_id = n.id;
    for (size_t i = 0; i < n.succs.size(); ++i) {
      auto it = idx.find(n.succs[i]);
      if (it == idx.end()) throw ValidationError("unknown successor id " + std::to_string(n.succs[i]));
      node.moves.emplace_back(it->second, n.probs[i]);
    }
  }
  g.validate();
  return g;
}

inline std::string write_prob(const ProbabilisticGame& g) {
  std::ostringstream os;
  long long max_id = 0;
  for (size_t v = 0; v < g.nodes.size(); ++v) max_id = std::max(max_id, g.display_id(static_cast<int>(v)));
  os << "prob " << max_id << ";\n";
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    const auto& n = g.nodes[v];
    os << g.display_id(static_cast<int>(v)) << ' ' << n.priority << ' ' << n.threshold.to_string() << ' ';
    for (size_t i = 0; i < n.moves.size(); ++i)
      os << (i ? "," : "") << g.display_id(n.moves[i].first) << ':' << n.moves[i].second.to_string();
    if (!n.name.empty()) os << " \"" << n.name << '"';
    os << ";\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Model files: JSON with kind, states, transitions, labels. Multigraph
// weights are naturals or "inf"; markov weights are rational strings or
// exact decimals (also accepted as JSON integers).

inline mucalc::Model parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  mucalc::Model m;
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "kripke")
      m.kind = mucalc::Model::Kind::kripke;
    else if (kind == "multigraph")
      m.kind = mucalc::Model::Kind::multigraph;
    else if (kind == "markov")
      m.kind = mucalc::Model::Kind::markov;
    else
      throw ValidationError("unknown model kind: " + kind);
    std::map<std::string, int> state_index;
    for (const auto& s : j.at("states")) {
      std::string name = s.get<std::string>();
      if (!state_index.emplace(name, static_cast<int>(m.states.size())).second)
        throw ValidationError("duplicate state " + name);
      m.states.push_back(name);
    }
    auto state_of = [&](const std::string& s) {
      auto it = state_index.find(s);
      if (it == state_index.end()) throw ValidationError("unknown state " + s);
      return it->second;
    };
    m.succ.resize(m.states.size());
    m.grades.resize(m.states.size());
    m.dist.resize(m.states.size());
    if (j.contains("transitions")) {
      for (const auto& [src, rows] : j.at("transitions").items()) {
        int x = state_of(src);
        for (const auto& row : rows) {
          std::string dst = row.is_array() ? row.at(0).get<std::string>() : row.get<std::string>();
          int y = state_of(dst);
          switch (m.kind) {
            case mucalc::Model::Kind::kripke: m.succ[x].push_back(y); break;
            case mucalc::Model::Kind::multigraph: {
              uint64_t w = 1;
              if (row.is_array() && row.size() > 1) {
                if (row.at(1).is_string() && row.at(1).get<std::string>() == "inf")
                  w = mucalc::kInfiniteGrade;
                else
                  w = row.at(1).get<uint64_t>();
              }
              m.grades[x].emplace_back(y, w);
              break;
            }
            case mucalc::Model::Kind::markov: {
              if (!row.is_array() || row.size() < 2) throw ValidationError("markov transition needs a probability");
              Rational p = row.at(1).is_string() ? Rational::parse(row.at(1).get<std::string>())
                                                 : Rational(row.at(1).get<long long>());
              m.dist[x].emplace_back(y, p);
              break;
            }
          }
        }
      }
    }
    if (j.contains("labels"))
      for (const auto& [atom, states] : j.at("labels").items())
        for (const auto& s : states) m.labels[atom].push_back(state_of(s.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what());
  }
  m.validate();
  return m;
}

inline std::string write_model(const mucalc::Model& m) {
  nlohmann::ordered_json j;
  j["kind"] = m.kind == mucalc::Model::Kind::kripke      ? "kripke"
              : m.kind == mucalc::Model::Kind::multigraph ? "multigraph"
                                                          : "markov";
  j["states"] = m.states;
  nlohmann::ordered_json tr = nlohmann::ordered_json::object();
  for (size_t x = 0; x < m.states.size(); ++x) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    switch (m.kind) {
      case mucalc::Model::Kind::kripke:
        for (int y : m.succ[x]) row.push_back(nlohmann::ordered_json::array({m.states[y]}));
        break;
      case mucalc::Model::Kind::multigraph:
        for (auto [y, w] : m.grades[x])
          row.push_back(w == mucalc::kInfiniteGrade
                            ? nlohmann::ordered_json::array({m.states[y], "inf"})
                            : nlohmann::ordered_json::array({m.states[y], w}));
        break;
      case mucalc::Model::Kind::markov:
        for (const auto& [y, p] : m.dist[x])
          row.push_back(nlohmann::ordered_json::array({m.states[y], p.to_string()}));
        break;
    }
    if (!row.empty()) tr[m.states[x]] = row;
  }
  j["transitions"] = tr;
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [atom, states] : m.labels) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int s : states) arr.push_back(m.states[s]);
    labels[atom] = arr;
  }
  j["labels"] = labels;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Formula text. Unary operators bind tightest, then &, then |; binders extend
// maximally to the right. Variables are uppercase-initial, atoms lowercase.

namespace detail {

class FormulaParser {
public:
  explicit FormulaParser(std::string text) : text_(std::move(text)) {}

  mucalc::FormulaPtr parse() {
    auto f = parse_or();
    skip_ws();
    if (pos_ < text_.size()) fail("trailing input");
    mucalc::validate_clean_closed(f);
    return f;
  }

  // tt/ff/variables with & and | only; free variables allowed (BES bodies).
  mucalc::FormulaPtr parse_propositional() {
    propositional_ = true;
    auto f = parse_or();
    skip_ws();
    if (pos_ < text_.size()) fail("trailing input");
    return f;
  }

private:
  mucalc::FormulaPtr parse_or() {
    auto lhs = parse_and();
    while (try_consume('|')) lhs = mucalc::f_or(lhs, parse_and());
    return lhs;
  }
  mucalc::FormulaPtr parse_and() {
    auto lhs = parse_unary();
    while (try_consume('&')) lhs = mucalc::f_and(lhs, parse_unary());
    return lhs;
  }
  mucalc::FormulaPtr parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto f = parse_or();
      expect(')');
      return f;
    }
    if (c == '<' && !propositional_) return mucalc::f_modal(parse_angle_op(), parse_unary());
    if (c == '[' && !propositional_) return mucalc::f_modal(parse_bracket_op(), parse_unary());
    std::string word = identifier();
    if (word == "tt") return mucalc::f_top();
    if (word == "ff") return mucalc::f_bot();
    if ((word == "mu" || word == "nu") && propositional_) fail("BES right-hand sides are propositional");
    if (word == "mu" || word == "nu") {
      skip_ws();
      std::string var = identifier();
      if (var.empty() || !std::isupper(static_cast<unsigned char>(var[0])))
        fail("binder variable must be uppercase-initial");
      expect('.');
      return mucalc::f_fix(word == "mu" ? Polarity::lfp : Polarity::gfp, var, parse_or());
    }
    if (word.empty()) fail("expected formula");
    if (std::isupper(static_cast<unsigned char>(word[0]))) return mucalc::f_var(word);
    if (propositional_) fail("atoms are not allowed in BES right-hand sides");
    return mucalc::f_atom(word);
  }

  mucalc::ModalOp parse_angle_op() {
    ++pos_;  // '<'
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '>') {
      ++pos_;
      return {mucalc::ModalOp::Family::diamond, 0, {}, ""};
    }
    if (pos_ < text_.size() && text_[pos_] == 'p' &&
        !(pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      auto r = rational();
      expect('>');
      return {mucalc::ModalOp::Family::prob_diamond, 0, r, ""};
    }
    uint64_t g = natural();
    expect('>');
    return {mucalc::ModalOp::Family::graded_diamond, g, {}, ""};
  }
  mucalc::ModalOp parse_bracket_op() {
    ++pos_;  // '['
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return {mucalc::ModalOp::Family::box, 0, {}, ""};
    }
    if (pos_ < text_.size() && text_[pos_] == 'p' &&
        !(pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      auto r = rational();
      expect(']');
      return {mucalc::ModalOp::Family::prob_box, 0, r, ""};
    }
    uint64_t g = natural();
    expect(']');
    return {mucalc::ModalOp::Family::graded_box, g, {}, ""};
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }
  uint64_t natural() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected natural number");
    return std::stoull(text_.substr(start, pos_ - start));
  }
  Rational rational() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '/' || text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail("expected rational");
    try {
      return Rational::parse(text_.substr(start, pos_ - start));
    } catch (const std::exception& e) {
      fail(e.what());
    }
    return Rational(0);
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at offset " + std::to_string(pos_), 1, static_cast<int>(pos_) + 1);
  }

  std::string text_;
  size_t pos_ = 0;
  bool propositional_ = false;
};

}  // namespace detail

inline mucalc::FormulaPtr parse_formula(const std::string& text) {
  return detail::FormulaParser(text).parse();
}

// ---------------------------------------------------------------------------
// Boolean equation systems: `mu X = rhs;` / `nu X = rhs;` lines over
// tt/ff/variables with & and |. First line is equation index 0 (innermost);
// solved over the two-element lattice (powerset of one point).

struct BesSystem {
  std::vector<std::string> variables;
  std::vector<Polarity> polarities;
  std::vector<mucalc::FormulaPtr> rhs;  // propositional: top/bot/var/and/or only
};

inline BesSystem parse_bes(const std::string& text) {
  BesSystem bes;
  std::map<std::string, int> seen;
  size_t pos = 0;
  int line = 1;
  while (pos < text.size()) {
    auto semi = text.find(';', pos);
    std::string stmt = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
    int stmt_line = line;
    for (char c : stmt)
      if (c == '\n') ++line;
    pos = semi == std::string::npos ? text.size() : semi + 1;

    size_t i = 0;
    auto skip = [&] {
      while (i < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
    };
    skip();
    if (i == stmt.size()) continue;  // blank segment
    Polarity pol;
    if (stmt.compare(i, 2, "mu") == 0 && (i + 2 == stmt.size() || std::isspace(static_cast<unsigned char>(stmt[i + 2]))))
      pol = Polarity::lfp;
    else if (stmt.compare(i, 2, "nu") == 0 && (i + 2 == stmt.size() || std::isspace(static_cast<unsigned char>(stmt[i + 2]))))
      pol = Polarity::gfp;
    else
      throw ParseError("expected 'mu' or 'nu'", stmt_line, static_cast<int>(i) + 1);
    i += 2;
    skip();
    size_t var_start = i;
    while (i < stmt.size() && (std::isalnum(static_cast<unsigned char>(stmt[i])) || stmt[i] == '_')) ++i;
    std::string var = stmt.substr(var_start, i - var_start);
    if (var.empty() || !std::isupper(static_cast<unsigned char>(var[0])))
      throw ParseError("equation variable must be uppercase-initial", stmt_line, static_cast<int>(var_start) + 1);
    skip();
    if (i >= stmt.size() || stmt[i] != '=')
      throw ParseError("expected '=' in equation", stmt_line, static_cast<int>(i) + 1);
    ++i;
    if (!seen.emplace(var, static_cast<int>(bes.variables.size())).second)
      throw ValidationError("variable " + var + " defined twice");
    bes.variables.push_back(var);
    bes.polarities.push_back(pol);
    bes.rhs.push_back(detail::FormulaParser(stmt.substr(i)).parse_propositional());
  }
  if (bes.variables.empty()) throw ParseError("empty equation system");
  // Every referenced variable must be defined.
  for (const auto& f : bes.rhs) {
    auto walk = [&](auto&& self, const mucalc::FormulaPtr& g) -> void {
      if (g->kind == mucalc::Formula::Kind::var) {
        if (!seen.count(g->var)) throw ValidationError("undefined variable " + g->var);
      } else if (g->kind == mucalc::Formula::Kind::lor || g->kind == mucalc::Formula::Kind::land) {
        self(self, g->lhs);
        self(self, g->rhs);
      } else if (g->kind == mucalc::Formula::Kind::modal || g->kind == mucalc::Formula::Kind::fix) {
        throw ValidationError("BES right-hand sides are propositional");
      }
    };
    walk(walk, f);
  }
  return bes;
}

inline std::string write_bes(const BesSystem& bes) {
  std::ostringstream os;
  for (size_t i = 0; i < bes.variables.size(); ++i) {
    os << (bes.polarities[i] == Polarity::lfp ? "mu " : "nu ") << bes.variables[i] << " = "
       << mucalc::to_string(bes.rhs[i]) << ";\n";
  }
  return os.str();
}

// BES as an equation system over the 2-element lattice.
inline EquationSystem<PowersetLattice> bes_system(const BesSystem& bes) {
  PowersetLattice two(std::vector<std::string>{"*"});
  std::map<std::string, int> index;
  for (size_t i = 0; i < bes.variables.size(); ++i) index[bes.variables[i]] = static_cast<int>(i);
  std::vector<EquationSystem<PowersetLattice>::Rhs> fs;
  for (const auto& body : bes.rhs) {
    fs.push_back([body, index, two](std::span<const Bitset> args) {
      auto eval = [&](auto&& self, const mucalc::FormulaPtr& g) -> Bitset {
        switch (g->kind) {
          case mucalc::Formula::Kind::top: return two.top();
          case mucalc::Formula::Kind::bot: return two.bottom();
          case mucalc::Formula::Kind::lor: return self(self, g->lhs) | self(self, g->rhs);
          case mucalc::Formula::Kind::land: return self(self, g->lhs) & self(self, g->rhs);
          case mucalc::Formula::Kind::var: return args[static_cast<size_t>(index.at(g->var))];
          default: throw std::logic_error("non-propositional BES rhs");
        }
      };
      return eval(eval, body);
    });
  }
  return make_system(two, bes.polarities, std::move(fs));
}

}  // namespace nestfix
