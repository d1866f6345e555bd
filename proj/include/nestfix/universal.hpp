#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestfix {

// ---------------------------------------------------------------------------
// Labelled graphs and the even-graph test.

struct LabelledGraph {
  struct Edge {
    int src, label, dst;
    bool operator==(const Edge&) const = default;
  };
  int num_nodes = 0;
  std::vector<Edge> edges;
};

struct OddCycleWitness {
  int label;  // the odd label dominating some cycle
  int node;   // a node on that cycle
};

namespace detail {

// Tarjan over an edge subset; comp[i] = component id per node.
inline int scc_decompose(int n, const std::vector<std::vector<int>>& adj, std::vector<int>& comp) {
  comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0, next_comp = 0;
  // Iterative Tarjan: frame = (node, next child position).
  std::vector<std::pair<int, size_t>> frames;
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    frames.push_back({start, 0});
    while (!frames.empty()) {
      auto& [v, ci] = frames.back();
      if (ci == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (ci < adj[v].size()) {
        int w = adj[v][ci++];
        if (index[w] == -1) {
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == v) break;
          }
          ++next_comp;
        }
        int child = v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[child]);
      }
    }
  }
  return next_comp;
}

}  // namespace detail

// A finite graph is even iff no cycle is dominated by an odd label: for each
// odd p, inside the subgraph of labels <= p no SCC may close a cycle through
// an edge labelled exactly p.
inline std::optional<OddCycleWitness> find_odd_dominated_cycle(const LabelledGraph& g) {
  std::vector<int> labels;
  for (const auto& e : g.edges)
    if (e.label % 2) labels.push_back(e.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<int> comp;
  for (int p : labels) {
    std::vector<std::vector<int>> adj(g.num_nodes);
    for (const auto& e : g.edges)
      if (e.label <= p) adj[e.src].push_back(e.dst);
    detail::scc_decompose(g.num_nodes, adj, comp);
    for (const auto& e : g.edges)
      if (e.label == p && comp[e.src] == comp[e.dst]) return OddCycleWitness{p, e.src};
  }
  return std::nullopt;
}

inline bool is_even_graph(const LabelledGraph& g) { return !find_odd_dominated_cycle(g); }

// ---------------------------------------------------------------------------
// Ordered universal trees. Leaves are navigation paths: one component per
// level, topmost level first; level j serves the odd edge label 2j-1.

// Binary string of bounded length under the order 0-prefixed < empty <
// 1-prefixed, applied recursively (so for budget 2: 00 < 0 < 01 < e < 10 < 1 < 11).
struct BitString {
  uint32_t bits = 0;  // bit 0 = first character
  uint8_t len = 0;

  bool bit(uint8_t i) const { return (bits >> i) & 1; }

  static std::strong_ordering compare(const BitString& a, const BitString& b) {
    uint8_t common = std::min(a.len, b.len);
    for (uint8_t i = 0; i < common; ++i) {
      if (a.bit(i) != b.bit(i)) return a.bit(i) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.len == b.len) return std::strong_ordering::equal;
    if (a.len > b.len) return a.bit(common) ? std::strong_ordering::greater : std::strong_ordering::less;
    return b.bit(common) ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  bool operator==(const BitString& o) const { return len == o.len && (bits & mask(len)) == (o.bits & mask(len)); }

  static uint32_t mask(uint8_t n) { return n >= 32 ? ~0u : (1u << n) - 1; }

  static BitString zeros(uint8_t n) { return BitString{0, n}; }
  static BitString ones(uint8_t n) { return BitString{mask(n), n}; }

  std::string to_string() const {
    if (len == 0) return "e";
    std::string s;
    for (uint8_t i = 0; i < len; ++i) s += bit(i) ? '1' : '0';
    return s;
  }
};

// Immediate predecessor among strings of length <= budget (in-order walk of
// the depth-`budget` binary tree); nullopt for the minimum 0^budget.
inline std::optional<BitString> bitstring_pred(const BitString& s, uint8_t budget) {
  if (s.len < budget) {
    // Maximum of the left subtree: s, then 0, then all 1s.
    BitString r = s;
    r.bits &= BitString::mask(r.len);
    r.len = budget;
    for (uint8_t i = s.len + 1; i < budget; ++i) r.bits |= 1u << i;
    return r;
  }
  // Full-length string: strip trailing zeros, then one 1.
  uint8_t n = s.len;
  while (n > 0 && !s.bit(n - 1)) --n;
  if (n == 0) return std::nullopt;
  BitString r;
  r.len = n - 1;
  r.bits = s.bits & BitString::mask(r.len);
  return r;
}

namespace detail {

inline uint32_t ceil_log2(uint32_t l) {
  uint32_t b = 0;
  while ((uint32_t{1} << b) < l) ++b;
  return b;
}

// Shared succ skeleton for both flavors: odd labels decrement one level and
// refill below rightmost, even labels keep levels >= label/2 and refill below.
template <typename Tree, typename Leaf>
std::optional<Leaf> succ_impl(const Tree& tree, const Leaf& q, int label) {
  tree.validate(q);
  int h = static_cast<int>(tree.height());
  if (label < 0 || label > 2 * h) throw std::out_of_range("succ: label out of range for tree height");
  if (label % 2) {
    int level = (label + 1) / 2;       // 1..h
    size_t idx = size_t(h - level);    // position in the path, topmost first
    Leaf r(q.begin(), q.begin() + idx + 1);
    if (!tree.decrement_at(r, idx)) return std::nullopt;
    tree.complete_rightmost(r);
    return r;
  }
  int keep_from_level = label / 2;  // keep levels >= this; label 0 keeps all
  size_t keep = keep_from_level == 0 ? size_t(h) : size_t(h - keep_from_level + 1);
  Leaf r(q.begin(), q.begin() + keep);
  tree.complete_rightmost(r);
  return r;
}

}  // namespace detail

// Complete (l,h)-universal tree: branching exactly l at every level, |Z| = l^h.
// The naive baseline; universality is exhaustively testable.
class CompleteTree {
public:
  using Leaf = std::vector<uint32_t>;

  CompleteTree(uint32_t branching, uint32_t height) : l_(branching), h_(height) {
    if (l_ == 0 || h_ == 0) throw std::invalid_argument("CompleteTree: need l >= 1, h >= 1");
  }

  uint32_t branching() const { return l_; }
  size_t height() const { return h_; }

  std::strong_ordering leaf_compare(const Leaf& a, const Leaf& b) const {
    validate(a);
    validate(b);
    for (size_t i = 0; i < h_; ++i) {
      if (a[i] != b[i]) return a[i] < b[i] ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

  std::optional<Leaf> succ(const Leaf& q, int label) const {
    return detail::succ_impl<CompleteTree, Leaf>(*this, q, label);
  }

  Leaf min_leaf() const { return Leaf(h_, 0); }

  std::vector<Leaf> leaves_in_order() const {
    std::vector<Leaf> out;
    out.reserve(static_cast<size_t>(size()));
    Leaf cur(h_, 0);
    while (true) {
      out.push_back(cur);
      size_t i = h_;
      while (i > 0 && cur[i - 1] + 1 == l_) cur[--i] = 0;
      if (i == 0) break;
      ++cur[i - 1];
    }
    return out;
  }

  uint64_t size() const {
    uint64_t s = 1;
    for (uint32_t i = 0; i < h_; ++i) s *= l_;
    return s;
  }

  std::string leaf_to_string(const Leaf& q) const {
    std::string s = "(";
    for (size_t i = 0; i < q.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(q[i]);
    }
    return s + ")";
  }

  // Hooks for succ_impl.
  void validate(const Leaf& q) const {
    if (q.size() != h_) throw std::invalid_argument("CompleteTree: leaf has wrong height");
    for (uint32_t c : q)
      if (c >= l_) throw std::invalid_argument("CompleteTree: component out of range");
  }
  bool decrement_at(Leaf& prefix, size_t idx) const {
    if (prefix[idx] == 0) return false;
    --prefix[idx];
    return true;
  }
  void complete_rightmost(Leaf& prefix) const { prefix.resize(h_, l_ - 1); }

private:
  uint32_t l_, h_;
};

// Succinct (l,h)-universal tree: navigation paths are h binary strings with
// total length <= ceil(log2 l); quasipolynomially many leaves.
class SuccinctTree {
public:
  using Leaf = std::vector<BitString>;

  SuccinctTree(uint32_t l, uint32_t h) : l_(l), h_(h), budget_(static_cast<uint8_t>(detail::ceil_log2(l))) {
    if (l_ == 0 || h_ == 0) throw std::invalid_argument("SuccinctTree: need l >= 1, h >= 1");
    if (budget_ > 28) throw std::invalid_argument("SuccinctTree: bit budget too large");
  }

  uint32_t width_parameter() const { return l_; }
  size_t height() const { return h_; }
  uint8_t budget() const { return budget_; }

  std::strong_ordering leaf_compare(const Leaf& a, const Leaf& b) const {
    validate(a);
    validate(b);
    for (size_t i = 0; i < h_; ++i) {
      auto c = BitString::compare(a[i], b[i]);
      if (c != std::strong_ordering::equal) return c;
    }
    return std::strong_ordering::equal;
  }

  std::optional<Leaf> succ(const Leaf& q, int label) const {
    return detail::succ_impl<SuccinctTree, Leaf>(*this, q, label);
  }

  Leaf min_leaf() const {
    Leaf q(h_);
    q[0] = BitString::zeros(budget_);
    return q;
  }

  std::vector<Leaf> leaves_in_order() const {
    std::vector<Leaf> out;
    Leaf cur(h_);
    enumerate(cur, 0, budget_, out);
    std::sort(out.begin(), out.end(), [&](const Leaf& a, const Leaf& b) {
      return leaf_compare(a, b) == std::strong_ordering::less;
    });
    return out;
  }

  // Closed-form leaf count: sum over total length t of C(h-1+t, h-1) * 2^t.
  uint64_t size() const {
    uint64_t total = 0;
    for (uint32_t t = 0; t <= budget_; ++t) total += binomial(h_ - 1 + t, h_ - 1) << t;
    return total;
  }

  static uint64_t binomial(uint64_t n, uint64_t r) {
    if (r > n) return 0;
    r = std::min(r, n - r);
    uint64_t acc = 1;
    for (uint64_t i = 1; i <= r; ++i) acc = acc * (n - r + i) / i;
    return acc;
  }

  std::string leaf_to_string(const Leaf& q) const {
    std::string s = "(";
    for (size_t i = 0; i < q.size(); ++i) {
      if (i) s += ",";
      s += q[i].to_string();
    }
    return s + ")";
  }

  // Hooks for succ_impl.
  void validate(const Leaf& q) const {
    if (q.size() != h_) throw std::invalid_argument("SuccinctTree: leaf has wrong height");
    uint32_t used = 0;
    for (const auto& c : q) used += c.len;
    if (used > budget_) throw std::invalid_argument("SuccinctTree: leaf exceeds bit budget");
  }
  bool decrement_at(Leaf& prefix, size_t idx) const {
    uint32_t used_above = 0;
    for (size_t i = 0; i < idx; ++i) used_above += prefix[i].len;
    auto p = bitstring_pred(prefix[idx], static_cast<uint8_t>(budget_ - used_above));
    if (!p) return false;
    prefix[idx] = *p;
    return true;
  }
  // Greatest completion: all remaining bits as 1s at the first open level.
  void complete_rightmost(Leaf& prefix) const {
    uint32_t used = 0;
    for (const auto& c : prefix) used += c.len;
    if (prefix.size() < h_) prefix.push_back(BitString::ones(static_cast<uint8_t>(budget_ - used)));
    prefix.resize(h_);
  }

private:
  void enumerate(Leaf& cur, size_t level, uint8_t remaining, std::vector<Leaf>& out) const {
    if (level == h_) {
      out.push_back(cur);
      return;
    }
    for (uint8_t len = 0; len <= remaining; ++len) {
      for (uint32_t bits = 0; bits < (uint32_t{1} << len); ++bits) {
        cur[level] = BitString{bits, len};
        enumerate(cur, level + 1, static_cast<uint8_t>(remaining - len), out);
      }
    }
    cur[level] = BitString{};
  }

  uint32_t l_, h_;
  uint8_t budget_;
};

template <typename T>
concept UniversalTree = requires(const T& t, const typename T::Leaf& q, int label) {
  typename T::Leaf;
  { t.leaf_compare(q, q) } -> std::same_as<std::strong_ordering>;
  { t.succ(q, label) } -> std::same_as<std::optional<typename T::Leaf>>;
  { t.min_leaf() } -> std::same_as<typename T::Leaf>;
  { t.leaves_in_order() } -> std::same_as<std::vector<typename T::Leaf>>;
  { t.size() } -> std::same_as<uint64_t>;
  { t.height() } -> std::same_as<size_t>;
};

static_assert(UniversalTree<CompleteTree>);
static_assert(UniversalTree<SuccinctTree>);

// ---------------------------------------------------------------------------
// Rank-compiled view: leaves as ordinal ranks, succ as integer tables. The
// solvers compare ranks only and decode back to leaves at the boundary.

struct LeafTable {
  uint64_t num_leaves = 0;
  int max_label = 0;
  // succ[label][rank] = target rank, or -1 when K_label is empty there.
  std::vector<std::vector<int64_t>> succ;
  std::vector<std::string> leaf_names;

  int64_t star() const { return static_cast<int64_t>(num_leaves); }
};

template <UniversalTree T>
LeafTable compile_tree(const T& tree, int max_label) {
  auto leaves = tree.leaves_in_order();
  if (leaves.size() != tree.size()) throw std::logic_error("compile_tree: size() disagrees with enumeration");
  LeafTable table;
  table.num_leaves = leaves.size();
  table.max_label = max_label;
  auto rank_of = [&](const typename T::Leaf& q) -> int64_t {
    auto it = std::lower_bound(leaves.begin(), leaves.end(), q, [&](const auto& a, const auto& b) {
      return tree.leaf_compare(a, b) == std::strong_ordering::less;
    });
    return it - leaves.begin();
  };
  table.succ.assign(max_label + 1, std::vector<int64_t>(leaves.size(), -1));
  for (int label = 0; label <= max_label; ++label)
    for (size_t r = 0; r < leaves.size(); ++r)
      if (auto s = tree.succ(leaves[r], label)) table.succ[label][r] = rank_of(*s);
  table.leaf_names.reserve(leaves.size());
  for (const auto& q : leaves) table.leaf_names.push_back(tree.leaf_to_string(q));
  return table;
}

// ---------------------------------------------------------------------------
// Homomorphism search into (Z, K). K is single-valued per label, so images
// propagate along edges; backtracking only picks roots of unforced components.

template <UniversalTree T>
std::optional<std::vector<typename T::Leaf>> find_homomorphism(const LabelledGraph& g, const T& tree) {
  int max_label = 0;
  for (const auto& e : g.edges) max_label = std::max(max_label, e.label);
  if (max_label > 2 * static_cast<int>(tree.height())) return std::nullopt;
  LeafTable table = compile_tree(tree, max_label);
  const int64_t nleaves = static_cast<int64_t>(table.num_leaves);

  std::vector<std::vector<std::pair<int, int>>> out_edges(g.num_nodes);
  for (const auto& e : g.edges) out_edges[e.src].push_back({e.label, e.dst});

  std::vector<int64_t> image(g.num_nodes, -1);

  // Assign `node` = `rank` and propagate every forced image; returns the
  // trail for undo, or nullopt on conflict.
  auto propagate = [&](int node, int64_t rank) -> std::optional<std::vector<int>> {
    std::vector<int> trail;
    std::vector<int> queue;
    image[node] = rank;
    trail.push_back(node);
    queue.push_back(node);
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      for (auto [label, w] : out_edges[v]) {
        int64_t forced = table.succ[label][image[v]];
        if (forced < 0 || (image[w] != -1 && image[w] != forced)) {
          for (int u : trail) image[u] = -1;
          return std::nullopt;
        }
        if (image[w] == -1) {
          image[w] = forced;
          trail.push_back(w);
          queue.push_back(w);
        }
      }
    }
    return trail;
  };

  // Large images fail late less often under odd descent; purely a heuristic.
  std::vector<int> order(g.num_nodes);
  for (int i = 0; i < g.num_nodes; ++i) order[i] = i;

  auto search = [&](auto&& self, size_t pos) -> bool {
    while (pos < order.size() && image[order[pos]] != -1) ++pos;
    if (pos == order.size()) return true;
    int node = order[pos];
    for (int64_t rank = nleaves - 1; rank >= 0; --rank) {
      auto trail = propagate(node, rank);
      if (!trail) continue;
      if (self(self, pos + 1)) return true;
      for (int u : *trail) image[u] = -1;
    }
    return false;
  };

  if (!search(search, 0)) return std::nullopt;
  auto leaves = tree.leaves_in_order();
  std::vector<typename T::Leaf> result;
  result.reserve(g.num_nodes);
  for (int v = 0; v < g.num_nodes; ++v) result.push_back(leaves[static_cast<size_t>(image[v])]);
  return result;
}

}  // namespace nestfix
