#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestfix {

// Fixed-universe bit set; the element type of the powerset lattice.
// Two sets compare equal only if they live over the same universe size.
class Bitset {
public:
  Bitset() = default;
  explicit Bitset(uint32_t universe) : size_(universe), words_((universe + 63) / 64, 0) {}

  static Bitset full(uint32_t universe) {
    Bitset b(universe);
    for (uint32_t i = 0; i < universe; ++i) b.set(i);
    return b;
  }
  static Bitset singleton(uint32_t universe, uint32_t i) {
    Bitset b(universe);
    b.set(i);
    return b;
  }

  uint32_t universe() const { return size_; }

  void set(uint32_t i) {
    check_index(i);
    words_[i >> 6] |= uint64_t{1} << (i & 63);
  }
  void reset(uint32_t i) {
    check_index(i);
    words_[i >> 6] &= ~(uint64_t{1} << (i & 63));
  }
  bool test(uint32_t i) const {
    check_index(i);
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  bool any() const {
    for (uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  uint32_t count() const {
    uint32_t c = 0;
    for (uint64_t w : words_) c += static_cast<uint32_t>(__builtin_popcountll(w));
    return c;
  }

  Bitset operator|(const Bitset& o) const {
    Bitset r = *this;
    r |= o;
    return r;
  }
  Bitset operator&(const Bitset& o) const {
    Bitset r = *this;
    r &= o;
    return r;
  }
  Bitset& operator|=(const Bitset& o) {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  // Complement within the universe.
  Bitset operator~() const {
    Bitset r(size_);
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    r.trim();
    return r;
  }

  bool subset_of(const Bitset& o) const {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    check_same(o);
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  bool operator==(const Bitset& o) const { return size_ == o.size_ && words_ == o.words_; }
  bool operator!=(const Bitset& o) const { return !(*this == o); }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t w = words_[wi];
      while (w) {
        uint32_t bit = static_cast<uint32_t>(__builtin_ctzll(w));
        fn(static_cast<uint32_t>(wi * 64 + bit));
        w &= w - 1;
      }
    }
  }

  std::vector<uint32_t> members() const {
    std::vector<uint32_t> r;
    for_each([&](uint32_t i) { r.push_back(i); });
    return r;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for_each([&](uint32_t i) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(i);
    });
    return s + "}";
  }

  size_t hash() const {
    size_t h = 0x9e3779b97f4a7c15ull ^ size_;
    for (uint64_t w : words_) h = (h * 0x100000001b3ull) ^ w;
    return h;
  }

private:
  void check_index(uint32_t i) const {
    if (i >= size_) throw std::out_of_range("Bitset: index " + std::to_string(i) + " out of universe");
  }
  void check_same(const Bitset& o) const {
    if (size_ != o.size_) throw std::invalid_argument("Bitset: mismatched universes");
  }
  void trim() {
    if (size_ % 64 && !words_.empty()) words_.back() &= (uint64_t{1} << (size_ % 64)) - 1;
  }

  uint32_t size_ = 0;
  std::vector<uint64_t> words_;
};

inline size_t hash_value(const Bitset& b) { return b.hash(); }

inline size_t hash_value(const std::vector<uint32_t>& v) {
  size_t h = 0x84222325cbf29ce4ull ^ v.size();
  for (uint32_t x : v) h = (h * 0x100000001b3ull) ^ x;
  return h;
}

}  // namespace nestfix
