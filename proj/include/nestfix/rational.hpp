#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nestfix {

// Exact rational on int64 with __int128 intermediates. Probabilities and
// thresholds go through this type end-to-end; never through floating point.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  Rational operator+(const Rational& o) const {
    return make((__int128)num_ * o.den_ + (__int128)o.num_ * den_, (__int128)den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return make((__int128)num_ * o.den_ - (__int128)o.num_ * den_, (__int128)den_ * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return make((__int128)num_ * o.num_, (__int128)den_ * o.den_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return (__int128)num_ * o.den_ < (__int128)o.num_ * den_; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p/q", integers, and exact decimals ("0.3" -> 3/10).
  static Rational parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      long long p = parse_int(text.substr(0, slash));
      long long q = parse_int(text.substr(slash + 1));
      return Rational(p, q);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text));
    std::string ip = text.substr(0, dot), fp = text.substr(dot + 1);
    if (fp.empty() || fp.size() > 18) throw std::invalid_argument("bad decimal literal: " + text);
    bool neg = !ip.empty() && ip[0] == '-';
    long long scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    long long whole = ip.empty() || ip == "-" ? 0 : parse_int(ip);
    long long frac = parse_int(fp);
    long long n = whole * scale + (neg ? -frac : frac);
    return Rational(n, scale);
  }

private:
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 g = gcd128(a, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    return r;
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static long long parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer literal: " + s);
    return v;
  }
  void normalize() {
    Rational r = make(num_, den_);
    num_ = r.num_;
    den_ = r.den_;
  }

  long long num_, den_;
};

}  // namespace nestfix
