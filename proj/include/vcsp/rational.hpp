#pragma once

// Exact rational numbers and the extended value space used for costs.
//
// Rational keeps small values in a pair of int64 words and promotes to a GMP
// rational only when an intermediate result overflows. Every result is kept
// in canonical form (gcd(|num|, den) = 1, den > 0), and a value is stored in
// the small form whenever it fits, so equality is representation-independent.

#include <gmpxx.h>

#include <climits>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcsp {

class Rational {
 public:
  Rational() = default;
  Rational(long v) { // NOLINT(google-explicit-constructor)
    if (v == LONG_MIN) {
      set_big(mpq_class(mpz_class(v)));
    } else {
      num_ = v;
    }
  }
  Rational(int v) : Rational(static_cast<long>(v)) {} // NOLINT
  Rational(long long v) : Rational(static_cast<long>(v)) {} // NOLINT

  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    mpq_class q{mpz_class(num), mpz_class(den)};
    q.canonicalize();
    from_mpq(q);
  }

  explicit Rational(const mpq_class& q) { from_mpq(q); }

  Rational(const Rational& o) : num_(o.num_), den_(o.den_) {
    if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
  }
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) {
      num_ = o.num_;
      den_ = o.den_;
      big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
    }
    return *this;
  }
  Rational& operator=(Rational&&) noexcept = default;

  /// Parses "p", "-p" or "p/q" (decimal integers, optional sign on p).
  static Rational parse(std::string_view text) {
    auto digits_ok = [](std::string_view s, bool allow_sign) {
      if (!s.empty() && allow_sign && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
      if (s.empty()) return false;
      for (char c : s)
        if (c < '0' || c > '9') return false;
      return true;
    };
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (!digits_ok(num, true) || (slash != std::string_view::npos && !digits_ok(den, false)))
      throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    mpz_class zn(n, 10);
    mpz_class zd(1);
    if (slash != std::string_view::npos) zd = mpz_class(std::string(den), 10);
    if (zd == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    mpq_class q(zn, zd);
    q.canonicalize();
    return Rational(q);
  }

  bool is_small() const { return !big_; }
  bool is_zero() const { return !big_ && num_ == 0; }
  int sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
  }
  bool is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    return mpq_class(mpz_class(num_), mpz_class(den_));
  }

  double to_double() const { return big_ ? big_->get_d() : static_cast<double>(num_) / static_cast<double>(den_); }

  std::string to_string() const {
    if (big_) return big_->get_str();
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  std::size_t hash() const {
    if (big_) return std::hash<std::string>{}(big_->get_str());
    std::size_t h = std::hash<long>{}(num_);
    return h ^ (std::hash<long>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }

  Rational operator-() const {
    Rational r;
    if (big_) {
      r.from_mpq(-*big_);
    } else {
      r.num_ = -num_;
      r.den_ = den_;
    }
    return r;
  }

  Rational& operator+=(const Rational& o) {
    if (!big_ && !o.big_ && small_add(num_, den_, o.num_, o.den_)) return *this;
    from_mpq(to_mpq() + o.to_mpq());
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    if (!big_ && !o.big_ && small_add(num_, den_, -o.num_, o.den_)) return *this;
    from_mpq(to_mpq() - o.to_mpq());
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    if (!big_ && !o.big_ && small_mul(num_, den_, o.num_, o.den_)) return *this;
    from_mpq(to_mpq() * o.to_mpq());
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    if (!big_ && !o.big_) {
      long on = o.num_ < 0 ? -o.den_ : o.den_;
      long od = o.num_ < 0 ? -o.num_ : o.num_;
      if (small_mul(num_, den_, on, od)) return *this;
    }
    from_mpq(to_mpq() / o.to_mpq());
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // canonical storage: a big value never equals a small one
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
      __int128 l = static_cast<__int128>(a.num_) * b.den_;
      __int128 r = static_cast<__int128>(b.num_) * a.den_;
      return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  long num_ = 0;
  long den_ = 1;
  std::unique_ptr<mpq_class> big_;

  void set_big(mpq_class q) { big_ = std::make_unique<mpq_class>(std::move(q)); }

  void from_mpq(const mpq_class& q) {
    const mpz_class& n = q.get_num();
    const mpz_class& d = q.get_den();
    if (n.fits_slong_p() && d.fits_slong_p() && n.get_si() != LONG_MIN) {
      num_ = n.get_si();
      den_ = d.get_si();
      big_.reset();
    } else {
      set_big(q);
    }
  }

  static long abs_l(long v) { return v < 0 ? -v : v; }

  // Both helpers operate on small canonical operands (num != LONG_MIN, den > 0)
  // and return false on overflow, leaving *this untouched.
  bool small_add(long n1, long d1, long n2, long d2) {
    long n, d;
    if (d1 == d2) {
      if (__builtin_add_overflow(n1, n2, &n)) return false;
      d = d1;
    } else {
      long g = std::gcd(d1, d2);
      long a = d1 / g, b = d2 / g, t1, t2;
      if (__builtin_mul_overflow(n1, b, &t1) || __builtin_mul_overflow(n2, a, &t2) ||
          __builtin_add_overflow(t1, t2, &n) || __builtin_mul_overflow(d1, b, &d))
        return false;
    }
    if (n == LONG_MIN) return false;
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return true;
    }
    long g = std::gcd(abs_l(n), d);
    num_ = n / g;
    den_ = d / g;
    return true;
  }

  bool small_mul(long n1, long d1, long n2, long d2) {
    if (n1 == 0 || n2 == 0) {
      num_ = 0;
      den_ = 1;
      return true;
    }
    long g1 = std::gcd(abs_l(n1), d2);
    long g2 = std::gcd(abs_l(n2), d1);
    long n, d;
    if (__builtin_mul_overflow(n1 / g1, n2 / g2, &n) || __builtin_mul_overflow(d1 / g2, d2 / g1, &d)) return false;
    if (n == LONG_MIN) return false;
    num_ = n;
    den_ = d;
    return true;
  }
};

/// A rational number or +infinity. Infinity absorbs addition and is the
/// unique maximum of the total order. There is deliberately no product.
class ExtRat {
 public:
  ExtRat() = default;
  ExtRat(Rational v) : value_(std::move(v)) {} // NOLINT(google-explicit-constructor)
  ExtRat(long v) : value_(v) {} // NOLINT
  ExtRat(int v) : value_(v) {} // NOLINT

  static ExtRat infinity() {
    ExtRat e;
    e.inf_ = true;
    return e;
  }

  bool is_inf() const { return inf_; }
  bool is_finite() const { return !inf_; }

  const Rational& value() const {
    if (inf_) throw std::logic_error("value() of infinite ExtRat");
    return value_;
  }

  ExtRat& operator+=(const ExtRat& o) {
    if (inf_ || o.inf_) {
      inf_ = true;
      value_ = Rational();
    } else {
      value_ += o.value_;
    }
    return *this;
  }
  friend ExtRat operator+(ExtRat a, const ExtRat& b) { return a += b; }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtRat& a, const ExtRat& b) {
    if (a.inf_ || b.inf_) return static_cast<int>(a.inf_) <=> static_cast<int>(b.inf_);
    return a.value_ <=> b.value_;
  }

  /// "inf", an integer, or "p/q".
  std::string to_string() const { return inf_ ? "inf" : value_.to_string(); }

  static ExtRat parse(std::string_view text) {
    if (text == "inf" || text == "+inf") return infinity();
    return ExtRat(Rational::parse(text));
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtRat& e) { return os << e.to_string(); }

 private:
  bool inf_ = false;
  Rational value_;
};

inline ExtRat min(const ExtRat& a, const ExtRat& b) { return b < a ? b : a; }

}  // namespace vcsp

template <>
struct std::hash<vcsp::Rational> {
  std::size_t operator()(const vcsp::Rational& r) const { return r.hash(); }
};
