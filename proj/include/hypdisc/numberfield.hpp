#pragma once

// Exact arithmetic in Q and in real quadratic fields Q(sqrt(d)).
//
// Elements are a + b*sqrt(d) with a, b canonical rationals and d a fixed
// squarefree positive integer; d == 1 encodes plain Q (then b == 0 always).
// Every predicate below is decided exactly; nothing ever rounds.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hypdisc {

using Int = mpz_class;
using Rational = mpq_class;  // kept canonical: reduced, positive denominator

inline Rational make_rational(const Int& num, const Int& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline int sign_of(const Rational& q) { return sgn(q); }

// --- field spec ------------------------------------------------------------

inline bool is_squarefree(std::int64_t n) {
  if (n <= 0) return false;
  for (std::int64_t f = 2; f * f <= n; ++f) {
    if (n % (f * f) == 0) return false;
  }
  return true;
}

// d = 1 means Q itself; otherwise Q(sqrt(d)) with d squarefree, d >= 2.
struct FieldSpec {
  std::int64_t d = 1;

  explicit FieldSpec(std::int64_t dd = 1) : d(dd) {
    if (d < 1 || !is_squarefree(d))
      throw std::domain_error("field discriminant part must be squarefree and >= 1");
  }
  bool rational_field() const { return d == 1; }
  friend bool operator==(const FieldSpec& x, const FieldSpec& y) { return x.d == y.d; }
  friend bool operator!=(const FieldSpec& x, const FieldSpec& y) { return !(x == y); }
};

// --- field elements --------------------------------------------------------

class FieldElement {
 public:
  FieldElement() : a_(0), b_(0), d_(1) {}
  // mpq_class does not reduce fractions on two-argument construction, and all
  // GMP rational comparisons assume reduced form, so normalize at this boundary
  FieldElement(Rational a, Rational b, FieldSpec spec)
      : a_(std::move(a)), b_(std::move(b)), d_(spec.d) {
    if (a_.get_den() == 0 || b_.get_den() == 0)
      throw std::domain_error("zero denominator in field element");
    a_.canonicalize();
    b_.canonicalize();
    if (spec.rational_field() && b_ != 0)
      throw std::domain_error("irrational part in a rational field element");
  }
  static FieldElement rational(Rational a, FieldSpec spec) {
    return FieldElement(std::move(a), Rational(0), spec);
  }
  static FieldElement integer(long v, FieldSpec spec) {
    return FieldElement(Rational(v), Rational(0), spec);
  }
  static FieldElement sqrt_d(FieldSpec spec) {
    if (spec.rational_field())
      throw std::domain_error("sqrt generator does not exist over Q");
    return FieldElement(Rational(0), Rational(1), spec);
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  FieldSpec spec() const { return FieldSpec(d_); }
  std::int64_t d() const { return d_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return reduced(x.a_ + y.a_, x.b_ + y.b_, x.d_);
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return reduced(x.a_ - y.a_, x.b_ - y.b_, x.d_);
  }
  friend FieldElement operator-(const FieldElement& x) {
    return reduced(-x.a_, -x.b_, x.d_);
  }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    Rational a = x.a_ * y.a_ + x.b_ * y.b_ * Rational(x.d_);
    Rational b = x.a_ * y.b_ + x.b_ * y.a_;
    return reduced(std::move(a), std::move(b), x.d_);
  }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    if (y.is_zero()) throw std::domain_error("division by zero field element");
    // multiply by the conjugate; the norm a^2 - d b^2 is a nonzero rational
    Rational n = y.norm();
    Rational a = (x.a_ * y.a_ - x.b_ * y.b_ * Rational(y.d_)) / n;
    Rational b = (x.b_ * y.a_ - x.a_ * y.b_) / n;
    return reduced(std::move(a), std::move(b), x.d_);
  }
  FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
  FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
  FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }
  FieldElement& operator/=(const FieldElement& y) { return *this = *this / y; }

  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

  FieldElement galois_conjugate() const { return reduced(a_, -b_, d_); }

  // field norm a^2 - d b^2, a rational; zero only for the zero element
  // (d squarefree > 1 makes sqrt(d) irrational)
  Rational norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

  // exact sign: the four-case rational comparison, no radicals evaluated
  int sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: |a| vs |b| sqrt(d) decided by squares
    return sa * sign_of(a_ * a_ - Rational(d_) * b_ * b_);
  }

  FieldElement abs() const { return sign() >= 0 ? *this : -(*this); }

  // x / y when the quotient is rational; empty when it is irrational
  friend std::optional<Rational> is_rational_ratio(const FieldElement& x,
                                                   const FieldElement& y) {
    check_same(x, y);
    if (y.is_zero()) throw std::domain_error("ratio against zero");
    FieldElement q = x / y;
    if (!q.is_rational()) return std::nullopt;
    return q.a_;
  }

  // total order compatible with the real embedding sqrt(d) > 0
  friend bool operator<(const FieldElement& x, const FieldElement& y) {
    check_same(x, y);
    return (x - y).sign() < 0;
  }
  friend bool operator>(const FieldElement& x, const FieldElement& y) { return y < x; }
  friend bool operator<=(const FieldElement& x, const FieldElement& y) { return !(y < x); }
  friend bool operator>=(const FieldElement& x, const FieldElement& y) { return !(x < y); }

  // deterministic structural order (for map keys): by d, then a, then b
  static int structural_cmp(const FieldElement& x, const FieldElement& y) {
    if (x.d_ != y.d_) return x.d_ < y.d_ ? -1 : 1;
    int c = cmp(x.a_, y.a_);
    if (c != 0) return c;
    return cmp(x.b_, y.b_);
  }

  double to_double() const {
    double v = a_.get_d();
    if (b_ != 0) v += b_.get_d() * std::sqrt(static_cast<double>(d_));
    return v;
  }

 private:
  // GMP arithmetic on reduced operands yields reduced results, so values built
  // from existing members skip the boundary normalization
  struct reduced_t {};
  FieldElement(Rational a, Rational b, std::int64_t d, reduced_t)
      : a_(std::move(a)), b_(std::move(b)), d_(d) {}
  static FieldElement reduced(Rational a, Rational b, std::int64_t d) {
    return FieldElement(std::move(a), std::move(b), d, reduced_t{});
  }
  static void check_same(const FieldElement& x, const FieldElement& y) {
    if (x.d_ != y.d_) throw std::invalid_argument("mixed field specs");
  }
  Rational a_, b_;
  std::int64_t d_;
};

// --- text form -------------------------------------------------------------
//
//   elem     := term (('+'|'-') term)*
//   term     := rational | rational '*' 'r' | 'r'
//   rational := int ('/' posint)?
//
// 'r' stands for sqrt(d); whitespace is insignificant.

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(pos) + ": " + what),
        position(pos) {}
};

namespace detail {

class ElementParser {
 public:
  ElementParser(std::string_view text, FieldSpec spec) : text_(text), spec_(spec) {}

  FieldElement parse() {
    FieldElement acc = FieldElement::rational(Rational(0), spec_);
    skip_ws();
    if (eof()) throw ParseError(pos_, "empty element");
    bool negative = eat_sign_optional();
    acc += term(negative);
    skip_ws();
    while (!eof()) {
      char c = peek();
      if (c != '+' && c != '-') throw ParseError(pos_, "expected '+' or '-'");
      ++pos_;
      skip_ws();
      acc += term(c == '-');
      skip_ws();
    }
    return acc;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  bool eat_sign_optional() {
    if (!eof() && (peek() == '+' || peek() == '-')) {
      bool neg = peek() == '-';
      ++pos_;
      skip_ws();
      return neg;
    }
    return false;
  }

  FieldElement term(bool negative) {
    skip_ws();
    if (eof()) throw ParseError(pos_, "expected term");
    FieldElement t = [&] {
      if (peek() == 'r') {
        ++pos_;
        return FieldElement::sqrt_d(spec_);
      }
      Rational coeff = rational();
      skip_ws();
      if (!eof() && peek() == '*') {
        ++pos_;
        skip_ws();
        if (eof() || peek() != 'r') throw ParseError(pos_, "expected 'r' after '*'");
        ++pos_;
        return FieldElement(Rational(0), coeff, spec_);
      }
      return FieldElement::rational(coeff, spec_);
    }();
    return negative ? -t : t;
  }

  Rational rational() {
    Int num = integer(true);
    skip_ws();
    if (!eof() && peek() == '/') {
      ++pos_;
      skip_ws();
      Int den = integer(false);
      if (den <= 0) throw ParseError(pos_, "denominator must be positive");
      return make_rational(num, den);
    }
    return Rational(num);
  }

  Int integer(bool allow_sign) {
    skip_ws();
    std::size_t start = pos_;
    if (allow_sign && !eof() && (peek() == '+' || peek() == '-')) ++pos_;
    std::size_t digits_from = pos_;
    while (!eof() && peek() >= '0' && peek() <= '9') ++pos_;
    if (pos_ == digits_from) throw ParseError(pos_, "expected digits");
    return Int(std::string(text_.substr(start, pos_ - start)), 10);
  }

  std::string_view text_;
  FieldSpec spec_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FieldElement parse_field_element(std::string_view text, FieldSpec spec) {
  return detail::ElementParser(text, spec).parse();
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

// canonical printable form; parse(to_string(x)) == x
inline std::string to_string(const FieldElement& x) {
  if (x.b() == 0) return to_string(x.a());
  std::string radical;
  if (x.b() == 1) {
    radical = "r";
  } else if (x.b() == -1) {
    radical = "-r";
  } else {
    radical = to_string(x.b()) + "*r";
  }
  if (x.a() == 0) return radical;
  std::string head = to_string(x.a());
  if (radical.front() == '-') return head + radical;
  return head + "+" + radical;
}

}  // namespace hypdisc
