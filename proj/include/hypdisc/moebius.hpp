#pragma once

// SL2 / PSL2 over a real quadratic field: exact matrix arithmetic,
// isometry classification, elliptic orders, and free-group words.

#include <array>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hypdisc/numberfield.hpp"

namespace hypdisc {

// determinant-one 2x2 matrix over the field, row major
class GroupElement {
 public:
  GroupElement(FieldElement a, FieldElement b, FieldElement c, FieldElement d)
      : m_{std::move(a), std::move(b), std::move(c), std::move(d)} {
    check_field();
  }

  static GroupElement identity(FieldSpec spec) {
    FieldElement one = FieldElement::integer(1, spec);
    FieldElement zero = FieldElement::integer(0, spec);
    return GroupElement(one, zero, zero, one);
  }

  const FieldElement& a() const { return m_[0]; }
  const FieldElement& b() const { return m_[1]; }
  const FieldElement& c() const { return m_[2]; }
  const FieldElement& d() const { return m_[3]; }
  const FieldElement& entry(int i) const { return m_[i]; }
  FieldSpec spec() const { return m_[0].spec(); }

  FieldElement det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  FieldElement trace() const { return m_[0] + m_[3]; }

  void require_det_one() const {
    if (det() != FieldElement::integer(1, spec()))
      throw std::domain_error("matrix determinant is not 1");
  }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    return GroupElement(x.m_[0] * y.m_[0] + x.m_[1] * y.m_[2],
                        x.m_[0] * y.m_[1] + x.m_[1] * y.m_[3],
                        x.m_[2] * y.m_[0] + x.m_[3] * y.m_[2],
                        x.m_[2] * y.m_[1] + x.m_[3] * y.m_[3]);
  }

  // adjugate; the inverse because det == 1
  GroupElement inverse() const { return GroupElement(m_[3], -m_[1], -m_[2], m_[0]); }

  GroupElement negated() const { return GroupElement(-m_[0], -m_[1], -m_[2], -m_[3]); }

  friend bool operator==(const GroupElement& x, const GroupElement& y) {
    return x.m_ == y.m_;
  }
  friend bool operator!=(const GroupElement& x, const GroupElement& y) { return !(x == y); }

  bool is_identity() const {
    FieldSpec s = spec();
    return m_[0] == FieldElement::integer(1, s) && m_[1].is_zero() && m_[2].is_zero() &&
           m_[3] == FieldElement::integer(1, s);
  }

  static int structural_cmp(const GroupElement& x, const GroupElement& y) {
    for (int i = 0; i < 4; ++i) {
      int c = FieldElement::structural_cmp(x.m_[i], y.m_[i]);
      if (c != 0) return c;
    }
    return 0;
  }

 private:
  void check_field() const {
    FieldSpec s = m_[0].spec();
    for (int i = 1; i < 4; ++i)
      if (m_[i].spec() != s) throw std::invalid_argument("mixed field specs in matrix");
  }
  std::array<FieldElement, 4> m_;
};

// PSL2 element: sign-normalized SL2 representative.  The first nonzero entry
// in row-major order has positive sign.
class ProjectiveElement {
 public:
  explicit ProjectiveElement(GroupElement g) : rep_(normalize(std::move(g))) {}

  static ProjectiveElement identity(FieldSpec spec) {
    return ProjectiveElement(GroupElement::identity(spec));
  }

  const GroupElement& rep() const { return rep_; }
  FieldSpec spec() const { return rep_.spec(); }

  friend ProjectiveElement operator*(const ProjectiveElement& x, const ProjectiveElement& y) {
    return ProjectiveElement(x.rep_ * y.rep_);
  }
  ProjectiveElement inverse() const { return ProjectiveElement(rep_.inverse()); }

  friend bool operator==(const ProjectiveElement& x, const ProjectiveElement& y) {
    return x.rep_ == y.rep_;
  }
  friend bool operator!=(const ProjectiveElement& x, const ProjectiveElement& y) {
    return !(x == y);
  }

  bool is_identity() const { return rep_.is_identity(); }

  static int structural_cmp(const ProjectiveElement& x, const ProjectiveElement& y) {
    return GroupElement::structural_cmp(x.rep_, y.rep_);
  }
  friend bool operator<(const ProjectiveElement& x, const ProjectiveElement& y) {
    return structural_cmp(x, y) < 0;
  }

 private:
  static GroupElement normalize(GroupElement g) {
    for (int i = 0; i < 4; ++i) {
      int s = g.entry(i).sign();
      if (s > 0) return g;
      if (s < 0) return g.negated();
    }
    throw std::domain_error("zero matrix cannot be projectivized");
  }
  GroupElement rep_;
};

enum class IsometryClass { Identity, Elliptic, Parabolic, Hyperbolic };

inline IsometryClass classify(const ProjectiveElement& g) {
  if (g.is_identity()) return IsometryClass::Identity;
  FieldElement t = g.rep().trace();
  FieldElement four = FieldElement::integer(4, g.spec());
  int s = (t * t - four).sign();
  if (s < 0) return IsometryClass::Elliptic;
  if (s == 0) return IsometryClass::Parabolic;
  return IsometryClass::Hyperbolic;
}

inline const char* to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::Identity: return "identity";
    case IsometryClass::Elliptic: return "elliptic";
    case IsometryClass::Parabolic: return "parabolic";
    case IsometryClass::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

namespace detail {

// candidate finite orders by trace value, over fields of degree <= 2:
// 0 -> 2, +-1 -> 3, +-sqrt2 -> 4, (+-1+-sqrt5)/2 -> 5, +-sqrt3 -> 6
inline std::optional<int> admissible_order_from_trace(const FieldElement& t) {
  FieldSpec spec = t.spec();
  const Rational& a = t.a();
  const Rational& b = t.b();
  if (b == 0) {
    if (a == 0) return 2;
    if (a == 1 || a == -1) return 3;
    return std::nullopt;
  }
  if (a == 0 && (b == 1 || b == -1)) {
    if (spec.d == 2) return 4;
    if (spec.d == 3) return 6;
    return std::nullopt;
  }
  if (spec.d == 5 && (a == Rational(1, 2) || a == Rational(-1, 2)) &&
      (b == Rational(1, 2) || b == Rational(-1, 2)))
    return 5;
  return std::nullopt;
}

}  // namespace detail

inline ProjectiveElement projective_power(const ProjectiveElement& g, long n) {
  if (n < 0) return projective_power(g.inverse(), -n);
  ProjectiveElement acc = ProjectiveElement::identity(g.spec());
  ProjectiveElement base = g;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

inline GroupElement sl2_power(const GroupElement& g, long n) {
  if (n < 0) return sl2_power(g.inverse(), -n);
  GroupElement acc = GroupElement::identity(g.spec());
  GroupElement base = g;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

// order of an elliptic element in PSL2 when finite; empty for infinite order.
// pre: classify(g) == Elliptic
inline std::optional<int> elliptic_finite_order(const ProjectiveElement& g) {
  if (classify(g) != IsometryClass::Elliptic)
    throw std::invalid_argument("elliptic_finite_order on a non-elliptic element");
  std::optional<int> n = detail::admissible_order_from_trace(g.rep().trace());
  if (!n) return std::nullopt;
  // defensive: confirm the power really closes up
  if (!projective_power(g, *n).is_identity())
    throw std::logic_error("trace table order failed verification");
  return n;
}

// --- free-group words ------------------------------------------------------

// letter (gen, exp) with exp in {+1, -1}; a word is a letter list read
// left-to-right, and evaluation multiplies matrices in the same order.
struct Letter {
  int gen = 0;
  int exp = 1;
  friend bool operator==(const Letter& x, const Letter& y) {
    return x.gen == y.gen && x.exp == y.exp;
  }
  friend bool operator!=(const Letter& x, const Letter& y) { return !(x == y); }
  friend bool operator<(const Letter& x, const Letter& y) {
    if (x.gen != y.gen) return x.gen < y.gen;
    return x.exp > y.exp;  // positive exponent first
  }
  Letter inverse() const { return Letter{gen, -exp}; }
};

using Word = std::vector<Letter>;

inline Word word_inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

// free reduction in place of trailing context: append a letter, cancelling
inline void word_push(Word& w, const Letter& l) {
  if (!w.empty() && w.back() == l.inverse())
    w.pop_back();
  else
    w.push_back(l);
}

inline Word word_concat(const Word& x, const Word& y) {
  Word out = x;
  out.reserve(x.size() + y.size());
  for (const Letter& l : y) word_push(out, l);
  return out;
}

inline Word word_free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& l : w) word_push(out, l);
  return out;
}

inline Word word_power(const Word& w, long n) {
  Word base = n < 0 ? word_inverse(w) : w;
  long k = n < 0 ? -n : n;
  Word out;
  for (long i = 0; i < k; ++i) out = word_concat(out, base);
  return out;
}

// cyclic reduction: returns (core, conjugator) with w = conj * core * conj^-1
inline std::pair<Word, Word> cyclic_reduce(const Word& w0) {
  Word w = word_free_reduce(w0);
  Word conj;
  while (w.size() >= 2 && w.front() == w.back().inverse()) {
    conj.push_back(w.front());
    w.erase(w.begin());
    w.pop_back();
  }
  return {w, conj};
}

template <class Span>
inline ProjectiveElement word_evaluate(const Word& w, const Span& gens, FieldSpec spec) {
  ProjectiveElement acc = ProjectiveElement::identity(spec);
  for (const Letter& l : w) {
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= gens.size())
      throw std::out_of_range("word letter index outside generator list");
    const ProjectiveElement& g = gens[l.gen];
    acc = acc * (l.exp > 0 ? g : g.inverse());
  }
  return acc;
}

template <class Span>
inline GroupElement word_evaluate_sl2(const Word& w, const Span& gens, FieldSpec spec) {
  GroupElement acc = GroupElement::identity(spec);
  for (const Letter& l : w) {
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= gens.size())
      throw std::out_of_range("word letter index outside generator list");
    const GroupElement& g = gens[l.gen];
    acc = acc * (l.exp > 0 ? g : g.inverse());
  }
  return acc;
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (const Letter& l : w) {
    if (!s.empty()) s += '.';
    s += 'x' + std::to_string(l.gen);
    if (l.exp < 0) s += "^-1";
  }
  return s;
}

// substitute: rewrite a word over derived generators into a word over the
// base generators, given each derived generator's base word
inline Word word_substitute(const Word& w, const std::vector<Word>& tables) {
  Word out;
  for (const Letter& l : w) {
    if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= tables.size())
      throw std::out_of_range("substitution letter outside table");
    const Word& t = l.exp > 0 ? tables[l.gen] : word_inverse(tables[l.gen]);
    for (const Letter& m : t) word_push(out, m);
  }
  return out;
}

}  // namespace hypdisc
