#pragma once

// Upper half-plane geometry with K-rational points, all predicates exact.
//
// Distances never appear directly: every comparison goes through the
// squared-tanh surrogate t(w,z) = |z-w|^2 / |z-wbar|^2, a strictly
// increasing function of the hyperbolic distance.

#include <optional>
#include <stdexcept>
#include <utility>

#include "hypdisc/moebius.hpp"
#include "hypdisc/numberfield.hpp"

namespace hypdisc {

struct Point {
  FieldElement x, y;
  Point(FieldElement px, FieldElement py) : x(std::move(px)), y(std::move(py)) {
    if (y.sign() <= 0) throw std::domain_error("point not in the upper half-plane");
    if (x.spec() != y.spec()) throw std::invalid_argument("mixed field specs in point");
  }
  FieldSpec spec() const { return x.spec(); }
  friend bool operator==(const Point& p, const Point& q) { return p.x == q.x && p.y == q.y; }
  friend bool operator!=(const Point& p, const Point& q) { return !(p == q); }
};

inline Point base_point(FieldSpec spec) {
  return Point(FieldElement::integer(0, spec), FieldElement::integer(1, spec));
}

// squared tanh of half the distance; in [0,1), 0 iff w == z
struct DistSurrogate {
  FieldElement t;
  explicit DistSurrogate(FieldElement v) : t(std::move(v)) {}
  friend bool operator==(const DistSurrogate& a, const DistSurrogate& b) { return a.t == b.t; }
  friend bool operator!=(const DistSurrogate& a, const DistSurrogate& b) { return !(a == b); }
  friend bool operator<(const DistSurrogate& a, const DistSurrogate& b) { return a.t < b.t; }
  friend bool operator<=(const DistSurrogate& a, const DistSurrogate& b) { return !(b < a); }
};

inline DistSurrogate dist_surrogate(const Point& w, const Point& z) {
  FieldElement dx = z.x - w.x;
  FieldElement dy = z.y - w.y;
  FieldElement sy = z.y + w.y;
  FieldElement num = dx * dx + dy * dy;
  FieldElement den = dx * dx + sy * sy;
  return DistSurrogate(num / den);
}

inline Point act(const ProjectiveElement& g, const Point& z) {
  const GroupElement& m = g.rep();
  FieldElement p = m.a() * z.x + m.b();   // Re of numerator
  FieldElement q = m.c() * z.x + m.d();   // Re of denominator
  FieldElement ay = m.a() * z.y;
  FieldElement cy = m.c() * z.y;
  FieldElement delta = q * q + cy * cy;
  if (delta.sign() == 0) throw std::logic_error("Moebius action denominator vanished");
  // det == 1 collapses the imaginary part to y / delta
  FieldElement nx = (p * q + ay * cy) / delta;
  FieldElement ny = z.y / delta;
  return Point(nx, ny);
}

inline DistSurrogate displacement_surrogate(const ProjectiveElement& g, const Point& base) {
  return dist_surrogate(base, act(g, base));
}

// Phi(|g|) Phi(|h|) < 1 in surrogate form: t_g + t_h < 1
inline bool phi_product_lt_one(const DistSurrogate& tg, const DistSurrogate& th) {
  FieldElement sum = tg.t + th.t;
  return (sum - FieldElement::integer(1, sum.spec())).sign() < 0;
}

// --- directions at a base point -------------------------------------------

// image direction of p seen from c after the Cayley transform sending c to
// the disk centre; stored up to positive scale
struct Direction {
  FieldElement u, w;
  Direction(FieldElement du, FieldElement dw) : u(std::move(du)), w(std::move(dw)) {
    if (u.sign() == 0 && w.sign() == 0)
      throw std::domain_error("zero direction");
  }
  friend bool same_ray(const Direction& d1, const Direction& d2) {
    // proportional with positive factor: cross == 0 and dot > 0
    FieldElement cross = d1.u * d2.w - d1.w * d2.u;
    if (cross.sign() != 0) return false;
    FieldElement dot = d1.u * d2.u + d1.w * d2.w;
    return dot.sign() > 0;
  }
};

inline Direction direction_from(const Point& c, const Point& p) {
  if (p == c) throw std::invalid_argument("direction of a point from itself");
  FieldElement a = p.x - c.x;
  FieldElement b = p.y - c.y;
  FieldElement bp = p.y + c.y;
  // (p - c)/(p - conj c) up to the positive factor |p - conj c|^2
  FieldElement u = a * a + b * bp;
  FieldElement w = -(a + a) * c.y;
  return Direction(std::move(u), std::move(w));
}

namespace detail {

// class of the clockwise angle from ref to p: 0 at ref, 1 in (0,pi),
// 2 at pi, 3 in (pi,2pi)
inline int cw_sector(const Direction& ref, const Direction& p) {
  FieldElement cross = ref.u * p.w - ref.w * p.u;
  int cs = cross.sign();
  if (cs < 0) return 1;
  if (cs > 0) return 3;
  FieldElement dot = ref.u * p.u + ref.w * p.w;
  return dot.sign() > 0 ? 0 : 2;
}

}  // namespace detail

// strict comparison of clockwise angles from ref: true iff cw(ref->p) < cw(ref->q)
inline bool cw_angle_less(const Direction& ref, const Direction& p, const Direction& q) {
  int sp = detail::cw_sector(ref, p);
  int sq = detail::cw_sector(ref, q);
  if (sp != sq) return sp < sq;
  if (sp == 0 || sp == 2) return false;  // equal angles
  FieldElement cross = p.u * q.w - p.w * q.u;
  return cross.sign() < 0;
}

// ternary clockwise betweenness: starting at d1 and sweeping clockwise,
// d2 strictly precedes d3
inline bool cw_cyclic_cmp(const Direction& d1, const Direction& d2, const Direction& d3) {
  return cw_angle_less(d1, d2, d3);
}

// --- geodesics -------------------------------------------------------------

// alpha (x^2 + y^2) + beta x + gamma = 0; vertical line when alpha == 0.
// When used as a half-plane side the orientation matters: inside is
// negative form value.
struct Geodesic {
  FieldElement alpha, beta, gamma;
  Geodesic(FieldElement a, FieldElement b, FieldElement c)
      : alpha(std::move(a)), beta(std::move(b)), gamma(std::move(c)) {
    validate();
  }

  void validate() const {
    if (alpha.sign() == 0) {
      if (beta.sign() == 0) throw std::domain_error("degenerate geodesic");
      return;
    }
    FieldElement disc = beta * beta - FieldElement::integer(4, alpha.spec()) * alpha * gamma;
    if (disc.sign() <= 0) throw std::domain_error("circle does not meet the upper half-plane");
  }

  friend bool operator==(const Geodesic& g, const Geodesic& h) {
    return g.alpha == h.alpha && g.beta == h.beta && g.gamma == h.gamma;
  }
};

namespace detail {

inline Rational content_gcd(const Rational& x, const Rational& y) {
  // gcd of numerators over lcm of denominators; canonical positive
  Int gn, gd;
  mpz_gcd(gn.get_mpz_t(), x.get_num().get_mpz_t(), y.get_num().get_mpz_t());
  mpz_lcm(gd.get_mpz_t(), x.get_den().get_mpz_t(), y.get_den().get_mpz_t());
  return make_rational(gn, gd);
}

}  // namespace detail

// scale by a positive rational so the six rational coordinates are coprime
// integers; orientation (sign pattern) is preserved
inline Geodesic scale_primitive(const Geodesic& g) {
  Rational content(0);
  for (const FieldElement* e : {&g.alpha, &g.beta, &g.gamma}) {
    content = detail::content_gcd(content, e->a());
    content = detail::content_gcd(content, e->b());
  }
  if (content == 0) throw std::domain_error("degenerate geodesic");
  FieldElement f = FieldElement::rational(Rational(1) / content, g.alpha.spec());
  return Geodesic(g.alpha * f, g.beta * f, g.gamma * f);
}

// perpendicular bisector of {c, q}, oriented so the form is negative at c
inline Geodesic bisector(const Point& c, const Point& q) {
  if (c == q) throw std::invalid_argument("bisector of equal points");
  FieldElement alpha = q.y - c.y;
  FieldElement two = FieldElement::integer(2, c.spec());
  FieldElement beta = two * (q.x * c.y - c.x * q.y);
  FieldElement nc = c.x * c.x + c.y * c.y;
  FieldElement nq = q.x * q.x + q.y * q.y;
  FieldElement gamma = q.y * nc - c.y * nq;
  return scale_primitive(Geodesic(std::move(alpha), std::move(beta), std::move(gamma)));
}

enum class Side { Inside, Boundary, Outside };

inline FieldElement geodesic_form(const Geodesic& g, const Point& p) {
  return g.alpha * (p.x * p.x + p.y * p.y) + g.beta * p.x + g.gamma;
}

inline Side halfplane_contains(const Geodesic& g, const Point& p) {
  int s = geodesic_form(g, p).sign();
  if (s < 0) return Side::Inside;
  if (s == 0) return Side::Boundary;
  return Side::Outside;
}

// translation axis of a hyperbolic element [[a,b],[c,d]]:
// c (x^2+y^2) + (d - a) x - b = 0, sign-normalized (unoriented curve)
inline Geodesic hyperbolic_axis(const ProjectiveElement& g) {
  if (classify(g) != IsometryClass::Hyperbolic)
    throw std::invalid_argument("axis of a non-hyperbolic element");
  const GroupElement& m = g.rep();
  Geodesic ax(m.c(), m.d() - m.a(), -m.b());
  Geodesic prim = scale_primitive(ax);
  // canonical sign for the unoriented curve: first nonzero coefficient positive
  for (const FieldElement* e : {&prim.alpha, &prim.beta, &prim.gamma}) {
    int s = e->sign();
    if (s > 0) return prim;
    if (s < 0) return Geodesic(-prim.alpha, -prim.beta, -prim.gamma);
  }
  throw std::logic_error("axis normalization failed");
}

// boundary fixed point of a parabolic element; empty means the point at infinity
inline std::optional<FieldElement> parabolic_fixed_point(const ProjectiveElement& g) {
  if (classify(g) != IsometryClass::Parabolic)
    throw std::invalid_argument("parabolic fixed point of a non-parabolic element");
  const GroupElement& m = g.rep();
  if (m.c().sign() == 0) return std::nullopt;
  FieldElement two = FieldElement::integer(2, g.spec());
  return (m.a() - m.d()) / (two * m.c());
}

}  // namespace hypdisc
