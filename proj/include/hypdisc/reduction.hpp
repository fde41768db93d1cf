#pragma once

// Discreteness + torsion-freeness recognition for finitely generated
// subgroups of PSL2 over Q or Q(sqrt d), by shortening generating sets.
//
// The certificate always carries words over the ORIGINAL input list, so a
// verifier can replay every claim by exact matrix evaluation.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hypdisc/hyperbolic.hpp"
#include "hypdisc/moebius.hpp"
#include "hypdisc/numberfield.hpp"

namespace hypdisc {

struct IterationCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReduceConfig {
  long max_iterations = 100000;
  int commute_power_bound = 64;     // exponent window for same-axis dependence
  long factor_bound = 1000000;      // trial-division limit for exact certificates
  bool check_invariants = false;    // re-verify word provenance every iteration
  std::optional<Point> base;        // defaults to i
};

// generator with provenance: elem == evaluate(word, originals), surrogate of
// the displacement at the base point
struct GeneratorEntry {
  ProjectiveElement elem;
  Word word;
  DistSurrogate surrogate;
};

struct ShortWord {
  Word word;  // over current entry indices
  ProjectiveElement elem;
  DistSurrogate surrogate;
};

// --- cyclic order and eta --------------------------------------------------

struct Slot {
  Letter letter;
  Direction dir;
  DistSurrogate surrogate;
};

struct CyclicOrder {
  std::vector<Slot> slots;           // clockwise order
  std::vector<int> position;         // letter code -> slot index
  static int code(const Letter& l) { return 2 * l.gen + (l.exp < 0 ? 1 : 0); }
};

// clockwise order of the 2n signed letters by direction at the base point;
// shared rays break ties by increasing surrogate then (gen, exp).
// pre: no entry fixes the base point.
inline CyclicOrder compute_cyclic_order(const std::vector<GeneratorEntry>& entries,
                                        const Point& base) {
  FieldSpec spec = base.spec();
  Direction ref(FieldElement::integer(1, spec), FieldElement::integer(0, spec));
  std::vector<Slot> slots;
  slots.reserve(2 * entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (int exp : {+1, -1}) {
      ProjectiveElement g = exp > 0 ? entries[i].elem : entries[i].elem.inverse();
      Point img = act(g, base);
      if (img == base)
        throw std::invalid_argument("cyclic order undefined: entry fixes the base point");
      slots.push_back(Slot{Letter{static_cast<int>(i), exp}, direction_from(base, img),
                           dist_surrogate(base, img)});
    }
  }
  std::sort(slots.begin(), slots.end(), [&](const Slot& s1, const Slot& s2) {
    if (same_ray(s1.dir, s2.dir)) {
      if (s1.surrogate != s2.surrogate) return s1.surrogate < s2.surrogate;
      return s1.letter < s2.letter;
    }
    return cw_angle_less(ref, s1.dir, s2.dir);
  });
  CyclicOrder order;
  order.position.assign(2 * entries.size(), -1);
  for (std::size_t k = 0; k < slots.size(); ++k)
    order.position[CyclicOrder::code(slots[k].letter)] = static_cast<int>(k);
  order.slots = std::move(slots);
  return order;
}

// eta(x) = clockwise successor of x^-1
struct EtaPermutation {
  std::vector<Letter> image;  // indexed by letter code
  const Letter& operator()(const Letter& l) const { return image[CyclicOrder::code(l)]; }
};

inline EtaPermutation eta_permutation(const CyclicOrder& order) {
  EtaPermutation eta;
  int n = static_cast<int>(order.slots.size());
  eta.image.resize(n);
  for (const Slot& s : order.slots) {
    int pos_inv = order.position[CyclicOrder::code(s.letter.inverse())];
    eta.image[CyclicOrder::code(s.letter)] = order.slots[(pos_inv + 1) % n].letter;
  }
  return eta;
}

struct PrincipalWord {
  Word letters;
  ProjectiveElement matrix;
  int cycle_id;
};

namespace detail {

inline std::vector<std::vector<Letter>> eta_orbits(const EtaPermutation& eta, int ngen) {
  std::vector<bool> seen(2 * ngen, false);
  std::vector<std::vector<Letter>> orbits;
  for (int g = 0; g < ngen; ++g) {
    for (int exp : {+1, -1}) {
      Letter start{g, exp};
      if (seen[CyclicOrder::code(start)]) continue;
      std::vector<Letter> orbit;
      Letter cur = start;
      do {
        seen[CyclicOrder::code(cur)] = true;
        orbit.push_back(cur);
        cur = eta(cur);
      } while (cur != start);
      orbits.push_back(std::move(orbit));
    }
  }
  return orbits;
}

inline ProjectiveElement letter_matrix(const std::vector<GeneratorEntry>& entries,
                                       const Letter& l) {
  return l.exp > 0 ? entries[l.gen].elem : entries[l.gen].elem.inverse();
}

}  // namespace detail

// one principal word per starting signed letter; words in one eta-cycle are
// cyclic rotations of each other
inline std::vector<PrincipalWord> principal_words(const std::vector<GeneratorEntry>& entries,
                                                  const Point& base) {
  CyclicOrder order = compute_cyclic_order(entries, base);
  EtaPermutation eta = eta_permutation(order);
  auto orbits = detail::eta_orbits(eta, static_cast<int>(entries.size()));
  std::vector<PrincipalWord> out;
  FieldSpec spec = base.spec();
  for (std::size_t cid = 0; cid < orbits.size(); ++cid) {
    const auto& orbit = orbits[cid];
    std::size_t L = orbit.size();
    for (std::size_t s = 0; s < L; ++s) {
      Word letters;
      ProjectiveElement m = ProjectiveElement::identity(spec);
      for (std::size_t k = 0; k < L; ++k) {
        const Letter& l = orbit[(s + k) % L];
        letters.push_back(l);
        m = m * detail::letter_matrix(entries, l);
      }
      out.push_back(PrincipalWord{std::move(letters), std::move(m), static_cast<int>(cid)});
    }
  }
  return out;
}

namespace detail {

inline bool shorter_or_lex_less(const Word& w1, const Word& w2) {
  if (w1.size() != w2.size()) return w1.size() < w2.size();
  return std::lexicographical_compare(w1.begin(), w1.end(), w2.begin(), w2.end());
}

}  // namespace detail

// All nonempty contiguous subwords of all principal words, sorted by
// (surrogate, length, letters).  An eta-orbit visits distinct letters, so the
// subwords are pairwise distinct as words; matrices may repeat (see
// dedup_by_matrix).
inline std::vector<ShortWord> short_words(const std::vector<GeneratorEntry>& entries,
                                          const Point& base) {
  CyclicOrder order = compute_cyclic_order(entries, base);
  EtaPermutation eta = eta_permutation(order);
  auto orbits = detail::eta_orbits(eta, static_cast<int>(entries.size()));
  FieldSpec spec = base.spec();

  std::vector<ShortWord> out;
  for (const auto& orbit : orbits) {
    std::size_t L = orbit.size();
    for (std::size_t s = 0; s < L; ++s) {
      ProjectiveElement m = ProjectiveElement::identity(spec);
      Word w;
      for (std::size_t k = 0; k < L; ++k) {
        const Letter& l = orbit[(s + k) % L];
        w.push_back(l);
        m = m * detail::letter_matrix(entries, l);
        out.push_back(ShortWord{w, m, displacement_surrogate(m, base)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const ShortWord& x, const ShortWord& y) {
    if (x.surrogate != y.surrogate) return x.surrogate < y.surrogate;
    return detail::shorter_or_lex_less(x.word, y.word);
  });
  return out;
}

// one representative per projective matrix: the first in short-word order,
// i.e. minimal (surrogate, length, letters)
inline std::vector<ShortWord> dedup_by_matrix(const std::vector<ShortWord>& sorted) {
  std::vector<ShortWord> out;
  std::set<ProjectiveElement> seen;
  for (const ShortWord& h : sorted)
    if (seen.insert(h.elem).second) out.push_back(h);
  return out;
}

// closure under inversion, in the same sort order.  Point reduction needs
// moves in both directions, and displacement is symmetric, so the surrogate
// carries over.
inline std::vector<ShortWord> inverse_closure(const std::vector<ShortWord>& shorts) {
  std::vector<ShortWord> out = shorts;
  out.reserve(2 * shorts.size());
  for (const ShortWord& h : shorts)
    out.push_back(ShortWord{word_inverse(h.word), h.elem.inverse(), h.surrogate});
  std::sort(out.begin(), out.end(), [&](const ShortWord& x, const ShortWord& y) {
    if (x.surrogate != y.surrogate) return x.surrogate < y.surrogate;
    return detail::shorter_or_lex_less(x.word, y.word);
  });
  return out;
}

// --- commuting pairs -------------------------------------------------------

struct CommutingResolution {
  enum class Kind { NotAbelian, Cyclic, Indiscrete } kind;
  std::optional<GeneratorEntry> generator;  // Kind::Cyclic: <a,b> = <c>
  bool bounded = false;  // Indiscrete only: search bound hit without certificate
};

namespace detail {

inline std::pair<long, long> ext_gcd_pair(long p, long q) {
  // returns (u, w) with u p + w q == gcd; small inputs only
  long old_r = p, r = q, old_u = 1, u = 0, old_w = 0, w = 1;
  while (r != 0) {
    long quot = old_r / r;
    long t = old_r - quot * r; old_r = r; r = t;
    t = old_u - quot * u; old_u = u; u = t;
    t = old_w - quot * w; old_w = w; w = t;
  }
  if (old_r < 0) { old_u = -old_u; old_w = -old_w; }
  return {old_u, old_w};
}

inline ProjectiveElement word_pair_power(const GeneratorEntry& a, const GeneratorEntry& b,
                                         long u, long w) {
  return projective_power(a.elem, u) * projective_power(b.elem, w);
}

inline GeneratorEntry make_entry(ProjectiveElement elem, Word word, const Point& base) {
  DistSurrogate s = displacement_surrogate(elem, base);
  return GeneratorEntry{std::move(elem), std::move(word), std::move(s)};
}

// combination entry c = a^u b^w with provenance and defensive power checks
inline GeneratorEntry cyclic_combination(const GeneratorEntry& a, const GeneratorEntry& b,
                                         long u, long w, long pa, long pb,
                                         const Point& base) {
  ProjectiveElement c = word_pair_power(a, b, u, w);
  if (projective_power(c, pa) != a.elem || projective_power(c, pb) != b.elem)
    throw std::logic_error("cyclic combination failed power verification");
  Word word = word_concat(word_power(a.word, u), word_power(b.word, w));
  return make_entry(std::move(c), std::move(word), base);
}

// translation parameter of a parabolic fixing infinity: [[a,b],[0,a]] -> b/a
inline FieldElement upper_parabolic_param(const GroupElement& m) {
  if (m.c().sign() != 0) throw std::logic_error("parabolic not upper triangular");
  return m.b() / m.a();
}

// factor |q| into prime exponents; empty on failure (incomplete factorization)
inline std::optional<std::map<Int, long>> factor_exponents(Rational q, long bound) {
  std::map<Int, long> out;
  auto absorb = [&](Int n, int dir) -> bool {
    if (n < 0) n = -n;
    for (Int f = 2; f * f <= n && f <= bound;) {
      if (n % f == 0) {
        out[f] += dir;
        n /= f;
      } else {
        ++f;
      }
    }
    if (n > 1) {
      if (mpz_probab_prime_p(n.get_mpz_t(), 40) == 0) return false;
      out[n] += dir;
    }
    return true;
  };
  if (!absorb(q.get_num(), +1)) return std::nullopt;
  if (!absorb(q.get_den(), -1)) return std::nullopt;
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

// |eigenvalue| > 1 of a hyperbolic element, when it is rational
inline std::optional<Rational> rational_expanding_eigenvalue(const ProjectiveElement& g) {
  FieldElement t = g.rep().trace();
  if (!t.is_rational()) return std::nullopt;
  FieldElement disc = t * t - FieldElement::integer(4, g.spec());
  if (!disc.is_rational()) return std::nullopt;
  Rational dq = disc.a();
  if (sgn(dq) <= 0) return std::nullopt;
  if (!mpz_perfect_square_p(dq.get_num().get_mpz_t()) ||
      !mpz_perfect_square_p(dq.get_den().get_mpz_t()))
    return std::nullopt;
  Int sn, sd;
  mpz_sqrt(sn.get_mpz_t(), dq.get_num().get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), dq.get_den().get_mpz_t());
  Rational root = make_rational(sn, sd);
  Rational lam = (t.a() + root) / 2;
  Rational alam = abs(lam);
  if (alam <= 1) {
    lam = (t.a() - root) / 2;
    alam = abs(lam);
  }
  if (alam <= 1) return std::nullopt;
  return alam;
}

}  // namespace detail

// decide the structure of <a, b> when a and b commute (same fixed set):
// cyclic (with explicit generator and provenance) or indiscrete.
inline CommutingResolution resolve_commuting_pair(const GeneratorEntry& a,
                                                  const GeneratorEntry& b,
                                                  const Point& base,
                                                  const ReduceConfig& cfg) {
  if (a.elem * b.elem != b.elem * a.elem)
    return CommutingResolution{CommutingResolution::Kind::NotAbelian, std::nullopt, false};

  IsometryClass ca = classify(a.elem);
  IsometryClass cb = classify(b.elem);
  if (ca != cb)
    throw std::logic_error("commuting nontrivial elements of distinct classes");

  if (ca == IsometryClass::Parabolic) {
    // share a boundary fixed point; conjugate it to infinity and compare
    // translation parameters, whose ratio decides discreteness
    FieldSpec spec = a.elem.spec();
    GroupElement conj = GroupElement::identity(spec);
    if (a.elem.rep().c().sign() != 0) {
      FieldElement two = FieldElement::integer(2, spec);
      FieldElement f = (a.elem.rep().a() - a.elem.rep().d()) / (two * a.elem.rep().c());
      conj = GroupElement(FieldElement::integer(0, spec), FieldElement::integer(1, spec),
                          FieldElement::integer(-1, spec), f);  // z -> 1/(f - z)
    }
    GroupElement ua = conj * a.elem.rep() * conj.inverse();
    GroupElement ub = conj * b.elem.rep() * conj.inverse();
    FieldElement sa = detail::upper_parabolic_param(ua);
    FieldElement sb = detail::upper_parabolic_param(ub);
    std::optional<Rational> ratio = is_rational_ratio(sa, sb);
    if (!ratio)
      return CommutingResolution{CommutingResolution::Kind::Indiscrete, std::nullopt, false};
    // sa = (p/q) sb with gcd(p,q) = 1: <a,b> = <c>, a = c^p, b = c^q
    Int pz = ratio->get_num(), qz = ratio->get_den();
    if (!pz.fits_slong_p() || !qz.fits_slong_p())
      throw ResourceCapError("commensurability exponents exceed machine range");
    long p = pz.get_si(), q = qz.get_si();
    auto [u, w] = detail::ext_gcd_pair(p, q);
    return CommutingResolution{CommutingResolution::Kind::Cyclic,
                               detail::cyclic_combination(a, b, u, w, p, q, base), false};
  }

  if (ca == IsometryClass::Hyperbolic) {
    // same axis: discrete iff translation lengths are commensurable,
    // i.e. a^p = b^q for some integers
    long B = cfg.commute_power_bound;
    std::vector<ProjectiveElement> ap, bp, bn;
    ap.reserve(B); bp.reserve(B); bn.reserve(B);
    ProjectiveElement binv = b.elem.inverse();
    for (long k = 1; k <= B; ++k) {
      ap.push_back(k == 1 ? a.elem : ap.back() * a.elem);
      bp.push_back(k == 1 ? b.elem : bp.back() * b.elem);
      bn.push_back(k == 1 ? binv : bn.back() * binv);
    }
    std::optional<std::pair<long, long>> found;  // a^p == b^q, q signed
    for (long p = 1; p <= B && !found; ++p) {
      for (long q = 1; q <= B; ++q) {
        if (ap[p - 1] == bp[q - 1]) { found = {p, q}; break; }
        if (ap[p - 1] == bn[q - 1]) { found = {p, -q}; break; }
      }
    }
    if (!found) {
      // exact certificate in the rational-eigenvalue case: multiplicative
      // (in)dependence decided by prime factorization
      auto ra = detail::rational_expanding_eigenvalue(a.elem);
      auto rb = detail::rational_expanding_eigenvalue(b.elem);
      if (ra && rb) {
        auto va = detail::factor_exponents(*ra, cfg.factor_bound);
        auto vb = detail::factor_exponents(*rb, cfg.factor_bound);
        if (va && vb && !va->empty() && !vb->empty()) {
          // proportional exponent vectors <=> dependent
          const auto& [prime0, e0] = *vb->begin();
          long f0 = va->count(prime0) ? va->at(prime0) : 0;
          bool proportional = f0 != 0;
          if (proportional) {
            long g = std::gcd(std::abs(f0), std::abs(e0));
            long p = e0 / g, q = f0 / g;  // candidate a^p = b^(+-q)
            for (const auto& [pr, eb] : *vb) {
              long ea = va->count(pr) ? va->at(pr) : 0;
              if (ea * p != eb * q) { proportional = false; break; }
            }
            for (const auto& [pr, ea] : *va)
              if (!vb->count(pr) && ea != 0) { proportional = false; break; }
            if (proportional) {
              long pp = std::abs(p), qq = std::abs(q);
              if (projective_power(a.elem, pp) == projective_power(b.elem, qq))
                found = {pp, qq};
              else if (projective_power(a.elem, pp) == projective_power(b.elem, -qq))
                found = {pp, -qq};
              else
                throw std::logic_error("proportional translation lengths without relation");
            }
          }
          if (!found)  // length ratio certified irrational
            return CommutingResolution{CommutingResolution::Kind::Indiscrete, std::nullopt,
                                       false};
        }
      }
      if (!found)
        return CommutingResolution{CommutingResolution::Kind::Indiscrete, std::nullopt, true};
    }
    auto [p, q] = *found;
    long g = std::gcd(p, std::abs(q));
    long pp = p / g, qp = q / g;  // primitive relation a^pp = b^qp
    if (projective_power(a.elem, pp) != projective_power(b.elem, qp))
      throw std::logic_error("primitive power relation failed");
    // a = c^|qp|-ish: with lengths la = (qp/pp) lb, c = a^u b^w where
    // u qp + w pp = 1; then c^qp = a and c^pp = b
    auto [u, w] = detail::ext_gcd_pair(qp, pp);
    return CommutingResolution{CommutingResolution::Kind::Cyclic,
                               detail::cyclic_combination(a, b, u, w, qp, pp, base), false};
  }

  // elliptic: common fixed point; discrete iff both rotations have finite
  // order, and then <a,b> is cyclic of order lcm
  std::optional<int> na = elliptic_finite_order(a.elem);
  std::optional<int> nb = elliptic_finite_order(b.elem);
  if (!na || !nb)
    return CommutingResolution{CommutingResolution::Kind::Indiscrete, std::nullopt, false};
  long N = std::lcm<long>(*na, *nb);
  for (long i = 0; i < *na; ++i) {
    for (long j = 0; j < *nb; ++j) {
      if (i == 0 && j == 0) continue;
      ProjectiveElement g = detail::word_pair_power(a, b, i, j);
      if (g.is_identity() || classify(g) != IsometryClass::Elliptic) continue;
      std::optional<int> ng = elliptic_finite_order(g);
      if (!ng || *ng != N) continue;
      // find the exponents sending c to a and b
      long ea = -1, eb = -1;
      ProjectiveElement pw = ProjectiveElement::identity(g.spec());
      for (long e = 0; e < N; ++e) {
        if (pw == a.elem && ea < 0) ea = e;
        if (pw == b.elem && eb < 0) eb = e;
        pw = pw * g;
      }
      if (ea < 0 || eb < 0) continue;
      Word word = word_concat(word_power(a.word, i), word_power(b.word, j));
      GeneratorEntry c = detail::make_entry(g, std::move(word), base);
      if (projective_power(g, ea) != a.elem || projective_power(g, eb) != b.elem)
        throw std::logic_error("elliptic combination failed power verification");
      return CommutingResolution{CommutingResolution::Kind::Cyclic, std::move(c), false};
    }
  }
  throw std::logic_error("commuting finite rotations admit no lcm generator");
}

// --- good replacements -----------------------------------------------------

struct GoodReplacement {
  int target;       // index being replaced
  ShortWord by;     // strictly shorter substitute containing the target once
};

inline std::optional<GoodReplacement> find_good_replacement(
    const std::vector<GeneratorEntry>& entries, const std::vector<ShortWord>& shorts) {
  for (const ShortWord& h : shorts) {  // sorted by surrogate already
    std::vector<int> count(entries.size(), 0);
    for (const Letter& l : h.word) ++count[l.gen];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (count[i] != 1) continue;
      if (h.word.size() == 1 && static_cast<std::size_t>(h.word[0].gen) == i) continue;
      if (h.surrogate < entries[i].surrogate)
        return GoodReplacement{static_cast<int>(i), h};
    }
  }
  return std::nullopt;
}

// --- certificates ----------------------------------------------------------

struct DiscreteTorsionFreeCert {
  std::vector<GeneratorEntry> entries;  // reduced set, words over the input list
};

struct EllipticCert {
  Word word;
  ProjectiveElement elem;
  std::optional<int> order;  // empty: infinite-order rotation
};

enum class IndiscreteReason { AbelianIncommensurable, CollarViolation };

struct IndiscreteCert {
  IndiscreteReason reason;
  Word word1;
  ProjectiveElement elem1;
  Word word2;
  ProjectiveElement elem2;
  bool bounded_search = false;
};

using Certificate = std::variant<DiscreteTorsionFreeCert, EllipticCert, IndiscreteCert>;

inline bool is_discrete_certificate(const Certificate& c) {
  return std::holds_alternative<DiscreteTorsionFreeCert>(c);
}

// --- the recognizer --------------------------------------------------------

namespace detail {

inline void check_provenance(const std::vector<GeneratorEntry>& entries,
                             const std::vector<ProjectiveElement>& originals,
                             const Point& base, FieldSpec spec) {
  for (const GeneratorEntry& e : entries) {
    if (word_evaluate(e.word, originals, spec) != e.elem)
      throw std::logic_error("provenance invariant broken: word does not evaluate to elem");
    if (displacement_surrogate(e.elem, base) != e.surrogate)
      throw std::logic_error("provenance invariant broken: stale surrogate");
  }
}

inline EllipticCert elliptic_from_entry(const GeneratorEntry& e) {
  std::optional<int> order = elliptic_finite_order(e.elem);
  return EllipticCert{e.word, e.elem, order};
}

}  // namespace detail

// Decides whether <X> is discrete and torsion-free. On success the reduced
// entries generate the same group and carry words over the input list; on
// failure the certificate pins an exact obstruction.
inline Certificate recognize_torsion_free(const std::vector<ProjectiveElement>& input,
                                          const ReduceConfig& cfg = {}) {
  if (input.empty()) return DiscreteTorsionFreeCert{};
  FieldSpec spec = input.front().spec();
  for (const auto& g : input)
    if (g.spec() != spec) throw std::invalid_argument("mixed field specs in generator list");
  Point base = cfg.base.value_or(base_point(spec));

  std::vector<GeneratorEntry> entries;
  entries.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i)
    entries.push_back(GeneratorEntry{input[i], Word{Letter{static_cast<int>(i), +1}},
                                     displacement_surrogate(input[i], base)});

  for (long iter = 0; iter < cfg.max_iterations; ++iter) {
    if (cfg.check_invariants) detail::check_provenance(entries, input, base, spec);

    // strip projective identities
    std::erase_if(entries, [](const GeneratorEntry& e) { return e.elem.is_identity(); });

    // a nontrivial element fixing the base point is elliptic
    for (const GeneratorEntry& e : entries)
      if (e.surrogate.t.sign() == 0) return detail::elliptic_from_entry(e);

    // x == x^-1 means an order-2 rotation
    for (const GeneratorEntry& e : entries)
      if (e.elem.inverse() == e.elem) return detail::elliptic_from_entry(e);

    // no inverse pairs (condition A1): drop the later of the two
    {
      bool removed = false;
      for (std::size_t i = 0; i < entries.size() && !removed; ++i) {
        for (std::size_t j = i + 1; j < entries.size() && !removed; ++j) {
          if (entries[i].elem.inverse() == entries[j].elem) {
            entries.erase(entries.begin() + j);
            removed = true;
          }
        }
      }
      if (removed) continue;
    }

    if (entries.empty()) return DiscreteTorsionFreeCert{};
    if (entries.size() == 1) {
      if (classify(entries[0].elem) == IsometryClass::Elliptic)
        return detail::elliptic_from_entry(entries[0]);
      return DiscreteTorsionFreeCert{std::move(entries)};
    }

    // the two smallest displacements
    std::size_t ia = 0;
    for (std::size_t i = 1; i < entries.size(); ++i)
      if (entries[i].surrogate < entries[ia].surrogate) ia = i;
    std::size_t ib = ia == 0 ? 1 : 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i == ia) continue;
      if (entries[i].surrogate < entries[ib].surrogate) ib = i;
    }
    const GeneratorEntry& a = entries[ia];
    const GeneratorEntry& b = entries[ib];

    CommutingResolution res = resolve_commuting_pair(a, b, base, cfg);
    if (res.kind == CommutingResolution::Kind::Indiscrete)
      return IndiscreteCert{IndiscreteReason::AbelianIncommensurable, a.word, a.elem, b.word,
                            b.elem, res.bounded};
    if (res.kind == CommutingResolution::Kind::Cyclic) {
      std::size_t lo = std::min(ia, ib), hi = std::max(ia, ib);
      entries[lo] = std::move(*res.generator);
      entries.erase(entries.begin() + hi);
      continue;
    }

    std::vector<ShortWord> shorts = short_words(entries, base);

    // torsion shows up as an elliptic short word (condition A2)
    for (const ShortWord& h : shorts) {
      if (classify(h.elem) == IsometryClass::Elliptic) {
        Word over_input;
        {
          std::vector<Word> tables;
          for (const GeneratorEntry& e : entries) tables.push_back(e.word);
          over_input = word_substitute(h.word, tables);
        }
        EllipticCert cert{std::move(over_input), h.elem, elliptic_finite_order(h.elem)};
        return cert;
      }
    }

    // collar violation: the shortest nontrivial short word against b
    const ShortWord* g = nullptr;
    for (const ShortWord& h : shorts)
      if (!h.elem.is_identity()) { g = &h; break; }
    if (g != nullptr && phi_product_lt_one(g->surrogate, b.surrogate)) {
      const GeneratorEntry* c = &a;
      if (a.elem * g->elem == g->elem * a.elem) c = &b;
      if (c->elem * g->elem == g->elem * c->elem)
        throw std::logic_error("short word commutes with both of the smallest pair");
      std::vector<Word> tables;
      for (const GeneratorEntry& e : entries) tables.push_back(e.word);
      return IndiscreteCert{IndiscreteReason::CollarViolation, c->word, c->elem,
                            word_substitute(g->word, tables), g->elem, false};
    }

    std::optional<GoodReplacement> rep = find_good_replacement(entries, shorts);
    if (!rep) return DiscreteTorsionFreeCert{std::move(entries)};

    std::vector<Word> tables;
    for (const GeneratorEntry& e : entries) tables.push_back(e.word);
    GeneratorEntry fresh{rep->by.elem, word_substitute(rep->by.word, tables),
                         rep->by.surrogate};
    entries[rep->target] = std::move(fresh);
  }
  throw IterationCapError("reduction iteration cap exceeded");
}

}  // namespace hypdisc
