#pragma once

// Constructive membership for discrete torsion-free subgroups of (P)SL2.
//
// A ReducedGroup packages the output of recognize_torsion_free together with
// everything point reduction needs: the reduced generators, their short words,
// and the sign data that distinguishes the SL2 group from its projective image.
// Membership queries return exact word certificates over the *original*
// generator list, so a caller can re-evaluate the word and confirm the answer
// independently.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "hypdisc/hyperbolic.hpp"
#include "hypdisc/moebius.hpp"
#include "hypdisc/numberfield.hpp"
#include "hypdisc/reduction.hpp"

namespace hypdisc {

struct ReducedGroup {
  FieldSpec spec;
  Point base;
  // projective inputs and their SL2 representatives, in query-certificate order
  std::vector<ProjectiveElement> originals;
  std::vector<GroupElement> sl_originals;
  // reduced generating set; entry words are over the originals
  std::vector<GeneratorEntry> entries;
  // SL2 value of each entry word, the reference lift of the reduced basis
  std::vector<GroupElement> sl_entries;
  // short words of the reduced set, one per matrix; words use reduced indices
  std::vector<ShortWord> shorts;
  // engaged when some defining cycle closes up into a relation of the
  // generators (the group is then cocompact); word uses reduced indices
  std::optional<Word> relator;
  // word over the originals evaluating to -I in SL2, when -I is in the group
  std::optional<Word> minus_word;

  std::size_t rank() const { return entries.size(); }

  // rewrite a word over reduced indices as a word over the originals
  Word to_original_word(const Word& w) const {
    std::vector<Word> table;
    table.reserve(entries.size());
    for (const auto& e : entries) table.push_back(e.word);
    return word_substitute(w, table);
  }
};

// --- point reduction -------------------------------------------------------

// g maps the query point into the closed fundamental domain; word spells g
// over the reduced generators
struct ReducedPoint {
  Point point;
  ProjectiveElement g;
  Word word;
};

struct ReduceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// strictly smaller (x, y) in the lexicographic sense; used to pick a canonical
// representative among orbit points at equal distance from the base
inline bool point_lex_less(const Point& p, const Point& q) {
  if (p.x != q.x) return p.x < q.x;
  return p.y < q.y;
}

}  // namespace detail

// Pull p into the closed Dirichlet domain about the base point by greedy
// distance descent over the short words, then canonicalize among same-distance
// orbit points so equal orbits reduce to equal points.
inline ReducedPoint reduce_to_domain(const ReducedGroup& rg, const Point& p,
                                     long max_steps = 100000) {
  ReducedPoint cur{p, ProjectiveElement::identity(rg.spec), {}};
  if (rg.shorts.empty()) return cur;

  long steps = 0;
  for (;;) {
    DistSurrogate best = dist_surrogate(rg.base, cur.point);
    const ShortWord* move = nullptr;
    Point best_pt = cur.point;
    for (const ShortWord& h : rg.shorts) {
      Point moved = act(h.elem, cur.point);
      DistSurrogate t = dist_surrogate(rg.base, moved);
      if (t < best) {
        best = t;
        move = &h;
        best_pt = moved;
      }
    }
    if (!move) break;
    if (++steps > max_steps) throw ReduceCapError("point reduction exceeded step cap");
    cur.point = best_pt;
    cur.g = move->elem * cur.g;
    cur.word = word_concat(move->word, cur.word);
  }

  // ties: walk to the lexicographically least orbit point on the sphere
  for (;;) {
    DistSurrogate here = dist_surrogate(rg.base, cur.point);
    const ShortWord* move = nullptr;
    Point best_pt = cur.point;
    for (const ShortWord& h : rg.shorts) {
      Point moved = act(h.elem, cur.point);
      if (dist_surrogate(rg.base, moved) == here &&
          detail::point_lex_less(moved, best_pt)) {
        move = &h;
        best_pt = moved;
      }
    }
    if (!move) break;
    if (++steps > max_steps) throw ReduceCapError("point reduction exceeded step cap");
    cur.point = best_pt;
    cur.g = move->elem * cur.g;
    cur.word = word_concat(move->word, cur.word);
  }
  return cur;
}

// --- membership ------------------------------------------------------------

struct MembershipResult {
  bool member = false;
  // certificate over the original generators; evaluates to the query exactly
  // (projectively for projective queries, in SL2 for SL2 queries)
  std::optional<Word> word;
};

// q in the projective group?  Reduce q(base): the orbit of the base meets the
// closed domain only at the base itself, and the stabilizer is trivial, so
// membership holds exactly when the composed map is the identity.
inline MembershipResult is_member(const ReducedGroup& rg, const ProjectiveElement& q,
                                  long max_steps = 100000) {
  if (q.spec() != rg.spec) throw std::invalid_argument("mixed field specs");
  ReducedPoint r = reduce_to_domain(rg, act(q, rg.base), max_steps);
  if (!(r.g * q).is_identity()) return {};
  MembershipResult out;
  out.member = true;
  out.word = rg.to_original_word(word_inverse(r.word));
  return out;
}

// --- group assembly --------------------------------------------------------

// Assemble the query structure from a recognition certificate.  sl_gens and
// the certificate must describe the same input list, in the same order.
//
// Whether -I belongs to the SL2 group is decided exactly.  Every word over the
// originals that is projectively trivial reduces, modulo free cancellation, to
// a product of conjugates of (a) rewriting relations "original = its word over
// the reduced basis" and (b) the defining relation in the cocompact case.  The
// SL2 value of such a word is +-I and multiplies along products, so -I is in
// the group exactly when one of those finitely many relations carries sign -1.
inline ReducedGroup build_reduced_group(const std::vector<GroupElement>& sl_gens,
                                        const DiscreteTorsionFreeCert& cert,
                                        long max_steps = 100000) {
  if (sl_gens.empty() && !cert.entries.empty())
    throw std::invalid_argument("certificate refers to generators not supplied");
  FieldSpec spec = sl_gens.empty() ? FieldSpec(1) : sl_gens.front().spec();
  for (const auto& g : sl_gens) {
    g.require_det_one();
    if (g.spec() != spec) throw std::invalid_argument("mixed field specs");
  }

  ReducedGroup rg{spec,         base_point(spec), {}, sl_gens,     cert.entries,
                  {},           {},               std::nullopt,
                  std::nullopt};
  rg.originals.reserve(sl_gens.size());
  for (const auto& g : sl_gens) rg.originals.emplace_back(g);

  // consistency: every certificate word must reproduce its matrix
  for (const auto& e : rg.entries) {
    if (word_evaluate(e.word, rg.originals, spec) != e.elem)
      throw std::invalid_argument("certificate words do not match the generators");
    rg.sl_entries.push_back(word_evaluate_sl2(e.word, sl_gens, spec));
  }

  if (!rg.entries.empty()) {
    // short words are computed over the reduced set viewed as fresh generators
    std::vector<GeneratorEntry> fresh;
    fresh.reserve(rg.entries.size());
    for (std::size_t i = 0; i < rg.entries.size(); ++i)
      fresh.push_back(GeneratorEntry{rg.entries[i].elem,
                                     Word{Letter{static_cast<int>(i), +1}},
                                     rg.entries[i].surrogate});
    rg.shorts = dedup_by_matrix(inverse_closure(short_words(fresh, rg.base)));

    // a defining cycle whose word evaluates to the identity is the single
    // relation of a cocompact surface group; otherwise the group is free and
    // projectively trivial words are freely trivial
    for (const auto& pw : principal_words(fresh, rg.base)) {
      if (pw.matrix.is_identity()) {
        rg.relator = pw.letters;
        break;
      }
    }
  }

  GroupElement minus_one = GroupElement::identity(spec).negated();

  // sign of the defining relation
  if (rg.relator) {
    GroupElement rel = word_evaluate_sl2(*rg.relator, rg.sl_entries, spec);
    if (rel == minus_one) {
      rg.minus_word = rg.to_original_word(*rg.relator);
    } else if (!rel.is_identity()) {
      throw std::logic_error("defining relation does not evaluate to +-I");
    }
  }

  // signs of the rewriting relations: compare each original with the SL2
  // value of its expression over the reduced basis
  for (std::size_t i = 0; !rg.minus_word && i < rg.originals.size(); ++i) {
    ReducedPoint r = reduce_to_domain(rg, act(rg.originals[i], rg.base), max_steps);
    if (!(r.g * rg.originals[i]).is_identity())
      throw std::invalid_argument("certificate does not cover a supplied generator");
    Word expr = word_inverse(r.word);  // over reduced indices
    GroupElement lifted = word_evaluate_sl2(expr, rg.sl_entries, spec);
    if (lifted == sl_gens[i]) continue;
    if (lifted != sl_gens[i].negated())
      throw std::logic_error("rewriting relation does not evaluate to +-I");
    rg.minus_word = word_concat(Word{Letter{static_cast<int>(i), +1}},
                                word_inverse(rg.to_original_word(expr)));
  }

  if (rg.minus_word &&
      word_evaluate_sl2(*rg.minus_word, sl_gens, spec) != minus_one)
    throw std::logic_error("-I witness fails to evaluate to -I");
  return rg;
}

// q in the SL2 group?  Decide the projective class first, then fix the sign:
// the kernel of the projection is trivial unless -I has a word, so the SL2
// evaluation of the certificate either matches q, or composes with the -I
// word, or certifies non-membership.
inline MembershipResult is_member_sl2(const ReducedGroup& rg, const GroupElement& q,
                                      long max_steps = 100000) {
  q.require_det_one();
  MembershipResult proj = is_member(rg, ProjectiveElement(q), max_steps);
  if (!proj.member) return {};
  GroupElement got = word_evaluate_sl2(*proj.word, rg.sl_originals, rg.spec);
  if (got == q) return proj;
  if (got != q.negated())
    throw std::logic_error("projective certificate does not lift to +-query");
  // got == -q: append a -I word when the group has one
  if (!rg.minus_word) return {};
  MembershipResult out;
  out.member = true;
  out.word = word_concat(*proj.word, *rg.minus_word);
  return out;
}

// Either a ready-to-query group or the certificate explaining why the input
// group has no torsion-free discrete structure to query.
using PreparedGroup = std::variant<ReducedGroup, EllipticCert, IndiscreteCert>;

inline PreparedGroup prepare_group(const std::vector<GroupElement>& sl_gens,
                                   const ReduceConfig& cfg = {}) {
  std::vector<ProjectiveElement> projs;
  projs.reserve(sl_gens.size());
  for (const auto& g : sl_gens) {
    g.require_det_one();
    projs.emplace_back(g);
  }
  Certificate cert = recognize_torsion_free(projs, cfg);
  if (auto* ok = std::get_if<DiscreteTorsionFreeCert>(&cert))
    return build_reduced_group(sl_gens, *ok, cfg.max_iterations);
  if (auto* ell = std::get_if<EllipticCert>(&cert)) return *ell;
  return std::get<IndiscreteCert>(cert);
}

// mutual inclusion of SL2 groups, each generator checked with a certificate
inline bool sl2_subgroup_of(const std::vector<GroupElement>& sub, const ReducedGroup& super,
                            long max_steps = 100000) {
  for (const auto& g : sub)
    if (!is_member_sl2(super, g, max_steps).member) return false;
  return true;
}

inline bool sl2_groups_equal(const ReducedGroup& a, const ReducedGroup& b,
                             long max_steps = 100000) {
  return sl2_subgroup_of(a.sl_originals, b, max_steps) &&
         sl2_subgroup_of(b.sl_originals, a, max_steps);
}

}  // namespace hypdisc
