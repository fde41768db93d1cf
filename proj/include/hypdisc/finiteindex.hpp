#pragma once

// Finite-index torsion-free structure via reduction at a rational prime.
//
// For a finitely generated subgroup G of PSL2 over the field, pick an odd
// prime p such that (a) every generator entry is p-integral and (b) no trace
// of a possible finite-order element reduces to +-2 at the chosen place over
// p.  The reduction kernel K = ker(G -> PSL2(F_q)) then contains no torsion,
// has finite index equal to the image size, and is handed to the torsion-free
// machinery.  Coset words and Schreier generators keep every certificate
// expressible over the original generators.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "hypdisc/membership.hpp"
#include "hypdisc/moebius.hpp"
#include "hypdisc/numberfield.hpp"
#include "hypdisc/reduction.hpp"

namespace hypdisc {

// raised when a sign question about -I cannot be settled for a group with
// torsion; never used to fake an answer
struct SignUndecidedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoPrimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PrimeSplitting { RationalField, Split, Inert, Ramified };

struct FiniteIndexConfig {
  long prime_start = 3;
  long prime_limit = 1000;
  long coset_cap = 1000000;
  long max_steps = 100000;
  ReduceConfig reduce;
};

// traces that finite-order projective elements can have over this field:
// orders 2 and 3 always, 4 over sqrt2, 6 over sqrt3, 5 over sqrt5
inline std::vector<FieldElement> admissible_torsion_traces(FieldSpec spec) {
  std::vector<FieldElement> out;
  auto both = [&](const FieldElement& e) {
    out.push_back(e);
    out.push_back(-e);
  };
  out.push_back(FieldElement::integer(0, spec));
  both(FieldElement::integer(1, spec));
  if (spec.d == 2 || spec.d == 3) both(FieldElement::sqrt_d(spec));
  if (spec.d == 5) {
    FieldElement half = FieldElement::rational(Rational(1, 2), spec);
    FieldElement root = FieldElement::sqrt_d(spec);
    both(half * (FieldElement::integer(1, spec) + root));
    both(half * (FieldElement::integer(1, spec) - root));
  }
  return out;
}

namespace detail {

inline long mod_pow(long a, long e, long p) {
  long r = 1 % p;
  a %= p;
  while (e > 0) {
    if (e & 1) r = (r * a) % p;
    a = (a * a) % p;
    e >>= 1;
  }
  return r;
}

inline long mod_inv(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) throw std::logic_error("inverse of zero residue");
  return mod_pow(a, p - 2, p);
}

inline bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  Int z(p);
  return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

}  // namespace detail

// residue of a field element at the chosen place over p: a pair (u, v)
// standing for u + v*T; v is zero except in the inert case, where T^2 = d
struct ResidueMap {
  long p = 0;
  std::int64_t d = 1;
  PrimeSplitting splitting = PrimeSplitting::RationalField;
  long dres = 0;  // d mod p (inert arithmetic)
  long root = 0;  // image of sqrt(d) when it reduces into F_p

  // nullopt when the denominator is divisible by p
  std::optional<long> reduce_rational(const Rational& r) const {
    unsigned long den = mpz_fdiv_ui(r.get_den().get_mpz_t(), p);
    if (den == 0) return std::nullopt;
    unsigned long num = mpz_fdiv_ui(r.get_num().get_mpz_t(), p);
    return (static_cast<long>(num) * detail::mod_inv(static_cast<long>(den), p)) % p;
  }

  std::optional<std::pair<long, long>> reduce_element(const FieldElement& x) const {
    auto a = reduce_rational(x.a());
    auto b = reduce_rational(x.b());
    if (!a || !b) return std::nullopt;
    if (splitting == PrimeSplitting::Inert) return std::make_pair(*a, *b);
    return std::make_pair((*a + *b * root) % p, 0L);
  }
};

// 2x2 matrix over the residue ring, rows flattened as (u, v) pairs
struct FqMat {
  std::array<long, 8> e{};
  friend bool operator==(const FqMat& x, const FqMat& y) { return x.e == y.e; }
};

struct FqMatHash {
  std::size_t operator()(const FqMat& m) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (long v : m.e) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

namespace detail {

inline void fq_entry_mul(const ResidueMap& rm, long u1, long v1, long u2, long v2,
                         long& u, long& v) {
  u = (u1 * u2 + ((v1 * v2) % rm.p) * rm.dres) % rm.p;
  v = (u1 * v2 + v1 * u2) % rm.p;
}

inline FqMat fq_mul(const ResidueMap& rm, const FqMat& x, const FqMat& y) {
  FqMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      long u = 0, v = 0;
      for (int k = 0; k < 2; ++k) {
        long uu, vv;
        fq_entry_mul(rm, x.e[4 * i + 2 * k], x.e[4 * i + 2 * k + 1],
                     y.e[4 * k + 2 * j], y.e[4 * k + 2 * j + 1], uu, vv);
        u += uu;
        v += vv;
      }
      r.e[4 * i + 2 * j] = u % rm.p;
      r.e[4 * i + 2 * j + 1] = v % rm.p;
    }
  return r;
}

// adjugate: the inverse, because reductions of determinant-one matrices keep
// determinant one
inline FqMat fq_inverse(const ResidueMap& rm, const FqMat& m) {
  FqMat r;
  auto neg = [&](long x) { return (rm.p - x % rm.p) % rm.p; };
  r.e = {m.e[6], m.e[7], neg(m.e[2]), neg(m.e[3]),
         neg(m.e[4]), neg(m.e[5]), m.e[0], m.e[1]};
  return r;
}

// projective normalization: the first nonzero component lies in 1..(p-1)/2
inline FqMat psl_normalize(const ResidueMap& rm, FqMat m) {
  for (long& v : m.e) v = ((v % rm.p) + rm.p) % rm.p;
  for (long v : m.e) {
    if (v == 0) continue;
    if (v > (rm.p - 1) / 2)
      for (long& w : m.e) w = (rm.p - w) % rm.p;
    break;
  }
  return m;
}

inline std::optional<FqMat> reduce_matrix(const ResidueMap& rm, const GroupElement& g) {
  FqMat m;
  for (int i = 0; i < 4; ++i) {
    auto r = rm.reduce_element(g.entry(i));
    if (!r) return std::nullopt;
    m.e[2 * i] = r->first;
    m.e[2 * i + 1] = r->second;
  }
  return m;
}

inline bool fq_is_identity(const ResidueMap& rm, const FqMat& m) {
  FqMat n = psl_normalize(rm, m);
  return n.e == std::array<long, 8>{1, 0, 0, 0, 0, 0, 1, 0};
}

}  // namespace detail

// Smallest usable odd prime at or above cfg.prime_start: all generator
// entries p-integral, and no admissible torsion trace congruent to +-2 at the
// chosen place (so the reduction kernel cannot contain torsion).
inline ResidueMap choose_prime(const std::vector<GroupElement>& gens, FieldSpec spec,
                               const FiniteIndexConfig& cfg = {}) {
  for (long p = std::max(cfg.prime_start, 3L); p <= cfg.prime_limit; ++p) {
    if (!detail::is_odd_prime(p)) continue;
    ResidueMap rm;
    rm.p = p;
    rm.d = spec.d;
    rm.dres = static_cast<long>(((spec.d % p) + p) % p);
    if (spec.rational_field()) {
      rm.splitting = PrimeSplitting::RationalField;
    } else if (rm.dres == 0) {
      rm.splitting = PrimeSplitting::Ramified;
      rm.root = 0;
    } else if (detail::mod_pow(rm.dres, (p - 1) / 2, p) == 1) {
      rm.splitting = PrimeSplitting::Split;
      long r = 0;
      for (long x = 1; x < p; ++x)
        if ((x * x) % p == rm.dres) {
          r = x;
          break;
        }
      rm.root = std::min(r, p - r);
    } else {
      rm.splitting = PrimeSplitting::Inert;
    }

    bool ok = true;
    for (const auto& g : gens) {
      for (int i = 0; ok && i < 4; ++i)
        if (!rm.reduce_element(g.entry(i))) ok = false;
    }
    for (const FieldElement& t : admissible_torsion_traces(spec)) {
      if (!ok) break;
      auto r = rm.reduce_element(t);
      if (!r) {
        ok = false;  // half-integral golden traces at p = 2 cannot occur (p odd)
        break;
      }
      if (r->second == 0 && (r->first == 2 % p || r->first == (p - 2) % p)) ok = false;
    }
    if (ok) return rm;
  }
  throw NoPrimeError("no usable prime up to the configured limit");
}

// G decomposed over its mod-p kernel: cosets of the finite image, Schreier
// generators of the kernel, and the kernel's own reduced structure.  All words
// are over the original generators except kernel.entries (whose alphabet is
// schreier_words, one letter per kernel generator).
struct FiniteIndexDecomposition {
  ResidueMap mod;
  std::vector<ProjectiveElement> originals;
  std::vector<GroupElement> sl_originals;
  long index = 0;
  std::vector<Word> coset_words;  // [0] is empty
  std::vector<ProjectiveElement> coset_elems;
  std::vector<FqMat> coset_keys;     // normalized residue images, parallel
  std::vector<Word> schreier_words;  // kernel generators, over the originals
  ReducedGroup kernel;               // its originals are the Schreier generators
  std::optional<Word> minus_word;    // over the originals, when -I has a witness

  // rewrite a word over kernel-generator indices as a word over the originals
  Word kernel_word_to_original(const Word& w) const {
    return word_substitute(w, schreier_words);
  }
};

using FiniteIndexResult =
    std::variant<FiniteIndexDecomposition, EllipticCert, IndiscreteCert>;

inline FiniteIndexResult decompose_finite_index(const std::vector<GroupElement>& sl_gens,
                                                const FiniteIndexConfig& cfg = {}) {
  if (sl_gens.empty())
    throw std::invalid_argument("finite-index decomposition needs generators");
  FieldSpec spec = sl_gens.front().spec();
  std::vector<ProjectiveElement> originals;
  originals.reserve(sl_gens.size());
  for (const auto& g : sl_gens) {
    g.require_det_one();
    if (g.spec() != spec) throw std::invalid_argument("mixed field specs");
    originals.emplace_back(g);
  }

  ResidueMap rm = choose_prime(sl_gens, spec, cfg);

  // images of the generators and their inverses
  std::size_t n = sl_gens.size();
  std::vector<FqMat> gen_img(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto m = detail::reduce_matrix(rm, sl_gens[i]);
    if (!m) throw std::logic_error("chosen prime fails to reduce a generator");
    gen_img[2 * i] = *m;
    gen_img[2 * i + 1] = detail::fq_inverse(rm, *m);
  }

  // breadth-first enumeration of the image group by left multiplication
  std::unordered_map<FqMat, int, FqMatHash> table;
  std::vector<FqMat> reps;
  std::vector<Word> coset_words;
  std::queue<int> todo;
  FqMat one = detail::psl_normalize(
      rm, FqMat{std::array<long, 8>{1, 0, 0, 0, 0, 0, 1, 0}});
  table.emplace(one, 0);
  reps.push_back(one);
  coset_words.push_back({});
  todo.push(0);
  while (!todo.empty()) {
    int k = todo.front();
    todo.pop();
    for (std::size_t i = 0; i < n; ++i)
      for (int s : {0, 1}) {
        FqMat next =
            detail::psl_normalize(rm, detail::fq_mul(rm, gen_img[2 * i + s], reps[k]));
        if (table.emplace(next, static_cast<int>(reps.size())).second) {
          if (static_cast<long>(reps.size()) >= cfg.coset_cap)
            throw ResourceCapError("coset enumeration exceeded the cap");
          reps.push_back(next);
          coset_words.push_back(
              word_concat(Word{Letter{static_cast<int>(i), s == 0 ? +1 : -1}},
                          coset_words[k]));
          todo.push(static_cast<int>(reps.size()) - 1);
        }
      }
  }
  long index = static_cast<long>(reps.size());

  std::vector<ProjectiveElement> coset_elems;
  coset_elems.reserve(reps.size());
  for (const Word& w : coset_words)
    coset_elems.push_back(word_evaluate(w, originals, spec));

  // Schreier generators of the kernel: rep(x s)^-1 x s over all cosets s and
  // generators x; identity words are dropped (recording any -I value), the
  // rest deduplicated by matrix in first-encounter order
  std::optional<Word> minus_word;
  std::vector<Word> schreier_words;
  std::vector<ProjectiveElement> schreier_elems;
  std::set<ProjectiveElement> seen;
  for (std::size_t k = 0; k < reps.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      FqMat img = detail::psl_normalize(rm, detail::fq_mul(rm, gen_img[2 * i], reps[k]));
      int r = table.at(img);
      Word w = word_concat(word_inverse(coset_words[r]),
                           word_concat(Word{Letter{static_cast<int>(i), +1}},
                                       coset_words[k]));
      if (w.empty()) continue;
      ProjectiveElement elem = word_evaluate(w, originals, spec);
      if (elem.is_identity()) {
        if (!minus_word) {
          GroupElement sl = word_evaluate_sl2(w, sl_gens, spec);
          if (sl == GroupElement::identity(spec).negated()) minus_word = w;
        }
        continue;
      }
      if (seen.insert(elem).second) {
        schreier_words.push_back(std::move(w));
        schreier_elems.push_back(std::move(elem));
      }
    }

  // recognize the kernel; any failure certificate is re-expressed over the
  // original generators before being handed back
  Certificate cert = recognize_torsion_free(schreier_elems, cfg.reduce);
  if (auto* ell = std::get_if<EllipticCert>(&cert)) {
    EllipticCert out = *ell;
    out.word = word_substitute(out.word, schreier_words);
    return out;
  }
  if (auto* bad = std::get_if<IndiscreteCert>(&cert)) {
    IndiscreteCert out = *bad;
    out.word1 = word_substitute(out.word1, schreier_words);
    out.word2 = word_substitute(out.word2, schreier_words);
    return out;
  }

  std::vector<GroupElement> schreier_sl;
  schreier_sl.reserve(schreier_words.size());
  for (const Word& w : schreier_words)
    schreier_sl.push_back(word_evaluate_sl2(w, sl_gens, spec));
  // an empty generator list cannot carry the field spec, so build the trivial
  // kernel by hand
  ReducedGroup kernel =
      schreier_sl.empty()
          ? ReducedGroup{spec, base_point(spec), {}, {}, {}, {}, {},
                         std::nullopt, std::nullopt}
          : build_reduced_group(schreier_sl, std::get<DiscreteTorsionFreeCert>(cert),
                                cfg.max_steps);

  FiniteIndexDecomposition out{rm,
                               std::move(originals),
                               sl_gens,
                               index,
                               std::move(coset_words),
                               std::move(coset_elems),
                               std::move(reps),
                               std::move(schreier_words),
                               std::move(kernel),
                               std::nullopt};

  // -I witnesses, in order of preference: an identity-valued Schreier word
  // that evaluates to -I; the kernel's own -I word; a finite-order coset
  // representative or generator whose power closes at -I
  if (minus_word) {
    out.minus_word = std::move(minus_word);
  } else if (out.kernel.minus_word) {
    out.minus_word = out.kernel_word_to_original(*out.kernel.minus_word);
  } else {
    auto try_witness = [&](const Word& w) {
      if (out.minus_word || w.empty()) return;
      ProjectiveElement elem = word_evaluate(w, out.originals, spec);
      if (classify(elem) != IsometryClass::Elliptic) return;
      auto ord = elliptic_finite_order(elem);
      if (!ord) return;
      GroupElement sl = sl2_power(word_evaluate_sl2(w, sl_gens, spec), *ord);
      if (sl == GroupElement::identity(spec).negated())
        out.minus_word = word_power(w, *ord);
    };
    for (std::size_t i = 0; i < n; ++i) try_witness(Word{Letter{static_cast<int>(i), +1}});
    for (std::size_t k = 1; k < out.coset_words.size(); ++k)
      try_witness(out.coset_words[k]);
  }
  if (out.minus_word &&
      word_evaluate_sl2(*out.minus_word, sl_gens, spec) !=
          GroupElement::identity(spec).negated())
    throw std::logic_error("-I witness fails to evaluate to -I");
  return out;
}

// q in the full group?  The coset of q is read off its residue image; the
// remaining kernel question is delegated to the torsion-free machinery.
// Non-p-integral entries and images outside the enumerated group are certified
// non-members, because the group lies in the p-integral matrices and the
// enumeration is exhaustive.
inline MembershipResult is_member(const FiniteIndexDecomposition& fi,
                                  const ProjectiveElement& q,
                                  long max_steps = 100000) {
  if (q.spec() != fi.kernel.spec) throw std::invalid_argument("mixed field specs");
  auto img = detail::reduce_matrix(fi.mod, q.rep());
  if (!img) return {};
  FqMat key = detail::psl_normalize(fi.mod, *img);
  int k = -1;
  for (std::size_t j = 0; j < fi.coset_keys.size(); ++j)
    if (fi.coset_keys[j] == key) {
      k = static_cast<int>(j);
      break;
    }
  if (k < 0) return {};
  ProjectiveElement h = fi.coset_elems[k].inverse() * q;
  MembershipResult inner = is_member(fi.kernel, h, max_steps);
  if (!inner.member) return {};
  MembershipResult res;
  res.member = true;
  res.word = word_concat(fi.coset_words[k], fi.kernel_word_to_original(*inner.word));
  return res;
}

inline MembershipResult is_member_sl2(const FiniteIndexDecomposition& fi,
                                      const GroupElement& q, long max_steps = 100000) {
  q.require_det_one();
  MembershipResult proj = is_member(fi, ProjectiveElement(q), max_steps);
  if (!proj.member) return {};
  FieldSpec spec = fi.kernel.spec;
  GroupElement got = word_evaluate_sl2(*proj.word, fi.sl_originals, spec);
  if (got == q) return proj;
  if (got != q.negated())
    throw std::logic_error("projective certificate does not lift to +-query");
  if (!fi.minus_word)
    throw SignUndecidedError(
        "query equals minus a member and no -I witness is known");
  MembershipResult res;
  res.member = true;
  res.word = word_concat(*proj.word, *fi.minus_word);
  return res;
}

}  // namespace hypdisc
