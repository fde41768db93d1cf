#include <catch2/catch_amalgamated.hpp>

#include "hypdisc/finiteindex.hpp"

using namespace hypdisc;

namespace {
FieldSpec Q{1};
FieldSpec Q3{3};

FieldElement fq(long n, long d = 1) { return FieldElement::rational(Rational(n, d), Q); }

GroupElement gm(long a, long b, long c, long d) {
  return GroupElement(fq(a), fq(b), fq(c), fq(d));
}

GroupElement gm3(long a, long b, long c, long d) {
  auto f = [](long v) { return FieldElement::integer(v, Q3); };
  return GroupElement(f(a), f(b), f(c), f(d));
}

const GroupElement A = gm(1, 2, 0, 1);
const GroupElement B = gm(1, 0, 2, 1);

// order-6 rotation about i/sqrt(3): trace sqrt(3)
GroupElement rot6() {
  return GroupElement(FieldElement::sqrt_d(Q3), FieldElement::integer(1, Q3),
                      FieldElement::integer(-1, Q3), FieldElement::integer(0, Q3));
}

FiniteIndexDecomposition decomposed(const std::vector<GroupElement>& gens,
                                    const FiniteIndexConfig& cfg = {}) {
  FiniteIndexResult r = decompose_finite_index(gens, cfg);
  REQUIRE(std::holds_alternative<FiniteIndexDecomposition>(r));
  return std::get<FiniteIndexDecomposition>(r);
}

Word wpow(int gen, long n) { return word_power(Word{Letter{gen, +1}}, n); }
}  // namespace

TEST_CASE("prime selection skips 3 and lands on 5 over the rationals") {
  // traces -1 and 1 are congruent to +-2 mod 3, so 3 can never be used
  ResidueMap rm = choose_prime({A, B}, Q);
  CHECK(rm.p == 5);
  CHECK(rm.splitting == PrimeSplitting::RationalField);

  FiniteIndexConfig cfg;
  cfg.prime_start = 7;
  CHECK(choose_prime({A, B}, Q, cfg).p == 7);
}

TEST_CASE("prime selection respects integrality of the generators") {
  GroupElement g(fq(1), fq(2, 5), fq(0), fq(1));
  ResidueMap rm = choose_prime({g}, Q);
  CHECK(rm.p == 7);  // 5 divides a denominator
}

TEST_CASE("prime selection classifies the place over the field discriminant") {
  // d = 3 mod 5 is a non-residue: inert
  ResidueMap rm3 = choose_prime({rot6()}, Q3);
  CHECK(rm3.p == 5);
  CHECK(rm3.splitting == PrimeSplitting::Inert);

  // d = 11 is 1 mod 5, a residue with smaller square root 1: split
  FieldSpec Q11{11};
  GroupElement unit(FieldElement(Rational(10), Rational(3), Q11),
                    FieldElement::integer(0, Q11), FieldElement::integer(0, Q11),
                    FieldElement(Rational(10), Rational(-3), Q11));
  ResidueMap rm11 = choose_prime({unit}, Q11);
  CHECK(rm11.p == 5);
  CHECK(rm11.splitting == PrimeSplitting::Split);
  CHECK(rm11.root == 1);

  // d = 5: at p = 5 the golden trace (1 + sqrt5)/2 reduces to 3 = -2, so the
  // ramified place is rejected and the search moves on to the inert 7
  FieldSpec Q5{5};
  GroupElement id5 = GroupElement::identity(Q5);
  ResidueMap rm5 = choose_prime({id5}, Q5);
  CHECK(rm5.p == 7);
  CHECK(rm5.splitting == PrimeSplitting::Inert);

  FiniteIndexConfig tight;
  tight.prime_limit = 4;
  CHECK_THROWS_AS(choose_prime({A}, Q, tight), NoPrimeError);
}

TEST_CASE("cyclic parabolic group decomposes with index 5 and kernel rank 1") {
  FiniteIndexDecomposition fi = decomposed({A});
  CHECK(fi.mod.p == 5);
  CHECK(fi.index == 5);
  REQUIRE(fi.coset_words.size() == 5);
  CHECK(fi.coset_words[0].empty());
  CHECK(fi.coset_words[1] == wpow(0, 1));
  CHECK(fi.coset_words[2] == wpow(0, -1));
  CHECK(fi.coset_words[3] == wpow(0, 2));
  CHECK(fi.coset_words[4] == wpow(0, -2));

  // the single Schreier generator closing the 5-cycle is A^5
  REQUIRE(fi.schreier_words.size() == 1);
  CHECK(fi.schreier_words[0] == wpow(0, 5));
  REQUIRE(fi.kernel.rank() == 1);
  CHECK(fi.kernel.entries[0].elem == ProjectiveElement(sl2_power(A, 5)));
  CHECK_FALSE(fi.minus_word.has_value());
}

TEST_CASE("membership through a cyclic decomposition composes coset and kernel words") {
  FiniteIndexDecomposition fi = decomposed({A});

  auto m = is_member(fi, ProjectiveElement(sl2_power(A, 7)));
  REQUIRE(m.member);
  CHECK(*m.word == wpow(0, 7));

  auto mi = is_member(fi, ProjectiveElement(sl2_power(A, -5)));
  REQUIRE(mi.member);
  CHECK(word_evaluate(*mi.word, fi.originals, Q) == ProjectiveElement(sl2_power(A, -5)));

  auto id = is_member(fi, ProjectiveElement::identity(Q));
  REQUIRE(id.member);
  CHECK(id.word->empty());

  // z + 1 reduces into the image but the kernel certifies it out
  CHECK_FALSE(is_member(fi, ProjectiveElement(gm(1, 1, 0, 1))).member);
  // B reduces outside the cyclic image
  CHECK_FALSE(is_member(fi, ProjectiveElement(B)).member);
  // a denominator divisible by p cannot occur in the group
  CHECK_FALSE(is_member(fi, ProjectiveElement(GroupElement(fq(1), fq(1, 5), fq(0), fq(1)))).member);

  // SL2 lifts: the +I lift is certified, the -I lift cannot be settled in a
  // free group through this interface and says so
  CHECK(is_member_sl2(fi, sl2_power(A, 5)).member);
  CHECK_THROWS_AS(is_member_sl2(fi, sl2_power(A, 5).negated()), SignUndecidedError);
}

TEST_CASE("finite cyclic rotation group has trivial kernel and a -I witness") {
  GroupElement C = rot6();
  FiniteIndexDecomposition fi = decomposed({C});
  CHECK(fi.mod.p == 5);
  CHECK(fi.mod.splitting == PrimeSplitting::Inert);
  CHECK(fi.index == 6);
  CHECK(fi.schreier_words.empty());
  CHECK(fi.kernel.rank() == 0);

  // the order-6 relation survives as an identity-valued Schreier word whose
  // SL2 value is -I
  REQUIRE(fi.minus_word.has_value());
  CHECK(*fi.minus_word == wpow(0, 6));
  std::vector<GroupElement> cg{C};
  CHECK(word_evaluate_sl2(*fi.minus_word, cg, Q3) ==
        GroupElement::identity(Q3).negated());

  auto m = is_member(fi, ProjectiveElement(C * C));
  REQUIRE(m.member);
  CHECK(word_evaluate(*m.word, fi.originals, Q3) == ProjectiveElement(C * C));

  // -I and both lifts of every power are reachable in SL2
  auto minus = is_member_sl2(fi, GroupElement::identity(Q3).negated());
  REQUIRE(minus.member);
  CHECK(*minus.word == wpow(0, 6));
  auto c7 = is_member_sl2(fi, sl2_power(C, 7));
  REQUIRE(c7.member);
  CHECK(word_evaluate_sl2(*c7.word, cg, Q3) == sl2_power(C, 7));
  auto cm = is_member_sl2(fi, sl2_power(C, 3).negated());
  REQUIRE(cm.member);
  CHECK(word_evaluate_sl2(*cm.word, cg, Q3) == sl2_power(C, 3).negated());

  // outside the finite image
  CHECK_FALSE(is_member(fi, ProjectiveElement(gm3(1, 1, 0, 1))).member);
  // non-integral entries cannot occur in the group
  GroupElement frac(FieldElement::integer(1, Q3),
                    FieldElement(Rational(0), Rational(1, 5), Q3),
                    FieldElement::integer(0, Q3), FieldElement::integer(1, Q3));
  CHECK_FALSE(is_member(fi, ProjectiveElement(frac)).member);
}

TEST_CASE("split place: diagonal unit group over sqrt(11) has index 2") {
  FieldSpec Q11{11};
  GroupElement H(FieldElement(Rational(10), Rational(3), Q11),
                 FieldElement::integer(0, Q11), FieldElement::integer(0, Q11),
                 FieldElement(Rational(10), Rational(-3), Q11));
  FiniteIndexDecomposition fi = decomposed({H});
  CHECK(fi.mod.p == 5);
  CHECK(fi.mod.splitting == PrimeSplitting::Split);
  CHECK(fi.index == 2);
  REQUIRE(fi.kernel.rank() == 1);
  CHECK(fi.kernel.entries[0].elem == ProjectiveElement(H * H));

  auto m = is_member(fi, ProjectiveElement(sl2_power(H, 3)));
  REQUIRE(m.member);
  CHECK(word_evaluate(*m.word, fi.originals, Q11) == ProjectiveElement(sl2_power(H, 3)));

  GroupElement shift(FieldElement::integer(1, Q11), FieldElement::integer(1, Q11),
                     FieldElement::integer(0, Q11), FieldElement::integer(1, Q11));
  CHECK_FALSE(is_member(fi, ProjectiveElement(shift)).member);
}

TEST_CASE("free parabolic pair mod 5: full image and Nielsen-Schreier rank") {
  FiniteIndexDecomposition fi = decomposed({A, B});
  CHECK(fi.mod.p == 5);
  // the image is the whole projective group over five elements
  CHECK(fi.index == 60);
  CHECK(fi.schreier_words.size() == 61);
  // rank of an index-60 subgroup of a rank-2 free group: 60 * (2 - 1) + 1
  CHECK(fi.kernel.rank() == 61);
  CHECK_FALSE(fi.minus_word.has_value());

  // a kernel element, an off-kernel member, and certified non-members
  auto inker = is_member(fi, ProjectiveElement(sl2_power(A, 5)));
  REQUIRE(inker.member);
  CHECK(word_evaluate(*inker.word, fi.originals, Q) == ProjectiveElement(sl2_power(A, 5)));

  GroupElement comm = A * B * A.inverse() * B.inverse();
  auto offker = is_member(fi, ProjectiveElement(comm));
  REQUIRE(offker.member);
  CHECK(word_evaluate(*offker.word, fi.originals, Q) == ProjectiveElement(comm));

  // S and z+1 reduce mod 2 to nonidentity matrices while every element of the
  // group is congruent to the identity, so both are true non-members; the
  // image is all of the mod-5 group, so rejection must come from the kernel
  CHECK_FALSE(is_member(fi, ProjectiveElement(gm(0, 1, -1, 0))).member);
  CHECK_FALSE(is_member(fi, ProjectiveElement(gm(1, 1, 0, 1))).member);

  auto sl = is_member_sl2(fi, comm);
  REQUIRE(sl.member);
  CHECK(word_evaluate_sl2(*sl.word, fi.sl_originals, Q) == comm);
  CHECK_THROWS_AS(is_member_sl2(fi, comm.negated()), SignUndecidedError);
}

TEST_CASE("indiscrete kernels surface as certificates over the original generators") {
  // incommensurable translations: the kernel inherits the defect
  GroupElement T1 = gm3(1, 1, 0, 1);
  GroupElement T2(FieldElement::integer(1, Q3), FieldElement::sqrt_d(Q3),
                  FieldElement::integer(0, Q3), FieldElement::integer(1, Q3));
  FiniteIndexResult r = decompose_finite_index({T1, T2});
  REQUIRE(std::holds_alternative<IndiscreteCert>(r));
  const auto& cert = std::get<IndiscreteCert>(r);
  std::vector<ProjectiveElement> tg{ProjectiveElement(T1), ProjectiveElement(T2)};
  ProjectiveElement g1 = word_evaluate(cert.word1, tg, Q3);
  ProjectiveElement g2 = word_evaluate(cert.word2, tg, Q3);
  CHECK_FALSE(g1.is_identity());
  CHECK_FALSE(g2.is_identity());
  CHECK(g1 * g2 == g2 * g1);
  CHECK(classify(g1) == IsometryClass::Parabolic);
  CHECK(classify(g2) == IsometryClass::Parabolic);
}

TEST_CASE("infinite-order rotations surface as elliptic certificates") {
  GroupElement R(fq(0), fq(1), fq(-1), fq(1, 2));  // trace 1/2
  FiniteIndexResult r = decompose_finite_index({R});
  REQUIRE(std::holds_alternative<EllipticCert>(r));
  const auto& cert = std::get<EllipticCert>(r);
  CHECK_FALSE(cert.order.has_value());
  std::vector<ProjectiveElement> rg{ProjectiveElement(R)};
  CHECK(word_evaluate(cert.word, rg, Q) == cert.elem);
  CHECK(classify(cert.elem) == IsometryClass::Elliptic);
}

TEST_CASE("decomposition validates its inputs and resource budget") {
  CHECK_THROWS_AS(decompose_finite_index({}), std::invalid_argument);
  CHECK_THROWS_AS(decompose_finite_index({gm(2, 0, 0, 1)}), std::domain_error);
  CHECK_THROWS_AS(decompose_finite_index({A, rot6()}), std::invalid_argument);

  FiniteIndexConfig tiny;
  tiny.coset_cap = 10;
  CHECK_THROWS_AS(decompose_finite_index({A, B}, tiny), ResourceCapError);

  FiniteIndexDecomposition fi = decomposed({A});
  CHECK_THROWS_AS(is_member(fi, ProjectiveElement(rot6())), std::invalid_argument);
}
