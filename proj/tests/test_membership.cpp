#include <catch2/catch_amalgamated.hpp>

#include "hypdisc/membership.hpp"

using namespace hypdisc;

namespace {
FieldSpec Q{1};

FieldElement fq(long n, long d = 1) { return FieldElement::rational(Rational(n, d), Q); }

GroupElement gm(long a, long b, long c, long d) {
  return GroupElement(fq(a), fq(b), fq(c), fq(d));
}

const GroupElement A = gm(1, 2, 0, 1);
const GroupElement B = gm(1, 0, 2, 1);

ReducedGroup prepared(const std::vector<GroupElement>& gens) {
  PreparedGroup pg = prepare_group(gens);
  REQUIRE(std::holds_alternative<ReducedGroup>(pg));
  return std::get<ReducedGroup>(pg);
}

// order-2 rotation about the rational point (x, y)
GroupElement rot2(const Rational& x, const Rational& y) {
  auto fe = [](const Rational& r) { return FieldElement::rational(r, Q); };
  return GroupElement(fe(-x / y), fe((x * x + y * y) / y), fe(Rational(-1) / y),
                      fe(x / y));
}
}  // namespace

TEST_CASE("members of the free parabolic pair carry verifying words") {
  ReducedGroup rg = prepared({A, B});
  CHECK(rg.rank() == 2);
  CHECK_FALSE(rg.relator.has_value());
  CHECK_FALSE(rg.minus_word.has_value());

  std::vector<GroupElement> probes{
      A,
      B.inverse(),
      A * B * A.inverse(),
      B.inverse() * A * A * B,
      gm(5, 8, 8, 13),  // B A^-1 B^-1 A
      A * B * B * A.inverse() * B.inverse(),
  };
  for (const auto& q : probes) {
    auto res = is_member_sl2(rg, q);
    REQUIRE(res.member);
    CHECK(word_evaluate_sl2(*res.word, rg.sl_originals, Q) == q);
  }

  auto id = is_member_sl2(rg, GroupElement::identity(Q));
  REQUIRE(id.member);
  CHECK(id.word->empty());
}

TEST_CASE("non-members of the free parabolic pair are rejected") {
  ReducedGroup rg = prepared({A, B});
  // each of these reduces mod 2 to a nonidentity matrix, so it cannot lie in
  // the group (every generator is congruent to I mod 2)
  CHECK_FALSE(is_member_sl2(rg, gm(1, 1, 0, 1)).member);
  CHECK_FALSE(is_member_sl2(rg, gm(1, 1, 1, 2)).member);
  CHECK_FALSE(is_member_sl2(rg, gm(0, 1, -1, 0)).member);
  CHECK_FALSE(is_member_sl2(rg, gm(2, 1, 1, 1)).member);
  // congruent to I mod 2 but with the wrong sign: -I needs a sign relation
  // and a free group on honest lifts has none
  CHECK_FALSE(is_member_sl2(rg, GroupElement::identity(Q).negated()).member);
  CHECK_FALSE(is_member_sl2(rg, A.negated()).member);
  CHECK_FALSE(is_member_sl2(rg, (A * B).negated()).member);
}

TEST_CASE("boundary queries canonicalize before deciding") {
  ReducedGroup rg = prepared({A, B});
  // z+1 moves the base point to 1+i, on the boundary of the domain; the orbit
  // point -1+i ties at equal distance and is lexicographically smaller
  ReducedPoint r = reduce_to_domain(rg, Point(fq(1), fq(1)));
  CHECK(r.point == Point(fq(-1), fq(1)));
  CHECK_FALSE(is_member_sl2(rg, gm(1, 1, 0, 1)).member);

  // interior point: no motion at all
  ReducedPoint still = reduce_to_domain(rg, Point(fq(0), fq(2)));
  CHECK(still.point == Point(fq(0), fq(2)));
  CHECK(still.word.empty());
}

TEST_CASE("projective membership accepts both signs") {
  ReducedGroup rg = prepared({A, B});
  auto res = is_member(rg, ProjectiveElement((A * B).negated()));
  REQUIRE(res.member);
  CHECK(word_evaluate(*res.word, rg.originals, Q) == ProjectiveElement(A * B));
  CHECK_FALSE(is_member(rg, ProjectiveElement(gm(1, 1, 0, 1))).member);
}

TEST_CASE("cyclic hyperbolic group membership") {
  GroupElement H(fq(2), fq(0), fq(0), fq(1, 2));
  ReducedGroup rg = prepared({H});
  CHECK(rg.rank() == 1);

  auto res = is_member_sl2(rg, sl2_power(H, 3));
  REQUIRE(res.member);
  CHECK(word_evaluate_sl2(*res.word, rg.sl_originals, Q) == sl2_power(H, 3));
  CHECK(is_member_sl2(rg, sl2_power(H, -2)).member);
  CHECK_FALSE(is_member_sl2(rg, GroupElement(fq(3), fq(0), fq(0), fq(1, 3))).member);
  CHECK_FALSE(is_member_sl2(rg, H.negated()).member);
  CHECK_FALSE(is_member_sl2(rg, B).member);
}

TEST_CASE("cyclic parabolic group membership") {
  ReducedGroup rg = prepared({A});
  CHECK(is_member_sl2(rg, sl2_power(A, 5)).member);
  CHECK(is_member_sl2(rg, sl2_power(A, -7)).member);
  CHECK_FALSE(is_member_sl2(rg, gm(1, 1, 0, 1)).member);  // half step
  CHECK_FALSE(is_member_sl2(rg, gm(1, 3, 0, 1)).member);  // odd step
  CHECK_FALSE(is_member_sl2(rg, B).member);
}

TEST_CASE("trivial and sign-only groups") {
  ReducedGroup none = prepared({});
  CHECK(none.rank() == 0);
  CHECK(is_member_sl2(none, GroupElement::identity(Q)).member);
  CHECK_FALSE(is_member_sl2(none, GroupElement::identity(Q).negated()).member);
  CHECK_FALSE(is_member_sl2(none, A).member);

  // the group generated by -I alone is projectively trivial but its SL2 side
  // contains exactly {I, -I}
  ReducedGroup sign = prepared({GroupElement::identity(Q).negated()});
  CHECK(sign.rank() == 0);
  REQUIRE(sign.minus_word.has_value());
  CHECK(*sign.minus_word == Word{Letter{0, +1}});
  auto mi = is_member_sl2(sign, GroupElement::identity(Q).negated());
  REQUIRE(mi.member);
  CHECK(word_evaluate_sl2(*mi.word, sign.sl_originals, Q) ==
        GroupElement::identity(Q).negated());
  CHECK_FALSE(is_member_sl2(sign, A).member);
}

TEST_CASE("a sign-twisted redundant generator smuggles -I into the SL2 group") {
  ReducedGroup rg = prepared({A, B, (A * B).negated()});
  CHECK(rg.rank() == 2);
  REQUIRE(rg.minus_word.has_value());
  CHECK(word_evaluate_sl2(*rg.minus_word, rg.sl_originals, Q) ==
        GroupElement::identity(Q).negated());

  CHECK(is_member_sl2(rg, GroupElement::identity(Q).negated()).member);
  auto res = is_member_sl2(rg, A.negated());
  REQUIRE(res.member);
  CHECK(word_evaluate_sl2(*res.word, rg.sl_originals, Q) == A.negated());
  // and plain members still work
  auto plain = is_member_sl2(rg, B);
  REQUIRE(plain.member);
  CHECK(word_evaluate_sl2(*plain.word, rg.sl_originals, Q) == B);
}

TEST_CASE("membership over a real quadratic field") {
  FieldSpec Q2{2};
  FieldElement one = FieldElement::integer(1, Q2);
  FieldElement zero = FieldElement::integer(0, Q2);
  FieldElement lam = FieldElement::integer(2, Q2) * FieldElement::sqrt_d(Q2);
  GroupElement P(one, lam, zero, one);
  GroupElement L(one, zero, lam, one);
  ReducedGroup rg = prepared({P, L});
  CHECK(rg.rank() == 2);

  GroupElement w = P * L.inverse() * P;
  auto res = is_member_sl2(rg, w);
  REQUIRE(res.member);
  CHECK(word_evaluate_sl2(*res.word, rg.sl_originals, Q2) == w);

  GroupElement half(one, FieldElement::sqrt_d(Q2), zero, one);
  CHECK_FALSE(is_member_sl2(rg, half).member);
  CHECK_FALSE(is_member_sl2(rg, w.negated()).member);
}

TEST_CASE("a rational cocompact surface group from six half-turns") {
  // six order-2 rotations about rational points with product exactly I; the
  // even-length subgroup is a closed genus-2 surface group
  GroupElement r1 = rot2(Rational(0), Rational(1));
  GroupElement r2 = rot2(Rational(2), Rational(1));
  GroupElement r3 = rot2(Rational(3), Rational(2));
  GroupElement r4 = rot2(Rational(-1), Rational(3));
  GroupElement r5 = rot2(Rational(-13, 12), Rational(1, 6));
  GroupElement r6 = (r1 * r2 * r3 * r4 * r5).inverse();
  REQUIRE(r6.trace() == fq(0));
  REQUIRE((r1 * r2 * r3 * r4 * r5 * r6).is_identity());

  std::vector<GroupElement> gens{r1 * r2, r1 * r3, r1 * r4, r1 * r5, r1 * r6};
  ReducedGroup rg = prepared(gens);
  CHECK(rg.rank() == 4);

  // the defining relation: length 8, every reduced generator once with each
  // sign, projectively trivial -- the closed genus-2 shape
  REQUIRE(rg.relator.has_value());
  REQUIRE(rg.relator->size() == 8);
  std::array<int, 4> sum{}, count{};
  for (const Letter& l : *rg.relator) {
    sum[l.gen] += l.exp;
    count[l.gen] += 1;
  }
  for (int g = 0; g < 4; ++g) {
    CHECK(sum[g] == 0);
    CHECK(count[g] == 2);
  }
  CHECK(word_evaluate(rg.to_original_word(*rg.relator), rg.originals, Q) ==
        ProjectiveElement::identity(Q));
  // surface groups of even genus lift to SL2 without a sign defect
  CHECK(word_evaluate_sl2(*rg.relator, rg.sl_entries, Q).is_identity());
  CHECK_FALSE(rg.minus_word.has_value());

  // membership inside the surface group
  GroupElement w = gens[0] * gens[2].inverse() * gens[4] * gens[1];
  auto res = is_member_sl2(rg, w);
  REQUIRE(res.member);
  CHECK(word_evaluate_sl2(*res.word, gens, Q) == w);
  CHECK_FALSE(is_member_sl2(rg, w.negated()).member);
  CHECK_FALSE(is_member_sl2(rg, GroupElement::identity(Q).negated()).member);

  // a half-turn lies in the ambient lattice but not in the even-length part
  CHECK_FALSE(is_member(rg, ProjectiveElement(r1)).member);
  CHECK_FALSE(is_member(rg, ProjectiveElement(r5)).member);
}

TEST_CASE("sign flips on cocompact generators engage the -I word") {
  GroupElement r1 = rot2(Rational(0), Rational(1));
  GroupElement r2 = rot2(Rational(2), Rational(1));
  GroupElement r3 = rot2(Rational(3), Rational(2));
  GroupElement r4 = rot2(Rational(-1), Rational(3));
  GroupElement r5 = rot2(Rational(-13, 12), Rational(1, 6));
  GroupElement r6 = (r1 * r2 * r3 * r4 * r5).inverse();
  std::vector<GroupElement> gens{(r1 * r2).negated(), r1 * r3, r1 * r4, r1 * r5,
                                 r1 * r6};
  ReducedGroup rg = prepared(gens);
  CHECK(rg.rank() == 4);
  REQUIRE(rg.minus_word.has_value());
  CHECK(word_evaluate_sl2(*rg.minus_word, gens, Q) ==
        GroupElement::identity(Q).negated());

  auto mi = is_member_sl2(rg, GroupElement::identity(Q).negated());
  REQUIRE(mi.member);
  CHECK(word_evaluate_sl2(*mi.word, gens, Q) == GroupElement::identity(Q).negated());

  // both signs of any projective member are now SL2 members
  GroupElement w = r1 * r2;
  auto plus = is_member_sl2(rg, w);
  auto minus = is_member_sl2(rg, w.negated());
  REQUIRE(plus.member);
  REQUIRE(minus.member);
  CHECK(word_evaluate_sl2(*plus.word, gens, Q) == w);
  CHECK(word_evaluate_sl2(*minus.word, gens, Q) == w.negated());
}

TEST_CASE("group equality by mutual membership") {
  ReducedGroup g1 = prepared({A, B});
  ReducedGroup g2 = prepared({A * B, B});
  ReducedGroup g3 = prepared({sl2_power(A, 2), B});
  CHECK(sl2_groups_equal(g1, g2));
  CHECK(sl2_groups_equal(g2, g1));
  CHECK_FALSE(sl2_groups_equal(g1, g3));
  CHECK(sl2_subgroup_of(g3.sl_originals, g1));
  CHECK_FALSE(sl2_subgroup_of(g1.sl_originals, g3));
}

TEST_CASE("prepare_group passes through failure certificates") {
  PreparedGroup ell = prepare_group({gm(0, 1, -1, 0)});
  CHECK(std::holds_alternative<EllipticCert>(ell));

  FieldSpec Q2{2};
  FieldElement one = FieldElement::integer(1, Q2);
  FieldElement zero = FieldElement::integer(0, Q2);
  FieldElement two = FieldElement::integer(2, Q2);
  GroupElement t2(one, two, zero, one);
  GroupElement tr(one, two * FieldElement::sqrt_d(Q2), zero, one);
  PreparedGroup bad = prepare_group({t2, tr});
  CHECK(std::holds_alternative<IndiscreteCert>(bad));
}

TEST_CASE("queries must be determinant one and in the right field") {
  ReducedGroup rg = prepared({A, B});
  CHECK_THROWS_AS(is_member_sl2(rg, GroupElement(fq(2), fq(0), fq(0), fq(2))),
                  std::domain_error);
  FieldSpec Q2{2};
  CHECK_THROWS_AS(is_member(rg, ProjectiveElement(GroupElement::identity(Q2))),
                  std::invalid_argument);
}

TEST_CASE("the reduction step cap throws rather than looping") {
  ReducedGroup rg = prepared({A, B});
  Point far = act(ProjectiveElement(sl2_power(A, 9) * B * sl2_power(A, 7)),
                  rg.base);
  CHECK_THROWS_AS(reduce_to_domain(rg, far, 1), ReduceCapError);
  CHECK_NOTHROW(reduce_to_domain(rg, rg.base, 0));
}
