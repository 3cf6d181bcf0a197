#include "twistlab/curve.hpp"

#include "twistlab/arith.hpp"

#include <doctest.h>

#include <random>

using namespace twistlab;

namespace {

BaseCurve cong_curve() {
  BaseCurve c;
  c.A = -1;
  c.B = 0;
  c.conductor = 32;
  c.base_root_number = 1;
  c.label = "cong";
  return c;
}

BaseCurve mordell_curve() {
  BaseCurve c;
  c.A = 0;
  c.B = 1;
  c.conductor = 36;
  c.base_root_number = 1;
  c.label = "mordell36";
  return c;
}

TwistPoint pt(long x, long y, long z) {
  return TwistPoint::from_projective(BigInt(x), BigInt(y), BigInt(z));
}

}  // namespace

TEST_CASE("curve validation") {
  BaseCurve bad;
  bad.A = -3;
  bad.B = 2;  // 4*(-27) + 27*4 = 0
  bad.conductor = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(cong_curve().validate());
  CHECK(cong_curve().discriminant_core() == -4);
  CHECK(mordell_curve().discriminant_core() == 27);
}

TEST_CASE("on_curve examples (A=-1, B=0)") {
  auto c = cong_curve();
  CHECK(on_curve(c, 6, pt(2, 1, 1)));
  CHECK(on_curve(c, 6, TwistPoint::infinity()));
  CHECK_FALSE(on_curve(c, 5, pt(2, 1, 1)));
  CHECK_THROWS_AS(TwistPoint::from_projective(0, 0, 0), std::invalid_argument);
}

TEST_CASE("projective normalization") {
  auto p = pt(4, -6, 2);
  CHECK(p.x() == 2);
  CHECK(p.y() == -3);
  CHECK(p.z() == 1);
  auto q = pt(-4, 6, -2);  // sign flips to make z > 0
  CHECK(q.x() == 2);
  CHECK(q.y() == -3);
  CHECK(q.z() == 1);
  CHECK(TwistPoint::from_projective(0, -5, 0) == TwistPoint::infinity());
}

TEST_CASE("group law: identity, inverse, doubling example") {
  auto c = cong_curve();
  BigInt d = 6;
  auto P = pt(2, 1, 1);

  CHECK(add(c, d, P, TwistPoint::infinity()) == P);
  CHECK(add(c, d, TwistPoint::infinity(), P) == P);
  CHECK(add(c, d, P, negate(P)) == TwistPoint::infinity());

  auto D = add(c, d, P, P);
  CHECK(on_curve(c, d, D));
  CHECK(D.affine_x() == BigRat(25, 24));
  CHECK(D == pt(300, -35, 288));

  CHECK_THROWS_AS(add(c, 5, P, P), std::domain_error);
}

TEST_CASE("multiply: 0, 2, 4 and negatives") {
  auto c = cong_curve();
  BigInt d = 6;
  auto P = pt(2, 1, 1);
  CHECK(multiply(c, d, 0, P) == TwistPoint::infinity());
  CHECK(multiply(c, d, 1, P) == P);
  CHECK(multiply(c, d, -1, P) == negate(P));
  CHECK(multiply(c, d, 2, P) == add(c, d, P, P));
  auto P2 = add(c, d, P, P);
  CHECK(multiply(c, d, 4, P) == add(c, d, P2, P2));
  CHECK(multiply(c, d, 5, P) == add(c, d, add(c, d, P2, P2), P));
}

TEST_CASE("is_torsion (A=-1, B=0, d=6)") {
  auto c = cong_curve();
  BigInt d = 6;
  CHECK(is_torsion(c, d, pt(0, 0, 1)));   // 2-torsion, y = 0
  CHECK(is_torsion(c, d, pt(1, 0, 1)));   // x = 1: 1 - 1 = 0
  CHECK(is_torsion(c, d, TwistPoint::infinity()));
  CHECK_FALSE(is_torsion(c, d, pt(2, 1, 1)));
}

TEST_CASE("torsion beyond order 2 (mordell curve, d=1)") {
  auto c = mordell_curve();
  // (2, 3) on y^2 = x^3 + 1 has order 6; (0, 1) has order 3
  CHECK(is_torsion(c, 1, pt(2, 3, 1)));
  CHECK(is_torsion(c, 1, pt(0, 1, 1)));
  CHECK(is_torsion(c, 1, pt(-1, 0, 1)));
  CHECK(multiply(c, 1, 6, pt(2, 3, 1)) == TwistPoint::infinity());
  CHECK(multiply(c, 1, 3, pt(2, 3, 1)) == pt(-1, 0, 1));
}

TEST_CASE("parameterized points (A=-1, B=0)") {
  auto c = cong_curve();
  auto p1 = parameterized_point(c, 1, 2);
  CHECK(p1.d == 6);
  CHECK_FALSE(p1.degenerate);
  CHECK(p1.p == pt(2, 1, 1));
  CHECK(on_curve(c, p1.d, p1.p));

  auto p2 = parameterized_point(c, 2, -1);
  CHECK(p2.d == 6);
  CHECK(p2.p == pt(-2, 1, 4));
  CHECK(on_curve(c, p2.d, p2.p));

  auto p3 = parameterized_point(c, 1, 1);
  CHECK(p3.d == 0);
  CHECK(p3.degenerate);

  auto p4 = parameterized_point(c, 0, 5);
  CHECK(p4.degenerate);
  CHECK(p4.p == TwistPoint::infinity());

  CHECK_THROWS_AS(parameterized_point(c, 0, 0), std::invalid_argument);
}

TEST_CASE("parameterized-point identity on a sampled grid") {
  for (auto c : {cong_curve(), mordell_curve()}) {
    for (long u = -25; u <= 25; ++u)
      for (long v = -25; v <= 25; ++v) {
        if (u == 0 || std::gcd(u, v) != 1) continue;
        auto pp = parameterized_point(c, u, v);
        if (sgn(pp.d) == 0) continue;
        CHECK(on_curve(c, pp.d, pp.p));
      }
  }
}

TEST_CASE("group law closure and commutativity on sampled twists") {
  std::mt19937_64 rng(5);
  for (auto c : {cong_curve(), mordell_curve()}) {
    int tested = 0;
    for (int trial = 0; trial < 4000 && tested < 500; ++trial) {
      long u = static_cast<long>(rng() % 21) - 10;
      long v = static_cast<long>(rng() % 21) - 10;
      if (u == 0 || std::gcd(u, v) != 1) continue;
      auto pp = parameterized_point(c, u, v);
      if (pp.degenerate) continue;
      long m = static_cast<long>(rng() % 3) + 1;
      long n = static_cast<long>(rng() % 3) + 1;
      auto P = multiply(c, pp.d, m, pp.p);
      auto Q = multiply(c, pp.d, n, pp.p);
      auto S = add(c, pp.d, P, Q);
      CHECK(on_curve(c, pp.d, S));
      CHECK(S == add(c, pp.d, Q, P));
      ++tested;
    }
    CHECK(tested == 500);
  }
}

TEST_CASE("group law associativity on sampled triples") {
  auto c = cong_curve();
  std::mt19937_64 rng(6);
  // 2-torsion of every E_d on y^2 = x^3 - x: x = 0, +-1
  const TwistPoint torsion[3] = {pt(0, 0, 1), pt(1, 0, 1), pt(-1, 0, 1)};
  int tested = 0;
  while (tested < 100) {
    long u = static_cast<long>(rng() % 13) - 6;
    long v = static_cast<long>(rng() % 13) - 6;
    if (u == 0 || std::gcd(u, v) != 1) continue;
    auto pp = parameterized_point(c, u, v);
    if (pp.degenerate) continue;
    // mix free and torsion parts so the triples span more than one cyclic group
    auto P = pp.p;
    auto Q = add(c, pp.d, multiply(c, pp.d, 2, P), torsion[tested % 3]);
    auto R = add(c, pp.d, negate(multiply(c, pp.d, 3, P)), torsion[(tested + 1) % 3]);
    auto lhs = add(c, pp.d, add(c, pp.d, P, Q), R);
    auto rhs = add(c, pp.d, P, add(c, pp.d, Q, R));
    CHECK(lhs == rhs);
    ++tested;
  }
}

TEST_CASE("twist symmetry for B = 0: (X,Y) on E_d iff (-X,Y) on E_{-d}") {
  auto c = cong_curve();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    long u = static_cast<long>(rng() % 15) - 7;
    long v = static_cast<long>(rng() % 15) - 7;
    if (u == 0 || std::gcd(u, v) != 1) continue;
    auto pp = parameterized_point(c, u, v);
    if (pp.degenerate) continue;
    auto mirrored = TwistPoint::from_projective(-pp.p.x(), pp.p.y(), pp.p.z());
    CHECK(on_curve(c, -pp.d, mirrored));
  }
}

TEST_CASE("normalize_model examples") {
  auto n1 = normalize_model(cong_curve());
  CHECK(n1.M == 384);
  BigInt m4 = BigInt(384) * 384 * 384 * 384;
  CHECK(n1.A_prime == -m4);
  CHECK(n1.B_prime == 0);
  CHECK(n1.A_prime % n1.M == 0);
  CHECK(n1.B_prime % n1.M == 0);

  auto n2 = normalize_model(mordell_curve());
  CHECK(n2.M == 432);
  BigInt m6 = BigInt(432) * 432 * 432 * 432 * 432 * 432;
  CHECK(n2.A_prime == 0);
  CHECK(n2.B_prime == m6);

  BaseCurve c3;
  c3.A = -1;
  c3.B = 1;
  c3.conductor = 37;
  auto n3 = normalize_model(c3);
  CHECK(n3.M == 444);
  BigInt m = 444;
  CHECK(n3.A_prime == -(m * m * m * m));
  CHECK(n3.B_prime == m * m * m * m * m * m);
}

TEST_CASE("normalized model carries points via (x,y) -> (xM^2, yM^3)") {
  auto c = cong_curve();
  auto nm = normalize_model(c);
  BaseCurve cn;
  cn.A = nm.A_prime;
  cn.B = nm.B_prime;
  cn.conductor = c.conductor;
  auto pp = parameterized_point(c, 1, 2);  // (2, 1) on E_6
  BigRat X = pp.p.affine_x(), Y = pp.p.affine_y();
  BigRat M2(nm.M * nm.M), M3(nm.M * nm.M * nm.M);
  auto mapped = TwistPoint::from_affine(X * M2, Y * M3);
  CHECK(on_curve(cn, pp.d, mapped));
}
