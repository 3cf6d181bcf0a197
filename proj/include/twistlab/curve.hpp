// Models of E: y^2 = x^3 + Ax + B and its quadratic twists
// E_d: d y^2 = x^3 + Ax + B, with the exact group law on twist points,
// torsion testing, model normalization and the (uv:1:u^2) family.
#pragma once

#include "twistlab/bigint.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twistlab {

/// Residue table for twist root numbers, attached to a curve config.
struct RootRuleSpec {
  long modulus = 0;
  bool reflect_negative = false;            // d < 0 looked up as |d| (B = 0 curves)
  std::vector<std::pair<long, int>> entries;  // residue in [0,modulus) -> +-1, for d > 0
};

struct BaseCurve {
  BigInt A;
  BigInt B;
  long conductor = 0;        // supplied, not computed
  int base_root_number = 1;  // omega(E), supplied
  std::string label;

  RootRuleSpec rule;            // empty modulus means: use the derived rule
  std::string root_rule_path;   // optional override file
  double height_margin_c = 0.0; // > 0 overrides the computed comparison constant

  BigInt discriminant_core() const;  // 4A^3 + 27B^2

  /// Throws std::invalid_argument if 4A^3 + 27B^2 = 0 or conductor < 1.
  void validate() const;
};

/// A projective point (x : y : z) with gcd(x,y,z) = 1, z >= 0, on some twist
/// dy^2 z = x^3 + Axz^2 + Bz^3; (0 : 1 : 0) is the point at infinity.
/// Which twist it lives on is enforced by the operations that take d.
class TwistPoint {
 public:
  TwistPoint() : x_(0), y_(1), z_(0) {}  // infinity
  static TwistPoint infinity() { return TwistPoint(); }
  static TwistPoint from_projective(BigInt x, BigInt y, BigInt z);
  static TwistPoint from_affine(const BigRat& X, const BigRat& Y);

  const BigInt& x() const { return x_; }
  const BigInt& y() const { return y_; }
  const BigInt& z() const { return z_; }

  bool is_infinity() const { return sgn(z_) == 0; }

  /// Affine views in lowest terms; throw std::domain_error at infinity.
  BigRat affine_x() const;
  BigRat affine_y() const;

  bool operator==(const TwistPoint& o) const { return x_ == o.x_ && y_ == o.y_ && z_ == o.z_; }
  bool operator!=(const TwistPoint& o) const { return !(*this == o); }

  std::string str() const;

 private:
  BigInt x_, y_, z_;
};

/// d y^2 z == x^3 + Axz^2 + Bz^3. Rejects the all-zero triple.
bool on_curve(const BaseCurve& c, const BigInt& d, const TwistPoint& p);

TwistPoint negate(const TwistPoint& p);

/// Chord-tangent addition on E_d. Both points must lie on E_d
/// (std::domain_error otherwise).
TwistPoint add(const BaseCurve& c, const BigInt& d, const TwistPoint& p, const TwistPoint& q);

/// n-fold addition via double-and-add; multiply(-1, P) = -P.
TwistPoint multiply(const BaseCurve& c, const BigInt& d, long long n, const TwistPoint& p);

/// True iff nP = O for some 1 <= n <= 12 (Mazur's bound on rational torsion order).
bool is_torsion(const BaseCurve& c, const BigInt& d, const TwistPoint& p);

struct ModelNormalization {
  BigInt M;        // 12 * conductor
  BigInt A_prime;  // A * M^4
  BigInt B_prime;  // B * M^6
};

/// The substitution (x,y) -> (x/M^2, y/M^3) with M = 12N, denominators cleared.
ModelNormalization normalize_model(const BaseCurve& c);

struct ParamPoint {
  BigInt d;      // Q(u,v)
  TwistPoint p;  // (uv : 1 : u^2), reduced
  bool degenerate = false;  // u = 0 or Q(u,v) = 0
};

/// The point (uv : 1 : u^2) on E_{Q(u,v)}; (u,v) = (0,0) rejected.
ParamPoint parameterized_point(const BaseCurve& c, const BigInt& u, const BigInt& v);

namespace detail {
/// Doubling without the on-curve revalidation; used by the height loop
/// after the input point has been validated once.
TwistPoint double_unchecked(const BaseCurve& c, const BigInt& d, const TwistPoint& p);
}  // namespace detail

}  // namespace twistlab
