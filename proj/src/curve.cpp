#include "twistlab/curve.hpp"

#include "twistlab/arith.hpp"

#include <sstream>

namespace twistlab {

BigInt BaseCurve::discriminant_core() const { return 4 * A * A * A + 27 * B * B; }

void BaseCurve::validate() const {
  if (sgn(discriminant_core()) == 0)
    throw std::invalid_argument("singular curve: 4A^3 + 27B^2 = 0");
  if (conductor < 1) throw std::invalid_argument("conductor must be >= 1");
  if (base_root_number != 1 && base_root_number != -1)
    throw std::invalid_argument("base root number must be +-1");
}

TwistPoint TwistPoint::from_projective(BigInt x, BigInt y, BigInt z) {
  if (sgn(x) == 0 && sgn(y) == 0 && sgn(z) == 0)
    throw std::invalid_argument("all-zero projective triple");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
  x /= g;
  y /= g;
  z /= g;
  int flip = sgn(z) != 0 ? sgn(z) : sgn(y);
  if (flip < 0) {
    x = -x;
    y = -y;
    z = -z;
  }
  TwistPoint p;
  p.x_ = std::move(x);
  p.y_ = std::move(y);
  p.z_ = std::move(z);
  return p;
}

TwistPoint TwistPoint::from_affine(const BigRat& X, const BigRat& Y) {
  BigInt qx = X.get_den(), qy = Y.get_den();
  BigInt g;
  mpz_gcd(g.get_mpz_t(), qx.get_mpz_t(), qy.get_mpz_t());
  BigInt l = qx / g * qy;  // lcm of the denominators
  return from_projective(X.get_num() * (l / qx), Y.get_num() * (l / qy), l);
}

BigRat TwistPoint::affine_x() const {
  if (is_infinity()) throw std::domain_error("affine view of the point at infinity");
  BigRat r(x_, z_);
  r.canonicalize();
  return r;
}

BigRat TwistPoint::affine_y() const {
  if (is_infinity()) throw std::domain_error("affine view of the point at infinity");
  BigRat r(y_, z_);
  r.canonicalize();
  return r;
}

std::string TwistPoint::str() const {
  std::ostringstream os;
  os << "(" << x_.get_str() << ":" << y_.get_str() << ":" << z_.get_str() << ")";
  return os.str();
}

bool on_curve(const BaseCurve& c, const BigInt& d, const TwistPoint& p) {
  const BigInt &x = p.x(), &y = p.y(), &z = p.z();
  if (sgn(x) == 0 && sgn(y) == 0 && sgn(z) == 0)
    throw std::invalid_argument("all-zero projective triple");
  BigInt lhs = d * y * y * z;
  BigInt rhs = x * x * x + c.A * x * z * z + c.B * z * z * z;
  return lhs == rhs;
}

TwistPoint negate(const TwistPoint& p) {
  if (p.is_infinity()) return p;
  return TwistPoint::from_projective(p.x(), -p.y(), p.z());
}

namespace {

// Chord/tangent combination with slope U/V through P1, P2 (P1 may equal P2):
//   X3 = d (U/V)^2 - X1 - X2,  Y3 = (U/V)(X1 - X3) - Y1.
TwistPoint combine(const BigInt& d, const BigInt& U, const BigInt& V, const TwistPoint& p1,
                   const TwistPoint& p2) {
  const BigInt &x1 = p1.x(), &y1 = p1.y(), &z1 = p1.z();
  const BigInt &x2 = p2.x(), &z2 = p2.z();
  BigInt zz = z1 * z2;
  BigInt V2 = V * V;
  BigInt num = d * U * U * zz - (x1 * z2 + x2 * z1) * V2;  // X3 = num / den
  BigInt den = V2 * zz;
  BigInt ynum = U * (x1 * den - z1 * num) - y1 * V * den;  // Y3 = ynum / (V z1 den)
  return TwistPoint::from_projective(num * V * z1, ynum, V * z1 * den);
}

TwistPoint double_point(const BaseCurve& c, const BigInt& d, const TwistPoint& p) {
  if (p.is_infinity()) return p;
  if (sgn(p.y()) == 0) return TwistPoint::infinity();  // 2-torsion
  const BigInt &x = p.x(), &z = p.z();
  BigInt U = 3 * x * x + c.A * z * z;  // tangent slope U/V
  BigInt V = 2 * d * p.y() * z;
  return combine(d, U, V, p, p);
}

TwistPoint add_unchecked(const BaseCurve& c, const BigInt& d, const TwistPoint& p,
                         const TwistPoint& q) {
  if (p.is_infinity()) return q;
  if (q.is_infinity()) return p;
  BigInt xz = p.x() * q.z(), zx = q.x() * p.z();
  if (xz == zx) {
    BigInt yz = p.y() * q.z(), zy = q.y() * p.z();
    if (yz == -zy) return TwistPoint::infinity();  // Q = -P
    return double_point(c, d, p);                  // same point
  }
  BigInt U = q.y() * p.z() - p.y() * q.z();  // chord slope U/V
  BigInt V = zx - xz;
  return combine(d, U, V, p, q);
}

}  // namespace

namespace detail {
TwistPoint double_unchecked(const BaseCurve& c, const BigInt& d, const TwistPoint& p) {
  return double_point(c, d, p);
}
}  // namespace detail

TwistPoint add(const BaseCurve& c, const BigInt& d, const TwistPoint& p, const TwistPoint& q) {
  if (!on_curve(c, d, p) || !on_curve(c, d, q))
    throw std::domain_error("add: point not on E_d for d = " + d.get_str());
  return add_unchecked(c, d, p, q);
}

TwistPoint multiply(const BaseCurve& c, const BigInt& d, long long n, const TwistPoint& p) {
  if (!on_curve(c, d, p)) throw std::domain_error("multiply: point not on E_d");
  if (n == 0) return TwistPoint::infinity();
  bool neg = n < 0;
  unsigned long long k = neg ? -static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
  TwistPoint acc = TwistPoint::infinity();
  TwistPoint base = p;
  while (k) {
    if (k & 1) acc = add_unchecked(c, d, acc, base);
    k >>= 1;
    if (k) base = double_point(c, d, base);
  }
  return neg ? negate(acc) : acc;
}

bool is_torsion(const BaseCurve& c, const BigInt& d, const TwistPoint& p) {
  if (!on_curve(c, d, p)) throw std::domain_error("is_torsion: point not on E_d");
  if (p.is_infinity()) return true;
  TwistPoint acc = p;
  for (int n = 2; n <= 12; ++n) {
    acc = add_unchecked(c, d, acc, p);
    if (acc.is_infinity()) return true;
  }
  return false;
}

ModelNormalization normalize_model(const BaseCurve& c) {
  BigInt M = 12 * BigInt(c.conductor);
  BigInt M2 = M * M, M4 = M2 * M2;
  return {M, c.A * M4, c.B * M4 * M2};
}

ParamPoint parameterized_point(const BaseCurve& c, const BigInt& u, const BigInt& v) {
  if (sgn(u) == 0 && sgn(v) == 0) throw std::invalid_argument("parameterized_point(0, 0)");
  BigInt d = u * (v * v * v + c.A * u * u * v + c.B * u * u * u);
  ParamPoint out;
  out.d = d;
  out.p = TwistPoint::from_projective(u * v, 1, u * u);
  out.degenerate = sgn(u) == 0 || sgn(d) == 0;
  return out;
}

}  // namespace twistlab
