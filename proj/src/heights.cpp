#include "twistlab/heights.hpp"

#include "twistlab/arith.hpp"

#include <algorithm>
#include <cmath>

namespace twistlab {

double naive_height(const TwistPoint& p) {
  if (p.is_infinity()) return 0.0;
  BigInt ax = abs(p.x());
  const BigInt& m = ax > p.z() ? ax : p.z();
  if (m == 1) return 0.0;
  return log_abs(m);
}

double comparison_constant(const BaseCurve& c) {
  if (c.height_margin_c > 0.0) return c.height_margin_c;
  // Monotone majorant of the Silverman-style bounds for y^2 = x^3 + Ax + B:
  // h(j) <= log(6912 max(|A|,1)^3 + 432 B^2), h(Delta) <= log(16(4|A|^3+27B^2)).
  BigInt a = abs(c.A), b = abs(c.B);
  BigInt amax = a > 1 ? a : BigInt(1);
  BigInt hj_arg = 6912 * amax * amax * amax + 432 * b * b;
  BigInt hd_arg = 4 * a * a * a + 27 * b * b;
  if (hd_arg < 1) hd_arg = 1;
  hd_arg *= 16;
  return log_abs(hj_arg) / 8.0 + log_abs(hd_arg) / 12.0 + 1.07;
}

HeightRefiner::HeightRefiner(const BaseCurve& c, const BigInt& d, TwistPoint p)
    : curve_(c), d_(d), q_(std::move(p)) {
  if (q_.is_infinity()) throw std::domain_error("height of the point at infinity");
  if (!on_curve(curve_, d_, q_)) throw std::domain_error("height: point not on E_d");
  c_const_ = comparison_constant(curve_);
}

int HeightRefiner::doublings_for(double target_error, int cap) const {
  if (target_error <= 0.0) throw std::invalid_argument("target_error must be > 0");
  int n = 0;
  double e = c_const_;
  while (e > target_error) {
    if (++n > cap) {
      throw PrecisionUnattainable("target error " + std::to_string(target_error) +
                                  " needs more than " + std::to_string(cap) + " doublings");
    }
    e *= 0.25;
  }
  return n;
}

HeightValue HeightRefiner::at(int n) {
  if (n < n_) throw std::invalid_argument("height precision cannot decrease");
  while (n_ < n && !hit_infinity_) {
    q_ = detail::double_unchecked(curve_, d_, q_);
    ++n_;
    if (q_.is_infinity()) hit_infinity_ = true;  // the point was torsion
  }
  if (hit_infinity_) return {0.0, 0.0};
  double scale = std::pow(0.25, n_);
  return {0.5 * scale * naive_height(q_), scale * c_const_};
}

HeightValue canonical_height(const BaseCurve& c, const BigInt& d, const TwistPoint& p,
                             double target_error, const HeightsConfig& cfg) {
  if (p.is_infinity()) throw std::domain_error("canonical height of the point at infinity");
  if (is_torsion(c, d, p)) return {0.0, 0.0};
  HeightRefiner ref(c, d, p);
  return ref.at(ref.doublings_for(target_error, cfg.doubling_cap));
}

EtaStatus classify_eta(const HeightValue& h, double log_y) {
  if (h.value + h.error_bound <= log_y) return EtaStatus::within;
  if (h.value - h.error_bound > log_y) return EtaStatus::exceeds;
  return EtaStatus::boundary;
}

EtaCheck eta_log_bound_check(const BaseCurve& c, const BigInt& d, const TwistPoint& p,
                             double log_y, const HeightsConfig& cfg) {
  HeightRefiner ref(c, d, p);
  int n = 0;
  double e = ref.comparison_c();
  while (e > 0.25 && n < cfg.doubling_cap) e *= 0.25, ++n;  // coarse start
  for (;; ++n) {
    HeightValue h = ref.at(n);
    EtaStatus st = classify_eta(h, log_y);
    if (st != EtaStatus::boundary || n >= cfg.doubling_cap) return {st, h};
  }
}

}  // namespace twistlab
