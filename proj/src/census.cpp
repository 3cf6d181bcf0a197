#include "twistlab/census.hpp"

#include "twistlab/arith.hpp"
#include "twistlab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace twistlab {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

i64 gcd_i64(i64 a, i64 b) { return static_cast<i64>(std::gcd(a, b)); }

struct GridPair {
  i64 d1;  // squarefree
  i64 b1;
};

// (d1, b1) with d1 squarefree and d1*b1^2 <= R, in lexicographic order.
// The decomposition w = d1*b1^2 is unique, so no (x1, w) is visited twice
// and emission is deduplicated by construction.
std::vector<GridPair> grid_pairs(i64 R) {
  std::vector<GridPair> pairs;
  for (i64 d1 = 1; d1 <= R; ++d1) {
    if (!is_squarefree_i64(d1)) continue;
    for (i64 b1 = 1; d1 * b1 * b1 <= R; ++b1) pairs.push_back({d1, b1});
  }
  return pairs;
}

i64 range_limit(const BaseCurve& c, double Y, const CensusConfig& cfg) {
  double r = cfg.mode == RangeMode::rigorous
                 ? Y * Y * std::exp(2.0 * comparison_constant(c))
                 : cfg.kappa * Y * Y;
  double r_up = std::ceil(r);
  if (r_up > 1e15) throw std::invalid_argument("census range too large: R = " + fmt_real(r_up));
  return static_cast<i64>(r_up);
}

i64 prefilter_limit(const BaseCurve& c, double Y) {
  double p = std::ceil(Y * Y * std::exp(2.0 * comparison_constant(c)));
  return p > 1e15 ? static_cast<i64>(1e15) : static_cast<i64>(p);
}

struct Candidate {
  TwistPoint p;
  HeightValue h;
  EtaStatus status;
};

// A twist's candidate points that were not ruled out at coarse precision.
using TwistMap = std::map<BigInt, std::vector<Candidate>>;

// Scans one (d1, b1) cell of the enumeration grid.
template <typename Sink>
void scan_cell(const BaseCurve& c, const GridPair& g, i64 R, i64 pre, bool use_prefilter,
               Sink&& sink) {
  const i64 d1 = g.d1, b1 = g.b1;
  const i64 w = d1 * b1 * b1;
  const i64 d1b1 = d1 * b1;
  if (use_prefilter) {
    // every point with h_hat <= log Y has exp h_x = max(|x1| d1 b1, d1^2 b1^3) <= pre
    i128 zpart = static_cast<i128>(d1b1) * d1b1 * b1;
    if (zpart > pre) return;
  }
  i64 xmax = R;
  if (use_prefilter) xmax = std::min<i64>(xmax, pre / d1b1);

  const bool small = fits_i64(c.A) && fits_i64(c.B) &&
                     (1 + abs(c.A) + abs(c.B)) * BigInt(R) * BigInt(R) * BigInt(R) < (BigInt(1) << 62);
  const i64 a = small ? to_i64(c.A) : 0, b = small ? to_i64(c.B) : 0;

  const BigInt zproj = BigInt(d1) * d1 * b1 * b1 * b1;  // d1^2 b1^3
  for (i64 x1 = -xmax; x1 <= xmax; ++x1) {
    if (gcd_i64(x1 < 0 ? -x1 : x1, d1b1) != 1) continue;
    BigInt d;
    BigInt s_big;
    if (small) {
      i128 t128 = static_cast<i128>(x1) * x1 * x1 + static_cast<i128>(a) * x1 * w * w +
                  static_cast<i128>(b) * w * w * w;
      if (t128 == 0) continue;  // 2-torsion
      i64 t = static_cast<i64>(t128);
      auto [d0, s] = squarefree_part_i64(t);
      if (gcd_i64(d0 < 0 ? -d0 : d0, d1) != 1) continue;  // mu(d0*d1) = 0
      d = BigInt(d0) * d1;
      s_big = from_i64(s);
    } else {
      BigInt wz(w);
      BigInt t = BigInt(x1) * x1 * x1 + c.A * x1 * wz * wz + c.B * wz * wz * wz;
      if (sgn(t) == 0) continue;
      auto dec = squarefree_part(t);
      BigInt g;
      mpz_gcd(g.get_mpz_t(), dec.d0.get_mpz_t(), BigInt(d1).get_mpz_t());
      if (g != 1) continue;
      d = dec.d0 * d1;
      s_big = dec.s;
    }
    // affine (x1/(d1 b1^2), s/(d1^2 b1^3)) -> primitive triple
    TwistPoint p = TwistPoint::from_projective(BigInt(x1) * d1b1, s_big, zproj);
    sink(d, p);
  }
}

// Coarse height classification; drops candidates strictly above log Y.
void classify_candidate(const BaseCurve& c, const BigInt& d, const TwistPoint& p, double log_y,
                        const HeightsConfig& hcfg, TwistMap& out) {
  HeightRefiner ref(c, d, p);
  int n = 0;
  double e = ref.comparison_c();
  while (e > 0.25 && n < hcfg.doubling_cap) e *= 0.25, ++n;
  for (;; ++n) {
    HeightValue h = ref.at(n);
    if (ref.hit_infinity()) return;  // torsion; never a census witness
    EtaStatus st = classify_eta(h, log_y);
    if (st == EtaStatus::exceeds) return;
    if (st == EtaStatus::within || n >= hcfg.doubling_cap) {
      if (st == EtaStatus::within && h.value > h.error_bound) {
        // provably nonzero height: non-torsion without the order test
        out[d].push_back({p, h, st});
      } else if (!is_torsion(c, d, p)) {
        out[d].push_back({p, h, st});
      }
      return;
    }
  }
}

void merge_twist_maps(TwistMap& into, TwistMap&& from) {
  for (auto& [d, cands] : from) {
    auto& slot = into[d];
    slot.insert(slot.end(), std::make_move_iterator(cands.begin()),
                std::make_move_iterator(cands.end()));
  }
}

// abs(|X|-numerator) of a non-infinite point, for the witness tie-break.
BigInt x_num_abs(const TwistPoint& p) { return abs(BigInt(p.affine_x().get_num())); }

bool witness_less(const Candidate& a, const Candidate& b) {
  if (a.h.value != b.h.value) return a.h.value < b.h.value;
  BigInt na = x_num_abs(a.p), nb = x_num_abs(b.p);
  if (na != nb) return na < nb;
  return sgn(a.p.y()) > sgn(b.p.y());  // prefer positive y
}

CensusReport finalize_report(const BaseCurve& c, double Y, const CensusConfig& cfg,
                             TwistMap&& twists) {
  const double log_y = std::log(Y);
  RootRule rule = derive_rule(c);

  std::vector<std::pair<BigInt, std::vector<Candidate>>> ordered;
  ordered.reserve(twists.size());
  for (auto& [d, cands] : twists) ordered.emplace_back(d, std::move(cands));
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    BigInt aa = abs(a.first), ab = abs(b.first);
    if (aa != ab) return aa < ab;
    return a.first < b.first;
  });

  CensusReport rep;
  rep.Y = Y;

  struct Finalized {
    bool is_entry = false;
    bool is_boundary = false;
    CensusEntry entry;
  };
  auto finalize_one = [&](std::size_t i) -> Finalized {
    auto& [d, cands] = ordered[i];
    Finalized out;
    bool any_within = false, any_boundary = false;
    for (auto& cand : cands) {
      // refine to the reporting precision, then further if the membership
      // test is still unresolved; unresolved cases stay at the cap
      HeightRefiner ref(c, d, cand.p);
      int n;
      try {
        n = ref.doublings_for(cfg.target_error, cfg.heights.doubling_cap);
      } catch (const PrecisionUnattainable&) {
        n = cfg.heights.doubling_cap;
      }
      cand.h = ref.at(n);
      cand.status = classify_eta(cand.h, log_y);
      while (cand.status == EtaStatus::boundary && n < cfg.heights.doubling_cap) {
        cand.h = ref.at(++n);
        cand.status = classify_eta(cand.h, log_y);
      }
      if (cand.status == EtaStatus::within) any_within = true;
      if (cand.status == EtaStatus::boundary) any_boundary = true;
    }
    if (!any_within) {
      out.is_boundary = any_boundary;  // membership unresolved at the cap
      return out;
    }
    const Candidate* best = nullptr;
    for (const auto& cand : cands) {
      if (cand.status == EtaStatus::exceeds) continue;
      if (!best || witness_less(cand, *best)) best = &cand;
    }
    out.is_entry = true;
    out.entry.d = d;
    out.entry.eta_log = best->h;
    out.entry.witness = best->p;
    out.entry.omega = rule.lookup(d);  // d squarefree by construction
    out.entry.predicted_rank =
        out.entry.omega == Omega::minus ? 1 : (out.entry.omega == Omega::plus ? 2 : 0);
    return out;
  };

  auto finals = run_blocks<Finalized>(ordered.size(), cfg.threads,
                                      [&](std::size_t i) { return finalize_one(i); });
  for (auto& f : finals) {
    if (f.is_entry)
      rep.entries.push_back(std::move(f.entry));
    else if (f.is_boundary)
      ++rep.boundary_count;
  }
  rep.count = rep.entries.size();
  if (rep.count > 0) {
    OmegaStats st = omega_statistics(rep);
    rep.omega_minus_frac = st.omega_minus;
    rep.omega_plus_frac = st.omega_plus;
    rep.omega_unknown_frac = st.omega_unknown;
    rep.ar_predicted = st.ar_predicted;
  }
  return rep;
}

}  // namespace

void enumerate_candidates(const BaseCurve& c, double Y, const CensusConfig& cfg,
                          const std::function<void(const BigInt&, const TwistPoint&)>& sink) {
  c.validate();
  if (Y < 1.0) throw std::invalid_argument("census requires Y >= 1");
  const i64 R = range_limit(c, Y, cfg);
  const i64 pre = prefilter_limit(c, Y);
  for (const GridPair& g : grid_pairs(R))
    scan_cell(c, g, R, pre, cfg.prefilter, sink);
}

CensusReport build_census(const BaseCurve& c, double Y, const CensusConfig& cfg) {
  c.validate();
  if (Y < 1.0) throw std::invalid_argument("census requires Y >= 1");
  const double log_y = std::log(Y);
  const i64 R = range_limit(c, Y, cfg);
  const i64 pre = prefilter_limit(c, Y);

  std::vector<GridPair> pairs = grid_pairs(R);
  std::size_t n_blocks = std::max<std::size_t>(1, std::min(pairs.size(),
                                               static_cast<std::size_t>(effective_threads(cfg.threads)) * 8));
  auto maps = run_blocks<TwistMap>(n_blocks, cfg.threads, [&](std::size_t blk) {
    TwistMap local;
    std::size_t lo = pairs.size() * blk / n_blocks;
    std::size_t hi = pairs.size() * (blk + 1) / n_blocks;
    for (std::size_t i = lo; i < hi; ++i) {
      scan_cell(c, pairs[i], R, pre, cfg.prefilter, [&](const BigInt& d, const TwistPoint& p) {
        classify_candidate(c, d, p, log_y, cfg.heights, local);
      });
    }
    return local;
  });

  TwistMap twists;
  for (auto& m : maps) merge_twist_maps(twists, std::move(m));
  return finalize_report(c, Y, cfg, std::move(twists));
}

CensusReport brute_force_census(const BaseCurve& c, double Y, long D_max, long naive_bound,
                                const CensusConfig& cfg) {
  c.validate();
  if (Y < 1.0) throw std::invalid_argument("census requires Y >= 1");
  const double log_y = std::log(Y);
  i64 nb = naive_bound > 0 ? naive_bound : prefilter_limit(c, Y);

  // candidate x-denominators: q with q^(3/2) <= nb
  std::vector<i64> dens;
  for (i64 q = 1; static_cast<double>(q) * std::sqrt(static_cast<double>(q)) <= static_cast<double>(nb); ++q)
    dens.push_back(q);

  std::vector<i64> twist_list;
  for (i64 ad = 1; ad <= D_max; ++ad) {
    if (!is_squarefree_i64(ad)) continue;
    twist_list.push_back(ad);
    twist_list.push_back(-ad);
  }

  const bool small = fits_i64(c.A) && fits_i64(c.B) &&
                     (1 + abs(c.A) + abs(c.B)) * BigInt(nb) * BigInt(nb) * BigInt(nb) *
                             BigInt(D_max) * BigInt(nb) <
                         (BigInt(1) << 126);
  if (!small) throw std::invalid_argument("brute_force_census: parameters too large");
  const i64 a = to_i64(c.A), b = to_i64(c.B);

  auto maps = run_blocks<TwistMap>(twist_list.size(), cfg.threads, [&](std::size_t ti) {
    TwistMap local;
    const i64 d = twist_list[ti];
    for (i64 q : dens) {
      const i64 mmax = static_cast<i64>(static_cast<double>(nb) / std::sqrt(static_cast<double>(q)));
      const i128 q2 = static_cast<i128>(q) * q;
      for (i64 m = -mmax; m <= mmax; ++m) {
        if (gcd_i64(m < 0 ? -m : m, q) != 1) continue;
        i128 T = static_cast<i128>(m) * m * m + static_cast<i128>(a) * m * q2 +
                 static_cast<i128>(b) * q2 * q;
        if (T == 0) continue;  // y = 0: 2-torsion
        if ((T > 0) != (d > 0)) continue;
        // y^2 = T/(d q^3) is a rational square iff T*d*q is a perfect square
        i128 v128 = T * d * q;
        BigInt root;
        if (v128 <= static_cast<i128>(std::numeric_limits<u64>::max())) {
          u64 r64 = 0;
          if (!is_square_u64(static_cast<u64>(v128), &r64)) continue;
          root = BigInt(static_cast<unsigned long>(r64));
        } else {
          BigInt v = from_i64(static_cast<i64>(v128 >> 64));
          v <<= 64;
          v += BigInt(static_cast<unsigned long>(static_cast<u64>(v128)));
          if (!is_perfect_square(v)) continue;
          root = isqrt_exact(v);
        }
        BigRat X(from_i64(m), from_i64(q));
        X.canonicalize();
        BigRat Yc(root, BigInt(std::abs(d)) * q * q);
        Yc.canonicalize();
        TwistPoint p = TwistPoint::from_affine(X, Yc);
        if (!on_curve(c, from_i64(d), p))
          throw std::logic_error("oracle point fails the curve equation");
        classify_candidate(c, from_i64(d), p, log_y, cfg.heights, local);
      }
    }
    return local;
  });

  TwistMap twists;
  for (auto& m : maps) merge_twist_maps(twists, std::move(m));
  return finalize_report(c, Y, cfg, std::move(twists));
}

double growth_exponent(const std::vector<std::pair<double, u64>>& y_counts) {
  if (y_counts.size() < 3) throw std::invalid_argument("growth_exponent needs >= 3 reports");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto& [y, count] : y_counts) {
    if (count == 0) continue;
    double lx = std::log(y), ly = std::log(static_cast<double>(count));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("growth_exponent: fewer than 2 nonzero counts");
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("growth_exponent: degenerate Y spacing");
  return (n * sxy - sx * sy) / denom;
}

double growth_exponent(const std::vector<CensusReport>& reports) {
  std::vector<std::pair<double, u64>> yc;
  yc.reserve(reports.size());
  for (auto& r : reports) yc.emplace_back(r.Y, r.count);
  return growth_exponent(yc);
}

OmegaStats omega_statistics(const CensusReport& report) {
  if (report.entries.empty()) throw std::domain_error("omega_statistics: empty census");
  u64 nm = 0, np = 0, nu = 0;
  for (auto& e : report.entries) {
    if (e.omega == Omega::minus)
      ++nm;
    else if (e.omega == Omega::plus)
      ++np;
    else
      ++nu;
  }
  OmegaStats st;
  double total = static_cast<double>(report.entries.size());
  st.omega_minus = nm / total;
  st.omega_plus = np / total;
  st.omega_unknown = nu / total;
  st.ar_predicted = (nm + np) > 0
                        ? (1.0 * nm + 2.0 * np) / static_cast<double>(nm + np)
                        : std::numeric_limits<double>::quiet_NaN();
  return st;
}

void write_census_csv(const CensusReport& r, std::ostream& os, const std::string& header) {
  if (!header.empty()) os << "# " << header << "\n";
  os << "d,eta_log,eta_err,witness_X_num,witness_X_den,witness_Y_num,witness_Y_den,omega,"
        "predicted_rank\n";
  for (const auto& e : r.entries) {
    BigRat X = e.witness.affine_x(), Yc = e.witness.affine_y();
    os << e.d.get_str() << ',' << fmt_real(e.eta_log.value) << ',' << fmt_real(e.eta_log.error_bound)
       << ',' << X.get_num().get_str() << ',' << X.get_den().get_str() << ','
       << Yc.get_num().get_str() << ',' << Yc.get_den().get_str() << ',' << omega_int(e.omega)
       << ',' << e.predicted_rank << '\n';
  }
}

void write_census_json(const CensusReport& r, const BaseCurve& c, std::ostream& os,
                       const std::string& config_echo) {
  nlohmann::ordered_json j;
  j["Y"] = r.Y;
  j["count"] = r.count;
  j["omega_minus_frac"] = r.omega_minus_frac;
  j["omega_plus_frac"] = r.omega_plus_frac;
  j["omega_unknown_frac"] = r.omega_unknown_frac;
  if (std::isnan(r.ar_predicted))
    j["ar_predicted"] = nullptr;
  else
    j["ar_predicted"] = r.ar_predicted;
  j["boundary_count"] = r.boundary_count;
  j["curve"] = {{"label", c.label}, {"A", c.A.get_str()}, {"B", c.B.get_str()},
                {"conductor", c.conductor}, {"base_root_number", c.base_root_number}};
  j["config"] = config_echo;
  os << j.dump(2) << "\n";
}

}  // namespace twistlab
