#include "twistlab/quartic.hpp"

#include "twistlab/arith.hpp"
#include "twistlab/parallel.hpp"

#include <algorithm>
#include <unordered_map>

namespace twistlab {

BigInt q_eval(const QuarticForm& f, const BigInt& u, const BigInt& v) {
  return u * (v * v * v + f.A * u * u * v + f.B * u * u * u);
}

namespace {

// The 64-bit engine requires (1 + |A| + |B|) (Z^4 + ...) < 2^62 so every
// partial product fits in i128 and every value fits in i64.
bool fits_i64_engine(const QuarticForm& f, long Z) {
  if (!fits_i64(f.A) || !fits_i64(f.B)) return false;
  BigInt bound = (1 + abs(f.A) + abs(f.B)) * BigInt(Z) * BigInt(Z) * BigInt(Z) * BigInt(Z);
  return bound < (BigInt(1) << 62);
}

struct SignTally {
  u128 r_q = 0;
  u64 s_plus = 0, s_minus = 0, s_unknown = 0;
  u64 distinct_plus = 0, distinct_minus = 0;
};

Omega value_omega(const RootRule& rule, i64 val) { return rule.lookup(from_i64(val)); }

// Run-length scan over one chunk of the sorted value array. Chunk borders
// are aligned to value boundaries by the caller.
SignTally tally_chunk(const std::vector<i64>& vals, std::size_t lo, std::size_t hi,
                      const RootRule& rule, bool with_signs,
                      std::vector<std::pair<i64, u64>>* hist) {
  SignTally t;
  std::size_t i = lo;
  while (i < hi) {
    std::size_t j = i;
    while (j < hi && vals[j] == vals[i]) ++j;
    u64 mult = j - i;
    t.r_q += static_cast<u128>(mult) * mult;
    if (hist) hist->emplace_back(vals[i], mult);
    if (with_signs && vals[i] != 0 && is_squarefree_i64(vals[i])) {
      switch (value_omega(rule, vals[i])) {
        case Omega::plus:
          t.s_plus += mult;
          ++t.distinct_plus;
          break;
        case Omega::minus:
          t.s_minus += mult;
          ++t.distinct_minus;
          break;
        case Omega::unknown:
          t.s_unknown += mult;
          break;
      }
    }
    i = j;
  }
  return t;
}

MomentReport moments_i64(const QuarticForm& f, long Z, const RootRule& rule,
                         const MomentOptions& opts) {
  const i64 a = to_i64(f.A), b = to_i64(f.B);
  const long W = 2 * Z + 1;
  std::vector<i64> vals(static_cast<std::size_t>(W) * W);

  // disjoint u-strips; the value layout is schedule-independent
  int threads = effective_threads(opts.threads);
  std::size_t n_strips = std::min<std::size_t>(W, std::max(1, threads * 8));
  run_blocks<int>(n_strips, threads, [&](std::size_t s) {
    long u0 = -Z + static_cast<long>(s * W / n_strips);
    long u1 = -Z + static_cast<long>((s + 1) * W / n_strips);
    for (long u = u0; u < u1; ++u) {
      std::size_t base = static_cast<std::size_t>(u + Z) * W;
      for (long v = -Z; v <= Z; ++v) {
        i128 cubic = static_cast<i128>(v) * v * v + static_cast<i128>(a) * u * u * v +
                     static_cast<i128>(b) * u * u * u;
        vals[base + (v + Z)] = static_cast<i64>(u * cubic);
      }
    }
    return 0;
  });

  MomentReport rep;
  rep.Z = Z;
  rep.total_pairs = static_cast<u64>(W) * W;

  if (opts.hashed_fast_path) {
    std::unordered_map<i64, u64> histo;
    histo.reserve(vals.size());
    for (i64 v : vals) ++histo[v];
    rep.r_histogram.assign(histo.begin(), histo.end());
    std::sort(rep.r_histogram.begin(), rep.r_histogram.end());
    u128 rq = 0;
    SignTally t;
    for (auto& [val, mult] : rep.r_histogram) {
      rq += static_cast<u128>(mult) * mult;
      if (opts.with_signs && val != 0 && is_squarefree_i64(val)) {
        switch (value_omega(rule, val)) {
          case Omega::plus: t.s_plus += mult; ++t.distinct_plus; break;
          case Omega::minus: t.s_minus += mult; ++t.distinct_minus; break;
          case Omega::unknown: t.s_unknown += mult; break;
        }
      }
    }
    t.r_q = rq;
    rep.R_Q = BigInt(static_cast<u64>(rq >> 64)) * (BigInt(1) << 64) +
              BigInt(static_cast<u64>(rq));
    rep.S_plus = t.s_plus;
    rep.S_minus = t.s_minus;
    rep.S_unknown = t.s_unknown;
    rep.distinct_plus = t.distinct_plus;
    rep.distinct_minus = t.distinct_minus;
    return rep;
  }

  std::sort(vals.begin(), vals.end());

  // chunk the sorted array on value boundaries, tally in parallel
  std::size_t n_chunks = std::max(1, threads * 4);
  std::vector<std::size_t> cuts{0};
  for (std::size_t k = 1; k < n_chunks; ++k) {
    std::size_t pos = vals.size() * k / n_chunks;
    while (pos < vals.size() && pos > 0 && vals[pos] == vals[pos - 1]) ++pos;
    if (pos > cuts.back() && pos < vals.size()) cuts.push_back(pos);
  }
  cuts.push_back(vals.size());

  std::vector<std::vector<std::pair<i64, u64>>> hists(cuts.size() - 1);
  auto tallies = run_blocks<SignTally>(cuts.size() - 1, threads, [&](std::size_t k) {
    return tally_chunk(vals, cuts[k], cuts[k + 1], rule, opts.with_signs, &hists[k]);
  });

  u128 rq = 0;
  SignTally total;
  for (auto& t : tallies) {
    rq += t.r_q;
    total.s_plus += t.s_plus;
    total.s_minus += t.s_minus;
    total.s_unknown += t.s_unknown;
    total.distinct_plus += t.distinct_plus;
    total.distinct_minus += t.distinct_minus;
  }
  for (auto& h : hists)
    rep.r_histogram.insert(rep.r_histogram.end(), h.begin(), h.end());

  rep.R_Q = BigInt(static_cast<u64>(rq >> 64)) * (BigInt(1) << 64) + BigInt(static_cast<u64>(rq));
  rep.S_plus = total.s_plus;
  rep.S_minus = total.s_minus;
  rep.S_unknown = total.s_unknown;
  rep.distinct_plus = total.distinct_plus;
  rep.distinct_minus = total.distinct_minus;
  return rep;
}

// Exact fallback for coefficients or boxes past the 64-bit bound. Same
// semantics; squarefree testing factors each distinct value exactly, so it
// is only practical for small boxes.
MomentReport moments_big(const QuarticForm& f, long Z, const RootRule& rule,
                         const MomentOptions& opts) {
  const long W = 2 * Z + 1;
  std::vector<BigInt> vals;
  vals.reserve(static_cast<std::size_t>(W) * W);
  for (long u = -Z; u <= Z; ++u)
    for (long v = -Z; v <= Z; ++v) vals.push_back(q_eval(f, BigInt(u), BigInt(v)));
  std::sort(vals.begin(), vals.end());

  MomentReport rep;
  rep.Z = Z;
  rep.total_pairs = static_cast<u64>(W) * W;
  rep.R_Q = 0;
  std::size_t i = 0;
  while (i < vals.size()) {
    std::size_t j = i;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    u64 mult = j - i;
    rep.R_Q += BigInt(mult) * BigInt(mult);
    if (opts.with_signs && sgn(vals[i]) != 0 && is_squarefree(vals[i])) {
      switch (rule.lookup(vals[i])) {
        case Omega::plus: rep.S_plus += mult; ++rep.distinct_plus; break;
        case Omega::minus: rep.S_minus += mult; ++rep.distinct_minus; break;
        case Omega::unknown: rep.S_unknown += mult; break;
      }
    }
    i = j;
  }
  return rep;
}

}  // namespace

u64 r_count(const QuarticForm& f, const BigInt& d, long Z) {
  if (Z < 1) throw std::invalid_argument("r_count: Z must be >= 1");
  u64 count = 0;
  if (fits_i64_engine(f, Z) && fits_i64(d)) {
    const i64 a = to_i64(f.A), b = to_i64(f.B), target = to_i64(d);
    for (long u = -Z; u <= Z; ++u)
      for (long v = -Z; v <= Z; ++v) {
        i128 cubic = static_cast<i128>(v) * v * v + static_cast<i128>(a) * u * u * v +
                     static_cast<i128>(b) * u * u * u;
        if (static_cast<i128>(u) * cubic == target) ++count;
      }
    return count;
  }
  for (long u = -Z; u <= Z; ++u)
    for (long v = -Z; v <= Z; ++v)
      if (q_eval(f, BigInt(u), BigInt(v)) == d) ++count;
  return count;
}

MomentReport box_moments(const QuarticForm& f, long Z, const RootRule& rule,
                         const MomentOptions& opts) {
  if (Z < 1) throw std::invalid_argument("box_moments: Z must be >= 1");
  if (fits_i64_engine(f, Z)) return moments_i64(f, Z, rule, opts);
  return moments_big(f, Z, rule, opts);
}

MomentReport second_moment(const QuarticForm& f, long Z, const MomentOptions& opts) {
  MomentOptions o = opts;
  o.with_signs = false;
  RootRule none;
  return box_moments(f, Z, none, o);
}

MomentReport sign_restricted_count(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                                   const MomentOptions& opts) {
  if (nu != 1 && nu != -1) throw std::invalid_argument("nu must be +-1");
  return box_moments(f, Z, rule, opts);
}

u64 distinct_represented(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                         const MomentOptions& opts) {
  MomentReport rep = box_moments(f, Z, rule, opts);
  return nu > 0 ? rep.distinct_plus : rep.distinct_minus;
}

CsCheck cauchy_schwarz_check(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                             const MomentOptions& opts) {
  if (nu != 1 && nu != -1) throw std::invalid_argument("nu must be +-1");
  MomentReport rep = box_moments(f, Z, rule, opts);
  u64 distinct = nu > 0 ? rep.distinct_plus : rep.distinct_minus;
  u64 s = nu > 0 ? rep.S_plus : rep.S_minus;
  CsCheck out;
  out.lhs = BigInt(distinct) * rep.R_Q;
  out.rhs = BigInt(s) * BigInt(s);
  out.holds = out.lhs >= out.rhs;
  return out;
}

}  // namespace twistlab
