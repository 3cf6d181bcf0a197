// The binary quartic form Q(u,v) = u(v^3 + Au^2 v + Bu^3), its
// representation counts r_Q(d;Z) over the box |u|,|v| <= Z, the second
// moment R_Q(Z), and the sign-restricted squarefree count S_{Q,nu}(Z).
#pragma once

#include "twistlab/bigint.hpp"
#include "twistlab/rootnum.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace twistlab {

struct QuarticForm {
  BigInt A;
  BigInt B;

  static QuarticForm of(const BaseCurve& c) { return {c.A, c.B}; }
};

BigInt q_eval(const QuarticForm& f, const BigInt& u, const BigInt& v);

struct MomentReport {
  long Z = 0;
  u64 total_pairs = 0;  // (2Z+1)^2
  // Sparse histogram value -> multiplicity, ascending by value. Only
  // populated by the 64-bit engine (values provably below 2^62).
  std::vector<std::pair<i64, u64>> r_histogram;
  BigInt R_Q;  // sum of squared multiplicities
  u64 S_plus = 0, S_minus = 0, S_unknown = 0;
  u64 distinct_plus = 0, distinct_minus = 0;
};

struct MomentOptions {
  int threads = 1;
  bool hashed_fast_path = false;  // default: sort-and-run-length reference path
  bool with_signs = true;         // fill S_* and distinct_* (needs factoring)
};

/// Exact count of pairs |u|,|v| <= Z with Q(u,v) = d.
u64 r_count(const QuarticForm& f, const BigInt& d, long Z);

/// Full moment computation over the box. Aggregates the value multiset
/// (never the quadruple loop). Results are independent of the strip schedule.
MomentReport box_moments(const QuarticForm& f, long Z, const RootRule& rule,
                         const MomentOptions& opts = {});

/// R_Q only (no factoring, no root numbers).
MomentReport second_moment(const QuarticForm& f, long Z, const MomentOptions& opts = {});

/// S_{Q,nu}(Z): sum of |mu(Q(u,v))| over box pairs whose value has
/// omega(E_d) = nu under the rule; produced by box_moments.
MomentReport sign_restricted_count(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                                   const MomentOptions& opts = {});

/// Number of distinct squarefree d with r_Q(d;Z) >= 1 and omega(E_d) = nu.
u64 distinct_represented(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                         const MomentOptions& opts = {});

struct CsCheck {
  BigInt lhs;  // distinct_nu * R_Q
  BigInt rhs;  // S_nu^2
  bool holds = false;
};

/// Verifies distinct * R_Q >= S_nu^2 exactly (Cauchy-Schwarz; a failure
/// signals an implementation bug).
CsCheck cauchy_schwarz_check(const QuarticForm& f, long Z, int nu, const RootRule& rule,
                             const MomentOptions& opts = {});

}  // namespace twistlab
