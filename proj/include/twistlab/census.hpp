// The census H(Y): all squarefree d whose twist E_d carries a non-torsion
// rational point of canonical height <= log Y. Candidates come from the
// integral enumeration d0 y^2 = x1^3 + A x1 d1^2 b1^4 + B d1^3 b1^6; each
// twist keeps its minimal-height witness, root number, and predicted rank.
#pragma once

#include "twistlab/heights.hpp"
#include "twistlab/rootnum.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace twistlab {

struct CensusEntry {
  BigInt d;
  HeightValue eta_log;   // log eta_d: minimal canonical height found
  TwistPoint witness;
  Omega omega = Omega::unknown;
  int predicted_rank = 0;  // 1 if omega = -1, 2 if omega = +1, 0 unknown
};

struct CensusReport {
  double Y = 0.0;
  std::vector<CensusEntry> entries;  // sorted by (|d|, d)
  u64 count = 0;
  double omega_minus_frac = 0.0, omega_plus_frac = 0.0, omega_unknown_frac = 0.0;
  double ar_predicted = 0.0;  // 1 + renormalized Omega_plus over known-omega entries
  u64 boundary_count = 0;     // twists unresolved at the precision cap
};

enum class RangeMode { fast, rigorous };

struct CensusConfig {
  RangeMode mode = RangeMode::fast;
  double kappa = 4.0;          // fast-mode range R = kappa * Y^2
  double target_error = 1e-3;  // precision of reported eta_log values
  int threads = 1;
  HeightsConfig heights;
  // Sound candidate prefilter max(|x1| d1 b1, d1^2 b1^3) <= Y^2 e^{2C}:
  // any point with h_hat <= log Y satisfies it, so the census is unchanged.
  bool prefilter = true;
};

/// Streams candidate twist points from the enumeration grid: squarefree
/// d1 >= 1, b1 >= 1 with d1 b1^2 <= R, |x1| <= R, gcd(x1, d1 b1) = 1,
/// where R = ceil(Y^2 e^{2C}) (rigorous) or ceil(kappa Y^2) (fast).
/// Emission is deduplicated by (d, X).
void enumerate_candidates(const BaseCurve& c, double Y, const CensusConfig& cfg,
                          const std::function<void(const BigInt& d, const TwistPoint&)>& sink);

CensusReport build_census(const BaseCurve& c, double Y, const CensusConfig& cfg = {});

/// Independent oracle: per squarefree |d| <= D_max, scans affine
/// x-coordinates m/q with the triple height bounded by naive_bound and
/// solves exactly for a rational y. naive_bound = 0 derives Y^2 e^{2C}.
CensusReport brute_force_census(const BaseCurve& c, double Y, long D_max, long naive_bound = 0,
                                const CensusConfig& cfg = {});

/// Least-squares slope of log count against log Y; zero-count reports are
/// excluded. Needs at least 3 usable reports.
double growth_exponent(const std::vector<std::pair<double, u64>>& y_counts);
double growth_exponent(const std::vector<CensusReport>& reports);

struct OmegaStats {
  double omega_minus = 0.0, omega_plus = 0.0, omega_unknown = 0.0;
  double ar_predicted = 0.0;
};

/// Fractions and the parity-predicted average rank; empty census rejected.
OmegaStats omega_statistics(const CensusReport& report);

/// CSV: d, eta_log, eta_err, witness_X_num, witness_X_den, witness_Y_num,
/// witness_Y_den, omega, predicted_rank. `header` is emitted as a comment
/// first line when nonempty.
void write_census_csv(const CensusReport& r, std::ostream& os, const std::string& header);

/// Summary JSON: Y, count, fractions, ar_predicted, boundary_count.
void write_census_json(const CensusReport& r, const BaseCurve& c, std::ostream& os,
                       const std::string& config_echo);

}  // namespace twistlab
