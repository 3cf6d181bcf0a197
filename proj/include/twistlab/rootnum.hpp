// Root numbers omega(E_d) of quadratic twists via congruence rules.
//
// Shipped rules come in two forms: a verified per-curve residue table
// (bundled for the congruent-number curve), and a derived rule
// omega(E_d) = omega(E) * chi_d(-N) for squarefree d with gcd(d, 2N) = 1,
// evaluated through the Kronecker symbol. Everything else is `unknown`:
// statistics report unknown mass rather than misattribute signs.
#pragma once

#include "twistlab/curve.hpp"

#include <map>
#include <string>

namespace twistlab {

enum class Omega : int {
  minus = -1,
  unknown = 0,
  plus = +1,
};

inline int omega_int(Omega w) { return static_cast<int>(w); }

struct RootRule {
  long modulus = 0;
  bool reflect_negative = false;  // d < 0 resolved as |d| (B = 0 isomorphism)
  std::map<long, int> table_pos;  // residue of d mod modulus -> +-1, d > 0
  std::map<long, int> table_neg;  // residue of d mod modulus -> +-1, d < 0

  // Override entries with their own modulus, consulted before the tables.
  long override_modulus = 0;
  std::map<long, int> override_table;

  // Derived-formula fallback for residues not in the tables.
  bool derived_enabled = false;
  long conductor = 0;
  int base_w = 1;

  /// Raw lookup; no squarefree check. Unknown when outside the domain.
  Omega lookup(const BigInt& d) const;
};

/// Builds the rule for a curve: the config table when present, otherwise
/// the derived rule tabulated mod 4N; the optional override file is layered
/// on top in both cases.
RootRule derive_rule(const BaseCurve& c);

/// omega(E_d) for squarefree d; rejects non-squarefree d (std::domain_error).
Omega omega(const RootRule& rule, const BigInt& d);

/// Override file: lines `residue<TAB>modulus<TAB>+-1`, one shared modulus.
/// Entries apply to d > 0 by residue, and to d < 0 through |d| when the
/// rule reflects negatives.
void load_rule_override(RootRule& rule, const std::string& path);

}  // namespace twistlab
