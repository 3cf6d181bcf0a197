#include "twistlab/rootnum.hpp"

#include "twistlab/arith.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace twistlab {

namespace {

long residue_mod(const BigInt& d, long m) {
  // remainder of floor division: always in [0, m)
  return static_cast<long>(mpz_fdiv_ui(d.get_mpz_t(), static_cast<unsigned long>(m)));
}

// omega(E_d) = omega(E) * chi_d(-N) for squarefree d with gcd(d, 2N) = 1,
// chi_d the quadratic character of Q(sqrt(d)). Via Kronecker symbols this
// collapses to omega(E) * (d | -N); for even N the character is only
// unramified against -N when d = 1 (mod 4), so the domain is restricted
// there and everything else reports unknown.
bool derived_domain(const BigInt& d, long conductor) {
  BigInt two_n(2 * conductor);
  BigInt g;
  mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), two_n.get_mpz_t());
  if (g != 1) return false;
  if (conductor % 2 == 1) return true;
  return residue_mod(d, 4) == 1;
}

int derived_value(const BigInt& d, long conductor, int base_w) {
  return base_w * kronecker(d, BigInt(-conductor));
}

}  // namespace

Omega RootRule::lookup(const BigInt& d) const {
  if (sgn(d) == 0) return Omega::unknown;
  if (override_modulus > 0 && (sgn(d) > 0 || reflect_negative)) {
    long r = residue_mod(sgn(d) < 0 ? BigInt(abs(d)) : d, override_modulus);
    auto it = override_table.find(r);
    if (it != override_table.end()) return it->second > 0 ? Omega::plus : Omega::minus;
  }
  if (modulus > 0) {
    bool use_pos = sgn(d) > 0 || reflect_negative;
    long r = residue_mod(use_pos && sgn(d) < 0 ? BigInt(abs(d)) : d, modulus);
    const auto& table = use_pos ? table_pos : table_neg;
    auto it = table.find(r);
    if (it != table.end()) return it->second > 0 ? Omega::plus : Omega::minus;
  }
  if (derived_enabled && derived_domain(d, conductor))
    return derived_value(d, conductor, base_w) > 0 ? Omega::plus : Omega::minus;
  return Omega::unknown;
}

RootRule derive_rule(const BaseCurve& c) {
  RootRule r;
  if (!c.rule.entries.empty()) {
    r.modulus = c.rule.modulus;
    r.reflect_negative = c.rule.reflect_negative;
    for (auto& [res, w] : c.rule.entries) r.table_pos[((res % r.modulus) + r.modulus) % r.modulus] = w;
  } else {
    r.modulus = 4 * c.conductor;
    r.reflect_negative = c.rule.reflect_negative;
    r.derived_enabled = true;
    r.conductor = c.conductor;
    r.base_w = c.base_root_number;
    // pure table build over residues mod 4N; the sign of d is not a residue,
    // so positive and negative representatives are tabulated separately
    for (long res = 1; res < r.modulus; ++res) {
      BigInt dpos(res);
      BigInt dneg(res - r.modulus);
      if (derived_domain(dpos, c.conductor))
        r.table_pos[res] = derived_value(dpos, c.conductor, c.base_root_number);
      if (derived_domain(dneg, c.conductor))
        r.table_neg[res] = derived_value(dneg, c.conductor, c.base_root_number);
    }
  }
  if (!c.root_rule_path.empty()) load_rule_override(r, c.root_rule_path);
  return r;
}

Omega omega(const RootRule& rule, const BigInt& d) {
  if (!is_squarefree(d)) throw std::domain_error("omega: d must be squarefree, got " + d.get_str());
  return rule.lookup(d);
}

void load_rule_override(RootRule& rule, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open root-rule override: " + path);
  std::string line;
  long file_modulus = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long res = 0, mod = 0;
    int w = 0;
    if (!(row >> res >> mod >> w) || mod <= 0 || (w != 1 && w != -1))
      throw std::invalid_argument("malformed root-rule line: " + line);
    if (file_modulus == 0) file_modulus = mod;
    if (mod != file_modulus)
      throw std::invalid_argument("root-rule override mixes moduli: " + path);
    rule.override_modulus = mod;
    rule.override_table[((res % mod) + mod) % mod] = w;
  }
}

}  // namespace twistlab
