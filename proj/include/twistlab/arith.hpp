// Exact integer arithmetic primitives: factorization, extended Mobius
// function, squarefree decomposition, Kronecker symbol.
//
// The Mobius function is extended to all of Z by mu(-d) = mu(d), mu(0) = 0.
// Factorization is deterministic: trial division, then Brent-Pollard rho
// with a fixed increment sequence and fixed-base Miller-Rabin certificates.
#pragma once

#include "twistlab/bigint.hpp"

#include <map>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <vector>

namespace twistlab {

struct Factorization {
  int sign = 1;                                        // -1 or +1
  std::vector<std::pair<BigInt, unsigned>> factors;    // (prime, exponent), primes increasing

  /// Reassembles sign * prod p^e.
  BigInt value() const;
};

/// n = d0 * s^2 with d0 squarefree, sign(d0) = sign(n), s >= 1.
struct SquarefreeDecomposition {
  BigInt d0;
  BigInt s;
};

class FactorCache;

Factorization factor(const BigInt& n, FactorCache* cache = nullptr);
int mobius(const BigInt& d);
SquarefreeDecomposition squarefree_part(const BigInt& n);
int kronecker_symbol(const BigInt& a, const BigInt& n);
bool is_squarefree(const BigInt& n);

// 64-bit lane. Same outputs as the BigInt operations above; the counting
// loops use these directly once their inputs are proven to fit.
bool is_prime_u64(u64 n);
std::vector<std::pair<u64, unsigned>> factor_u64(u64 n);
int mobius_i64(i64 d);
std::pair<i64, i64> squarefree_part_i64(i64 n);
bool is_squarefree_i64(i64 n);

/// Primes below 1e6, used by the trial-division stage.
const std::vector<u64>& trial_primes();

/// Optional on-disk factorization cache.
/// Format: one record per line, `n<TAB>p1^e1 p2^e2 ...`, sorted by |n|.
/// Concurrent reads and writes are safe; writes are last-write-wins.
class FactorCache {
 public:
  std::optional<Factorization> lookup(const BigInt& n) const;
  void store(const BigInt& n, const Factorization& f);
  void load(const std::string& path);
  void save(const std::string& path) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<BigInt, Factorization> map_;
};

}  // namespace twistlab
