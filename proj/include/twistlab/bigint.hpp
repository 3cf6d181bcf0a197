// Exact integer/rational types and small helpers on top of GMP.
//
// Everything census-scale (twist indices, cubic values, point coordinates)
// goes through BigInt; the 64-bit lanes elsewhere are guarded by explicit
// bounds so no computation in the repository silently overflows.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twistlab {

using BigInt = mpz_class;
using BigRat = mpq_class;

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Natural log of |n|; n must be nonzero. Exact mantissa+exponent split,
/// so the result is deterministic and accurate to ~1e-15 relative.
double log_abs(const BigInt& n);

inline bool fits_i64(const BigInt& n) { return n.fits_slong_p(); }

inline i64 to_i64(const BigInt& n) {
  if (!n.fits_slong_p()) throw std::overflow_error("integer exceeds 64 bits: " + n.get_str());
  return n.get_si();
}

inline BigInt from_i64(i64 v) {
  return BigInt(static_cast<long>(v));
}

/// Kronecker symbol (a|n) on its full domain.
int kronecker(const BigInt& a, const BigInt& n);

/// True iff n is a perfect square (false for n < 0).
bool is_perfect_square(const BigInt& n);

/// Exact integer square root; throws std::domain_error if n is not a square.
BigInt isqrt_exact(const BigInt& n);

u64 isqrt_u64(u64 n);
bool is_square_u64(u64 n, u64* root = nullptr);

}  // namespace twistlab
