#include "twistlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

namespace twistlab {

double log_abs(const BigInt& n) {
  if (sgn(n) == 0) throw std::domain_error("log_abs(0)");
  long e2 = 0;
  double m = mpz_get_d_2exp(&e2, n.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e2) * M_LN2;
}

int kronecker(const BigInt& a, const BigInt& n) {
  return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

bool is_perfect_square(const BigInt& n) {
  if (sgn(n) < 0) return false;
  return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

BigInt isqrt_exact(const BigInt& n) {
  if (!is_perfect_square(n)) throw std::domain_error("isqrt_exact: not a perfect square");
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

u64 isqrt_u64(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  if (r > 0xFFFFFFFFULL) r = 0xFFFFFFFFULL;  // double rounding near 2^64
  while (r > 0 && r * r > n) --r;
  while (r < 0xFFFFFFFFULL && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square_u64(u64 n, u64* root) {
  // quadratic residues mod 64 prune ~81% of non-squares
  static constexpr u64 kMask = 0x202021202030213ULL;
  if (!((kMask >> (n & 63)) & 1)) return false;
  u64 r = isqrt_u64(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

// ---------------------------------------------------------------------------
// 64-bit lane

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool miller_rabin(u64 n, u64 a) {
  if (a % n == 0) return true;
  u64 d = n - 1;
  int s = 0;
  while (!(d & 1)) d >>= 1, ++s;
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

u64 g64(u64 x, u64 c, u64 n) { return (static_cast<u64>((static_cast<u128>(x) * x) % n) + c) % n; }

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Brent's cycle variant; deterministic in (n, c). Returns a nontrivial
// factor, or n on failure for this c (caller retries with the next c).
u64 brent_rho(u64 n, u64 c) {
  if (!(n & 1)) return 2;
  u64 y = 2, r = 1, q = 1, d = 1, x = 0, ys = 0;
  do {
    x = y;
    for (u64 i = 0; i < r; ++i) y = g64(y, c, n);
    u64 k = 0;
    while (k < r && d == 1) {
      ys = y;
      u64 lim = std::min<u64>(128, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = g64(y, c, n);
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      d = gcd_u64(q, n);
      k += lim;
    }
    r <<= 1;
  } while (d == 1);
  if (d == n) {
    do {
      ys = g64(ys, c, n);
      u64 diff = x > ys ? x - ys : ys - x;
      d = gcd_u64(diff, n);
    } while (d == 1);
  }
  return d;
}

constexpr int kSmallPrimeLimit = 256;

const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    std::vector<u64> ps;
    std::vector<bool> sieve(kSmallPrimeLimit, true);
    for (int i = 2; i < kSmallPrimeLimit; ++i)
      if (sieve[i]) {
        ps.push_back(i);
        for (int j = 2 * i; j < kSmallPrimeLimit; j += i) sieve[j] = false;
      }
    return ps;
  }();
  return primes;
}

void factor_u64_into(u64 n, std::vector<std::pair<u64, unsigned>>& out) {
  if (n <= 1) return;
  if (is_prime_u64(n)) {
    out.emplace_back(n, 1);
    return;
  }
  u64 root;
  if (is_square_u64(n, &root)) {
    std::vector<std::pair<u64, unsigned>> half;
    factor_u64_into(root, half);
    for (auto& [p, e] : half) out.emplace_back(p, 2 * e);
    return;
  }
  u64 d = n;
  for (u64 c = 1; d == n || d == 1; ++c) d = brent_rho(n, c);
  factor_u64_into(d, out);
  factor_u64_into(n / d, out);
}

void merge_factors(std::vector<std::pair<u64, unsigned>>& fs) {
  std::sort(fs.begin(), fs.end());
  std::size_t w = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (w > 0 && fs[w - 1].first == fs[i].first)
      fs[w - 1].second += fs[i].second;
    else
      fs[w++] = fs[i];
  }
  fs.resize(w);
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // deterministic base set for all n < 2^64
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (!miller_rabin(n, a)) return false;
  return true;
}

std::vector<std::pair<u64, unsigned>> factor_u64(u64 n) {
  std::vector<std::pair<u64, unsigned>> out;
  if (n <= 1) return out;
  for (u64 p : small_primes()) {
    if (p * p > n) break;
    if (n % p == 0) {
      unsigned e = 0;
      while (n % p == 0) n /= p, ++e;
      out.emplace_back(p, e);
    }
  }
  factor_u64_into(n, out);
  merge_factors(out);
  return out;
}

int mobius_i64(i64 d) {
  if (d == 0) return 0;
  u64 n = d < 0 ? static_cast<u64>(-(d + 1)) + 1 : static_cast<u64>(d);
  auto fs = factor_u64(n);
  for (auto& [p, e] : fs)
    if (e > 1) return 0;
  return fs.size() % 2 == 0 ? 1 : -1;
}

std::pair<i64, i64> squarefree_part_i64(i64 n) {
  if (n == 0) throw std::domain_error("squarefree_part(0)");
  u64 a = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
  u64 d0 = 1, s = 1;
  for (auto& [p, e] : factor_u64(a)) {
    if (e & 1) d0 *= p;
    for (unsigned i = 0; i < e / 2; ++i) s *= p;
  }
  i64 signed_d0 = static_cast<i64>(d0);
  return {n < 0 ? -signed_d0 : signed_d0, static_cast<i64>(s)};
}

bool is_squarefree_i64(i64 n) {
  if (n == 0) return false;
  u64 a = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
  if (a == 1) return true;
  for (u64 p : small_primes()) {
    if (p * p > a) break;
    if (a % p == 0) {
      a /= p;
      if (a % p == 0) return false;
    }
  }
  if (a == 1) return true;
  if (is_prime_u64(a)) return true;
  u64 root;
  if (is_square_u64(a, &root)) return false;
  u64 d = a;
  for (u64 c = 1; d == a || d == 1; ++c) d = brent_rho(a, c);
  u64 rest = a / d;
  if (rest % d == 0 || d % rest == 0) return false;
  return is_squarefree_i64(static_cast<i64>(d)) && is_squarefree_i64(static_cast<i64>(rest)) &&
         gcd_u64(d, rest) == 1;
}

// ---------------------------------------------------------------------------
// BigInt operations

const std::vector<u64>& trial_primes() {
  static const std::vector<u64> primes = [] {
    constexpr u64 kLimit = 1'000'000;
    std::vector<bool> sieve(kLimit, true);
    std::vector<u64> ps;
    for (u64 i = 2; i < kLimit; ++i)
      if (sieve[i]) {
        ps.push_back(i);
        for (u64 j = i * i; j < kLimit; j += i) sieve[j] = false;
      }
    return ps;
  }();
  return primes;
}

namespace {

bool miller_rabin_mpz(const BigInt& n, const BigInt& a) {
  if (a % n == 0) return true;
  BigInt d = n - 1;
  unsigned long s = 0;
  while (mpz_even_p(d.get_mpz_t())) d /= 2, ++s;
  BigInt x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return true;
  }
  return false;
}

// Deterministic for n < 2^64; certified probable prime beyond (fixed bases).
bool is_prime_mpz(const BigInt& n) {
  if (n < 2) return false;
  if (n.fits_slong_p()) return is_prime_u64(static_cast<u64>(n.get_si()));
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97})
    if (!miller_rabin_mpz(n, BigInt(static_cast<long>(a)))) return false;
  return true;
}

BigInt rho_mpz(const BigInt& n, unsigned long c) {
  BigInt x = 2, y = 2, d = 1;
  auto step = [&](BigInt& v) { v = (v * v + c) % n; };
  while (d == 1) {
    step(x);
    step(y);
    step(y);
    BigInt diff = abs(x - y);
    if (sgn(diff) == 0) return n;
    mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
  }
  return d;
}

void factor_mpz_into(const BigInt& n, std::vector<std::pair<BigInt, unsigned>>& out) {
  if (n <= 1) return;
  if (n.fits_slong_p()) {
    for (auto& [p, e] : factor_u64(static_cast<u64>(n.get_si())))
      out.emplace_back(BigInt(static_cast<unsigned long>(p)), e);
    return;
  }
  if (is_prime_mpz(n)) {
    out.emplace_back(n, 1);
    return;
  }
  if (is_perfect_square(n)) {
    BigInt root = isqrt_exact(n);
    std::vector<std::pair<BigInt, unsigned>> half;
    factor_mpz_into(root, half);
    for (auto& [p, e] : half) out.emplace_back(p, 2 * e);
    return;
  }
  BigInt d = n;
  for (unsigned long c = 1; d == n || d == 1; ++c) d = rho_mpz(n, c);
  factor_mpz_into(d, out);
  factor_mpz_into(n / d, out);
}

}  // namespace

BigInt Factorization::value() const {
  BigInt v = sign;
  for (const auto& [p, e] : factors) {
    BigInt pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
    v *= pe;
  }
  return v;
}

Factorization factor(const BigInt& n, FactorCache* cache) {
  if (sgn(n) == 0) throw std::domain_error("factor(0)");
  if (cache) {
    if (auto hit = cache->lookup(n)) return *hit;
  }
  Factorization f;
  f.sign = sgn(n) < 0 ? -1 : 1;
  BigInt a = abs(n);
  if (!a.fits_slong_p()) {
    for (u64 p : trial_primes()) {
      if (mpz_divisible_ui_p(a.get_mpz_t(), p)) {
        unsigned e = 0;
        while (mpz_divisible_ui_p(a.get_mpz_t(), p)) {
          mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), p);
          ++e;
        }
        f.factors.emplace_back(BigInt(static_cast<unsigned long>(p)), e);
      }
      if (a.fits_slong_p()) break;  // residual moves to the 64-bit lane
    }
  }
  std::vector<std::pair<BigInt, unsigned>> rest;
  factor_mpz_into(a, rest);
  std::sort(rest.begin(), rest.end());
  for (auto& [p, e] : rest) {
    bool merged = false;
    for (auto& [q, eq] : f.factors)
      if (q == p) {
        eq += e;
        merged = true;
        break;
      }
    if (!merged) f.factors.emplace_back(p, e);
  }
  std::sort(f.factors.begin(), f.factors.end());
  if (cache) cache->store(n, f);
  return f;
}

int mobius(const BigInt& d) {
  if (sgn(d) == 0) return 0;
  if (d.fits_slong_p()) return mobius_i64(d.get_si());
  auto f = factor(d);
  for (auto& [p, e] : f.factors)
    if (e > 1) return 0;
  return f.factors.size() % 2 == 0 ? 1 : -1;
}

SquarefreeDecomposition squarefree_part(const BigInt& n) {
  if (sgn(n) == 0) throw std::domain_error("squarefree_part(0)");
  if (n.fits_slong_p()) {
    auto [d0, s] = squarefree_part_i64(n.get_si());
    return {from_i64(d0), from_i64(s)};
  }
  auto f = factor(n);
  BigInt d0 = f.sign, s = 1;
  for (auto& [p, e] : f.factors) {
    if (e & 1) d0 *= p;
    BigInt pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e / 2);
    s *= pe;
  }
  return {d0, s};
}

int kronecker_symbol(const BigInt& a, const BigInt& n) { return kronecker(a, n); }

bool is_squarefree(const BigInt& n) {
  if (sgn(n) == 0) return false;
  if (n.fits_slong_p()) return is_squarefree_i64(n.get_si());
  return mobius(n) != 0;
}

// ---------------------------------------------------------------------------
// FactorCache

std::optional<Factorization> FactorCache::lookup(const BigInt& n) const {
  std::shared_lock lk(mu_);
  auto it = map_.find(n);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void FactorCache::store(const BigInt& n, const Factorization& f) {
  std::unique_lock lk(mu_);
  map_[n] = f;
}

std::size_t FactorCache::size() const {
  std::shared_lock lk(mu_);
  return map_.size();
}

void FactorCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open factor cache: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    BigInt n(line.substr(0, tab));
    Factorization f;
    f.sign = sgn(n) < 0 ? -1 : 1;
    std::istringstream rest(line.substr(tab + 1));
    std::string tok;
    while (rest >> tok) {
      auto caret = tok.find('^');
      if (caret == std::string::npos) continue;
      f.factors.emplace_back(BigInt(tok.substr(0, caret)),
                             static_cast<unsigned>(std::stoul(tok.substr(caret + 1))));
    }
    std::sort(f.factors.begin(), f.factors.end());
    store(n, f);
  }
}

void FactorCache::save(const std::string& path) const {
  std::vector<std::pair<BigInt, const Factorization*>> rows;
  {
    std::shared_lock lk(mu_);
    rows.reserve(map_.size());
    for (const auto& [n, f] : map_) rows.emplace_back(n, &f);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    BigInt aa = abs(a.first), ab = abs(b.first);
    if (aa != ab) return aa < ab;
    return a.first < b.first;
  });
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write factor cache: " + path);
  for (auto& [n, f] : rows) {
    out << n.get_str() << '\t';
    for (std::size_t i = 0; i < f->factors.size(); ++i) {
      if (i) out << ' ';
      out << f->factors[i].first.get_str() << '^' << f->factors[i].second;
    }
    out << '\n';
  }
}

}  // namespace twistlab
