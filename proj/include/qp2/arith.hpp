#pragma once

// Exact integer and modular arithmetic shared by every other module.
// Big integers are GMP's mpz_class; everything number-theoretic on top of
// it (Jacobi symbols, primality, factoring, square roots, CRT) lives here.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qp2/errors.hpp"

namespace qp2 {

using Integer = mpz_class;
using Rational = mpq_class;

inline std::string to_string(const Integer& n) { return n.get_str(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Integer pow2(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

inline Integer pow_ui(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Integer powmod(const Integer& base, const Integer& e, const Integer& m) {
  Integer r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline std::optional<Integer> inverse_mod(const Integer& a, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    return std::nullopt;
  }
  return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline bool divides(const Integer& d, const Integer& n) {
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline bool fits_u64(const Integer& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const Integer& n) {
  // mpz_get_ui is only 64 bits wide on LP64; export keeps this portable.
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
  return out;
}

inline Integer from_u64(std::uint64_t v) {
  Integer r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

// --- 2-adic helpers --------------------------------------------------------

/// 2-adic order. n must be nonzero.
inline unsigned long v2(const Integer& n) {
  if (n == 0) throw DomainError("v2 of zero");
  return mpz_scan1(n.get_mpz_t(), 0);
}

inline constexpr unsigned v2(std::uint64_t n) {
  return n == 0 ? 0 : static_cast<unsigned>(__builtin_ctzll(n));
}

inline Integer odd_part(const Integer& n) {
  Integer r;
  mpz_tdiv_q_2exp(r.get_mpz_t(), n.get_mpz_t(), v2(n));
  return r;
}

inline constexpr std::uint64_t odd_part(std::uint64_t n) {
  return n == 0 ? 0 : n >> v2(n);
}

/// Number of ones in the binary expansion of |n|.
inline unsigned long binary_weight(const Integer& n) {
  Integer a = abs(n);
  return mpz_popcount(a.get_mpz_t());
}

inline constexpr unsigned binary_weight(std::uint64_t n) {
  return static_cast<unsigned>(__builtin_popcountll(n));
}

/// p-adic valuation of a nonzero integer.
inline unsigned long valuation(const Integer& n, const Integer& p) {
  if (n == 0) throw DomainError("valuation of zero");
  Integer m = n;
  unsigned long v = 0;
  while (divides(p, m)) {
    mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
    ++v;
  }
  return v;
}

struct TwoAdicProfile {
  Integer value;
  unsigned long v2 = 0;
  unsigned long weight = 0;
  Integer odd_part;
};

inline TwoAdicProfile two_adic_profile(const Integer& n) {
  if (n == 0) throw DomainError("two_adic_profile: n must be nonzero");
  TwoAdicProfile out;
  out.value = n;
  out.v2 = v2(n);
  out.weight = binary_weight(n);
  out.odd_part = odd_part(n);
  return out;
}

// --- word-sized modular arithmetic ----------------------------------------

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return result;
}

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  // Extended Euclid on signed 128-bit to avoid overflow for m near 2^64.
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    __int128 q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) throw DomainError("inverse_mod: not invertible");
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

/// Sieve of Eratosthenes; primes <= limit in increasing order.
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

// --- Jacobi symbol ---------------------------------------------------------

/// Jacobi symbol (a | n) for odd positive n.
inline int jacobi(const Integer& a, const Integer& n) {
  if (n <= 0 || mpz_even_p(n.get_mpz_t())) {
    throw DomainError("jacobi: modulus must be odd and positive");
  }
  Integer x = mod_floor(a, n);
  Integer m = n;
  int t = 1;
  while (x != 0) {
    unsigned long s = mpz_scan1(x.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), s);
    unsigned long m8 = mpz_fdiv_ui(m.get_mpz_t(), 8);
    if ((s & 1) && (m8 == 3 || m8 == 5)) t = -t;
    // reciprocity
    if (mpz_fdiv_ui(x.get_mpz_t(), 4) == 3 && m8 % 4 == 3) t = -t;
    std::swap(x, m);
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  }
  return m == 1 ? t : 0;
}

// --- primality -------------------------------------------------------------

namespace detail {

inline bool miller_rabin_u64(std::uint64_t n, std::uint64_t base) {
  std::uint64_t d = n - 1;
  unsigned s = v2(d);
  d >>= s;
  std::uint64_t x = powmod(base % n, d, n);
  if (x == 1 || x == n - 1 || base % n == 0) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

inline bool miller_rabin(const Integer& n, const Integer& base) {
  Integer d = n - 1;
  unsigned long s = v2(d);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  Integer x = powmod(base, d, n);
  Integer n1 = n - 1;
  if (x == 1 || x == n1) return true;
  for (unsigned long r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n1) return true;
  }
  return false;
}

inline Integer halve_mod(const Integer& v, const Integer& n) {
  Integer r = v;
  if (mpz_odd_p(r.get_mpz_t())) r += n;
  mpz_tdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), 1);
  return r;
}

// Strong Lucas probable-prime test with Selfridge's parameter choice.
inline bool strong_lucas(const Integer& n) {
  if (mpz_perfect_square_p(n.get_mpz_t())) return false;
  long d = 5;
  for (;;) {
    int j = jacobi(Integer(d), n);
    if (j == -1) break;
    if (j == 0 && abs(Integer(d)) != n) return false;
    d = d > 0 ? -(d + 2) : -d + 2;
  }
  const Integer D(d);
  const Integer P(1);
  const Integer Q((1 - d) / 4);

  Integer k = n + 1;
  unsigned long s = mpz_scan1(k.get_mpz_t(), 0);
  Integer odd = k;
  mpz_tdiv_q_2exp(odd.get_mpz_t(), odd.get_mpz_t(), s);

  Integer U = 1, V = P, Qk = mod_floor(Q, n);
  const std::size_t bits = mpz_sizeinbase(odd.get_mpz_t(), 2);
  for (std::size_t i = bits - 1; i-- > 0;) {
    U = U * V % n;
    V = mod_floor(V * V - 2 * Qk, n);
    Qk = Qk * Qk % n;
    if (mpz_tstbit(odd.get_mpz_t(), i)) {
      Integer u2 = halve_mod(mod_floor(P * U + V, n), n);
      Integer v2v = halve_mod(mod_floor(D * U + P * V, n), n);
      U = u2;
      V = v2v;
      Qk = mod_floor(Qk * Q, n);
    }
  }
  if (U == 0 || V == 0) return true;
  for (unsigned long r = 1; r < s; ++r) {
    V = mod_floor(V * V - 2 * Qk, n);
    if (V == 0) return true;
    Qk = Qk * Qk % n;
  }
  return false;
}

}  // namespace detail

/// Deterministic below 2^64 (first twelve prime bases). Above, a
/// Baillie-PSW test: no counterexample is known, none has been proven
/// impossible.
inline bool is_prime(const Integer& n) {
  if (n < 2) return false;
  static constexpr std::uint32_t kSmall[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                             29, 31, 37, 41, 43, 47, 53, 59, 61,
                                             67, 71, 73, 79, 83, 89, 97};
  for (std::uint32_t p : kSmall) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  if (fits_u64(n)) {
    const std::uint64_t m = to_u64(n);
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
      if (!detail::miller_rabin_u64(m, a)) return false;
    }
    return true;
  }
  return detail::miller_rabin(n, Integer(2)) && detail::strong_lucas(n);
}

inline bool is_prime(std::uint64_t n) { return is_prime(from_u64(n)); }

// --- factoring -------------------------------------------------------------

struct PrimePower {
  Integer p;
  unsigned long r = 1;

  Integer value() const { return pow_ui(p, r); }
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct FactorBudget {
  std::uint32_t trial_limit = 100000;
  /// Total Pollard-Brent steps shared across every cofactor of one call.
  std::uint64_t rho_iterations = 1u << 20;
  /// Cofactors wider than this are left unfactored without trying rho.
  std::size_t rho_max_bits = 256;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct Factorization {
  std::vector<PrimePower> factors;  // sorted by p, distinct
  Integer remainder = 1;            // product of unfactored composites

  bool complete() const { return remainder == 1; }

  Integer product() const {
    Integer acc = 1;
    for (const auto& f : factors) acc *= f.value();
    return acc;
  }
};

inline void add_factor(std::vector<PrimePower>& out, const Integer& p, unsigned long r) {
  for (auto& f : out) {
    if (f.p == p) {
      f.r += r;
      return;
    }
  }
  out.push_back({p, r});
}

inline void sort_factors(std::vector<PrimePower>& fs) {
  std::sort(fs.begin(), fs.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
}

namespace detail {

// Brent's cycle-finding variant of Pollard rho. Returns a nontrivial
// divisor or nullopt once the shared budget is spent.
inline std::optional<Integer> pollard_brent(const Integer& n, std::uint64_t& budget,
                                            std::mt19937_64& rng) {
  if (mpz_even_p(n.get_mpz_t())) return Integer(2);
  while (budget > 0) {
    Integer y = from_u64(rng()) % n;
    Integer c = from_u64(rng()) % (n - 1) + 1;
    const std::uint64_t m = 128;
    Integer g = 1, q = 1, x, ys;
    std::uint64_t r = 1;
    while (g == 1 && budget > 0) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % n;
      budget = budget > r ? budget - r : 0;
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        const std::uint64_t steps = std::min(m, r - k);
        for (std::uint64_t i = 0; i < steps; ++i) {
          y = (y * y + c) % n;
          q = q * abs(x - y) % n;
        }
        budget = budget > steps ? budget - steps : 0;
        g = gcd(q, n);
        k += steps;
      }
      r *= 2;
    }
    if (g == n) {
      // Batched gcd overshot; step back one at a time.
      do {
        ys = (ys * ys + c) % n;
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return std::nullopt;
}

}  // namespace detail

/// Trial division, then Pollard-Brent on whatever is left, within budget.
/// Composite cofactors that resist end up multiplied into `remainder`.
inline Factorization factor(const Integer& n, const FactorBudget& budget = {}) {
  if (n < 1) throw DomainError("factor: n must be positive");
  Factorization out;
  Integer m = n;
  for (std::uint32_t p : primes_up_to(budget.trial_limit)) {
    if (m == 1) break;
    if (Integer(p) * p > m) break;
    unsigned long r = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
      ++r;
    }
    if (r > 0) out.factors.push_back({Integer(p), r});
  }

  std::mt19937_64 rng(budget.seed);
  std::uint64_t steps = budget.rho_iterations;
  std::vector<Integer> pending;
  if (m > 1) pending.push_back(m);
  while (!pending.empty()) {
    Integer c = std::move(pending.back());
    pending.pop_back();
    if (c == 1) continue;
    if (is_prime(c)) {
      add_factor(out.factors, c, 1);
      continue;
    }
    Integer root;
    if (mpz_perfect_square_p(c.get_mpz_t())) {
      mpz_sqrt(root.get_mpz_t(), c.get_mpz_t());
      pending.push_back(root);
      pending.push_back(root);
      continue;
    }
    if (mpz_sizeinbase(c.get_mpz_t(), 2) > budget.rho_max_bits) {
      out.remainder *= c;
      continue;
    }
    auto d = detail::pollard_brent(c, steps, rng);
    if (!d) {
      out.remainder *= c;
      continue;
    }
    pending.push_back(*d);
    pending.push_back(c / *d);
  }
  sort_factors(out.factors);
  return out;
}

// --- square roots modulo odd prime powers ---------------------------------

namespace detail {

// Tonelli-Shanks; a must be a nonzero quadratic residue mod odd prime p.
inline Integer tonelli_shanks(const Integer& a, const Integer& p) {
  if (mpz_fdiv_ui(p.get_mpz_t(), 4) == 3) {
    return powmod(a, (p + 1) / 4, p);
  }
  Integer q = p - 1;
  unsigned long s = v2(q);
  mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
  Integer z = 2;
  while (jacobi(z, p) != -1) ++z;
  Integer c = powmod(z, q, p);
  Integer x = powmod(a, (q + 1) / 2, p);
  Integer t = powmod(a, q, p);
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    Integer t2 = t;
    while (t2 != 1) {
      t2 = t2 * t2 % p;
      ++i;
    }
    Integer b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b % p;
    x = x * b % p;
    c = b * b % p;
    t = t * c % p;
    m = i;
  }
  return x;
}

}  // namespace detail

/// Some s with s^2 = a (mod p^r), or nullopt when none exists. p odd.
inline std::optional<Integer> sqrt_mod(const Integer& a, const PrimePower& pp) {
  if (pp.p == 2) throw DomainError("sqrt_mod: p = 2 is not supported");
  if (pp.r == 0) throw DomainError("sqrt_mod: exponent must be positive");
  const Integer modulus = pp.value();
  const Integer a0 = mod_floor(a, modulus);
  if (a0 == 0) return Integer(0);

  const unsigned long v = valuation(a0, pp.p);
  if (v % 2 == 1) return std::nullopt;
  const Integer unit = a0 / pow_ui(pp.p, v);
  if (jacobi(unit, pp.p) != 1) return std::nullopt;

  // Hensel-lift a root of unit from p to p^(r - v).
  const unsigned long target = pp.r - v;
  Integer root = detail::tonelli_shanks(mod_floor(unit, pp.p), pp.p);
  Integer mod = pp.p;
  unsigned long have = 1;
  while (have < target) {
    have = std::min(2 * have, target);
    mod = pow_ui(pp.p, have);
    Integer inv = *inverse_mod(mod_floor(2 * root, mod), mod);
    root = mod_floor(root - (root * root - unit) * inv, mod);
  }
  return mod_floor(root * pow_ui(pp.p, v / 2), modulus);
}

// --- Chinese remainder theorem ----------------------------------------------

struct Residue {
  Integer value;
  Integer modulus;
};

/// Combine congruences with pairwise coprime moduli into one modulo their
/// product. An empty input yields 0 mod 1.
inline Residue crt(std::span<const Residue> residues) {
  Residue acc{0, 1};
  for (const auto& r : residues) {
    if (r.modulus < 1) throw DomainError("crt: moduli must be positive");
    if (gcd(acc.modulus, r.modulus) != 1) {
      throw DomainError("crt: moduli " + to_string(acc.modulus) + " and " +
                        to_string(r.modulus) + " are not coprime");
    }
    if (r.modulus == 1) continue;
    Integer inv = *inverse_mod(acc.modulus, r.modulus);
    Integer t = mod_floor((r.value - acc.value) * inv, r.modulus);
    acc.value += acc.modulus * t;
    acc.modulus *= r.modulus;
    acc.value = mod_floor(acc.value, acc.modulus);
  }
  acc.value = mod_floor(acc.value, acc.modulus);
  return acc;
}

inline Residue crt(std::initializer_list<Residue> residues) {
  return crt(std::span<const Residue>(residues.begin(), residues.size()));
}

}  // namespace qp2
