#pragma once

// Divided Bernoulli numbers B_n / n: exact values from tangent numbers,
// denominators from von Staudt-Clausen, residues mod 8 via Carlitz and
// residues mod p via Kummer reduction plus Voronoi's congruence.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "qp2/arith.hpp"

namespace qp2 {

struct DividedBernoulli {
  unsigned long index = 0;
  int sign = 1;             // sign of B_n
  Integer numerator;        // N_n, numerator of |B_n|/n
  Integer denominator;      // D_n
  Integer odd_denominator;  // OD_n

  Rational value() const {
    Rational q(numerator, denominator);
    q.canonicalize();
    return sign < 0 ? Rational(-q) : q;
  }
};

struct VscDenominator {
  Integer full;  // D_n
  Integer odd;   // OD_n
};

/// Divisors of n in increasing order (trial division; n is an index, so small).
inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> lo, hi;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    lo.push_back(d);
    if (d != n / d) hi.push_back(n / d);
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

inline unsigned long valuation(std::uint64_t n, std::uint64_t p) {
  unsigned long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// D_n = prod over primes p with (p-1) | n of p^(v_p(n)+1); OD_n its odd part.
inline VscDenominator vsc_denominator(std::uint64_t n) {
  if (n == 0 || n % 2) throw DomainError("vsc_denominator: n must be even and positive");
  VscDenominator out{1, 1};
  for (std::uint64_t d : divisors(n)) {
    const std::uint64_t p = d + 1;
    if (!is_prime(p)) continue;
    Integer factor = pow_ui(from_u64(p), valuation(n, p) + 1);
    out.full *= factor;
    if (p != 2) out.odd *= factor;
  }
  return out;
}

/// OD_n mod 8 without building the product.
inline unsigned odd_denominator_mod8(std::uint64_t n) {
  unsigned r = 1;
  for (std::uint64_t d : divisors(n)) {
    const std::uint64_t p = d + 1;
    if (p == 2 || !is_prime(p)) continue;
    for (unsigned long e = valuation(n, p) + 1; e > 0; --e) r = r * (p % 8) % 8;
  }
  return r;
}

/// Exact divided Bernoulli numbers through `exact_limit`, computed lazily
/// from tangent numbers and kept for the lifetime of the table. Readers
/// share a lock; an extension takes it exclusively and publishes whole
/// entries.
inline std::uint64_t divided_bernoulli_mod_p(std::uint64_t m, std::uint64_t p);

class BernoulliTable {
 public:
  static constexpr unsigned long kDefaultExactLimit = 4096;

  explicit BernoulliTable(unsigned long exact_limit = kDefaultExactLimit)
      : exact_limit_(exact_limit) {}

  BernoulliTable(const BernoulliTable&) = delete;
  BernoulliTable& operator=(const BernoulliTable&) = delete;

  static BernoulliTable& global() {
    static BernoulliTable table;
    return table;
  }

  unsigned long exact_limit() const { return exact_limit_.load(); }

  /// Raising the limit never discards entries; lowering it only affects
  /// future requests.
  void set_exact_limit(unsigned long limit) { exact_limit_.store(limit); }

  bool contains(unsigned long n) const {
    std::shared_lock lock(mu_);
    return n / 2 < entries_.size() && entries_[n / 2] != nullptr;
  }

  unsigned long computed_through() const {
    std::shared_lock lock(mu_);
    return computed_through_;
  }

  const DividedBernoulli& get(unsigned long n) {
    if (n < 2 || n % 2) {
      throw DomainError("divided_bernoulli: index must be even and >= 2, got " +
                        std::to_string(n));
    }
    {
      std::shared_lock lock(mu_);
      if (n / 2 < entries_.size() && entries_[n / 2]) return *entries_[n / 2];
    }
    if (n > exact_limit()) {
      throw DomainError("divided_bernoulli: index " + std::to_string(n) +
                        " exceeds exact limit " + std::to_string(exact_limit()));
    }
    std::unique_lock lock(mu_);
    if (n / 2 >= entries_.size() || !entries_[n / 2]) extend_locked(n);
    return *entries_[n / 2];
  }

  /// Cache file: one `n<TAB>sign<TAB>N<TAB>D` record per line, sorted by n.
  void save(const std::filesystem::path& path) const {
    std::shared_lock lock(mu_);
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp);
      for (const auto& e : entries_) {
        if (!e) continue;
        out << e->index << '\t' << (e->sign < 0 ? '-' : '+') << '\t' << e->numerator << '\t'
            << e->denominator << '\n';
      }
    }
    std::filesystem::rename(tmp, path);
  }

  /// Loads records; each denominator is re-derived and the fraction checked
  /// reduced before the entry is accepted. Returns the number accepted.
  std::size_t load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return 0;
    std::vector<std::unique_ptr<DividedBernoulli>> parsed;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string idx, sign, num, den;
      if (!std::getline(fields, idx, '\t') || !std::getline(fields, sign, '\t') ||
          !std::getline(fields, num, '\t') || !std::getline(fields, den, '\t')) {
        throw ParseError(lineno, 1, "expected four tab-separated fields");
      }
      auto e = std::make_unique<DividedBernoulli>();
      try {
        e->index = std::stoul(idx);
        e->numerator = Integer(num);
        e->denominator = Integer(den);
      } catch (const std::exception&) {
        throw ParseError(lineno, 1, "malformed number");
      }
      if (sign != "+" && sign != "-") throw ParseError(lineno, idx.size() + 2, "bad sign");
      e->sign = sign == "-" ? -1 : 1;
      if (e->index < 2 || e->index % 2) throw ParseError(lineno, 1, "index must be even");
      auto vsc = vsc_denominator(e->index);
      if (vsc.full != e->denominator || gcd(e->numerator, e->denominator) != 1 ||
          e->sign != expected_sign(e->index)) {
        throw VerificationError("bernoulli cache n=" + idx, "record inconsistent");
      }
      // numerator spot check: Voronoi value mod two primes
      for (std::uint64_t p : {10007ull, 10009ull}) {
        if (e->index % (p - 1) == 0) continue;
        const std::uint64_t num = mpz_fdiv_ui(e->numerator.get_mpz_t(), p);
        const std::uint64_t den = mpz_fdiv_ui(e->denominator.get_mpz_t(), p);
        std::uint64_t got = mulmod(num, inverse_mod(den, p), p);
        if (e->sign < 0) got = (p - got) % p;
        if (got != divided_bernoulli_mod_p(e->index % (p - 1), p)) {
          throw VerificationError("bernoulli cache n=" + idx, "numerator fails the mod " + std::to_string(p) + " check");
        }
      }
      e->odd_denominator = vsc.odd;
      parsed.push_back(std::move(e));
    }
    std::unique_lock lock(mu_);
    std::size_t accepted = 0;
    for (auto& e : parsed) {
      const auto slot = e->index / 2;
      if (slot >= entries_.size()) entries_.resize(slot + 1);
      if (!entries_[slot]) {
        entries_[slot] = std::move(e);
        ++accepted;
      }
    }
    return accepted;
  }

  static int expected_sign(unsigned long n) { return n % 4 == 0 ? -1 : 1; }

 private:
  // Tangent numbers T_1..T_m (Brent-Harvey in-place recurrence), then
  // |B_2j| / 2j = T_j / (4^j (4^j - 1)).
  void extend_locked(unsigned long n) {
    const unsigned long limit = exact_limit();
    unsigned long target = std::max<unsigned long>(n, 2 * computed_through_);
    target = std::max<unsigned long>(target, 128);
    target = std::min(target, std::max(limit, n));
    target -= target % 2;
    const unsigned long m = target / 2;

    std::vector<Integer> t(m + 1);
    t[1] = 1;
    for (unsigned long k = 2; k <= m; ++k) {
      mpz_mul_ui(t[k].get_mpz_t(), t[k - 1].get_mpz_t(), k - 1);
    }
    for (unsigned long k = 2; k <= m; ++k) {
      for (unsigned long j = k; j <= m; ++j) {
        mpz_mul_ui(t[j].get_mpz_t(), t[j].get_mpz_t(), j - k + 2);
        mpz_addmul_ui(t[j].get_mpz_t(), t[j - 1].get_mpz_t(), j - k);
      }
    }

    if (entries_.size() < m + 1) entries_.resize(m + 1);
    for (unsigned long j = 1; j <= m; ++j) {
      if (entries_[j]) continue;
      const unsigned long index = 2 * j;
      Integer four_j = pow2(index);
      Integer den = four_j * (four_j - 1);
      Integer g = gcd(t[j], den);
      auto e = std::make_unique<DividedBernoulli>();
      e->index = index;
      e->sign = expected_sign(index);
      mpz_divexact(e->numerator.get_mpz_t(), t[j].get_mpz_t(), g.get_mpz_t());
      mpz_divexact(e->denominator.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
      auto vsc = vsc_denominator(index);
      if (vsc.full != e->denominator) {
        throw std::logic_error("von Staudt-Clausen mismatch at n=" + std::to_string(index));
      }
      e->odd_denominator = std::move(vsc.odd);
      entries_[j] = std::move(e);
    }
    computed_through_ = std::max(computed_through_, target);
  }

  std::atomic<unsigned long> exact_limit_;
  mutable std::shared_mutex mu_;
  std::vector<std::unique_ptr<DividedBernoulli>> entries_;  // slot n/2
  unsigned long computed_through_ = 0;
};

inline const DividedBernoulli& divided_bernoulli(unsigned long n,
                                                 BernoulliTable& table = BernoulliTable::global()) {
  return table.get(n);
}

/// N_{4k} mod 8 from the Carlitz congruence Od[k] * N_{4k} = -OD_{4k}
/// (mod 2^(v2(k)+3)); odd residues are their own inverses mod 8.
inline unsigned n_mod8_carlitz(std::uint64_t k) {
  if (k == 0) throw DomainError("n_mod8_carlitz: k must be positive");
  const unsigned od = odd_denominator_mod8(4 * k);
  const unsigned ok = static_cast<unsigned>(odd_part(k) % 8);
  return (8 - (ok * od) % 8) % 8;
}

/// Smallest primitive root of the odd prime p.
inline std::uint64_t primitive_root(std::uint64_t p) {
  std::vector<std::uint64_t> qs;
  std::uint64_t n = p - 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    qs.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) qs.push_back(n);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (std::uint64_t q : qs) ok = ok && powmod(g, (p - 1) / q, p) != 1;
    if (ok) return g;
  }
}

/// Signed B_m / m mod p for odd prime p with (p-1) not dividing m, from
/// Voronoi's congruence
///   (a^m - 1) B_m/m = a^(m-1) * sum_{0<j<p} j^(m-1) floor(j a / p)  (mod p)
/// with a = 2 unless 2^m = 1 (mod p). j runs over powers of a primitive
/// root g so that j^(m-1) = (g^(m-1))^i is a running product.
inline std::uint64_t divided_bernoulli_mod_p(std::uint64_t m, std::uint64_t p) {
  if (p < 3 || p % 2 == 0) throw DomainError("divided_bernoulli_mod_p: p must be an odd prime");
  if (m == 0 || m % 2) throw DomainError("divided_bernoulli_mod_p: m must be even and positive");
  if (m % (p - 1) == 0) {
    throw DomainError("divided_bernoulli_mod_p: p-1 divides m, p is in the denominator");
  }
  std::uint64_t a = 2;
  while (powmod(a, m, p) == 1) ++a;  // terminates: a primitive root has a^m != 1

  const std::uint64_t e = (m - 1) % (p - 1);
  const std::uint64_t g = primitive_root(p);
  const std::uint64_t h = powmod(g, e, p);
  std::uint64_t sum = 0;
  if (p < (1ull << 31) && a < 64) {
    // j, j^e < 2^31 and the weights are < 64: no overflow before the final reduction
    // as long as p * 64 * 2^31 < 2^64.
    std::uint64_t j = 1, je = 1;
    for (std::uint64_t i = 0; i + 1 < p; ++i) {
      sum += (j * a / p) * je;
      if (sum >= (1ull << 62)) sum %= p;
      j = j * g % p;
      je = je * h % p;
    }
    sum %= p;
  } else {
    std::uint64_t j = 1, je = 1;
    for (std::uint64_t i = 0; i + 1 < p; ++i) {
      const std::uint64_t w = static_cast<std::uint64_t>(static_cast<unsigned __int128>(j) * a / p);
      sum = (sum + mulmod(w % p, je, p)) % p;
      j = mulmod(j, g, p);
      je = mulmod(je, h, p);
    }
  }
  const std::uint64_t lhs_coeff = (powmod(a, m % (p - 1), p) + p - 1) % p;
  const std::uint64_t rhs = mulmod(powmod(a, (m - 1) % (p - 1), p), sum, p);
  return mulmod(rhs, inverse_mod(lhs_coeff, p), p);
}

enum class DivisibilityRoute { Voronoi, Exact, DenominatorPrime };

inline const char* to_string(DivisibilityRoute r) {
  switch (r) {
    case DivisibilityRoute::Voronoi: return "voronoi";
    case DivisibilityRoute::Exact: return "exact";
    case DivisibilityRoute::DenominatorPrime: return "denominator-prime";
  }
  return "?";
}

struct NumeratorDivisibility {
  bool divides = false;
  DivisibilityRoute route = DivisibilityRoute::Voronoi;
};

inline constexpr std::uint64_t kDefaultVoronoiLimit = 1ull << 20;

/// Does the odd prime p divide N_n? Kummer-reduces n mod p-1 and uses
/// Voronoi below voronoi_limit, exact reduction above it.
inline NumeratorDivisibility divides_numerator(const Integer& p, std::uint64_t n,
                                               BernoulliTable& table = BernoulliTable::global(),
                                               std::uint64_t voronoi_limit = kDefaultVoronoiLimit) {
  if (p < 3 || mpz_even_p(p.get_mpz_t())) {
    throw DomainError("divides_numerator: p must be an odd prime");
  }
  if (n == 0 || n % 2) throw DomainError("divides_numerator: n must be even and positive");
  if (fits_u64(p) && n % (to_u64(p) - 1) == 0) {
    return {false, DivisibilityRoute::DenominatorPrime};
  }
  if (fits_u64(p) && to_u64(p) <= voronoi_limit) {
    const std::uint64_t q = to_u64(p);
    return {divided_bernoulli_mod_p(n % (q - 1), q) == 0, DivisibilityRoute::Voronoi};
  }
  if (n <= table.exact_limit()) {
    return {divides(p, table.get(n).numerator), DivisibilityRoute::Exact};
  }
  throw CapabilityError("divides_numerator: p=" + to_string(p) + " exceeds the Voronoi limit and n=" +
                        std::to_string(n) + " exceeds the exact limit");
}

}  // namespace qp2
