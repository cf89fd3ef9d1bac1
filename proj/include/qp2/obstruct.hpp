#pragma once

// Irregular-prime obstructions. A prime p = +-3 (mod 8) dividing N_{4k}
// rules out dimension 8k; so does N_{4k} = +-3 (mod 8) itself. Kummer's
// congruence spreads one pair (p, m) over residue classes of k = 2^a + 2^b.

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qp2/bernoulli.hpp"
#include "qp2/factordb.hpp"

namespace qp2 {

inline constexpr std::uint64_t kDefaultScanBound = 30000;

inline bool is_pm3_mod8(std::uint64_t p) { return p % 8 == 3 || p % 8 == 5; }
inline bool is_pm3_mod8(const Integer& p) {
  const unsigned long r = mpz_fdiv_ui(p.get_mpz_t(), 8);
  return r == 3 || r == 5;
}

// --- mod 8 ---------------------------------------------------------------

/// Residue of N_{4k} mod 8 when it is 3 or 5.
inline std::optional<unsigned> mod8_test(std::uint64_t k) {
  if (k == 0) throw DomainError("mod8_test: k must be positive");
  const unsigned r = n_mod8_carlitz(k);
  if (r == 3 || r == 5) return r;
  return std::nullopt;
}

struct CarlitzMember {
  unsigned i = 0, a = 0;
  bool operator==(const CarlitzMember&) const = default;
};

inline constexpr unsigned kCarlitzGaps[] = {1, 2, 3, 5, 7};

/// k = 2^(a+i) + 2^a with i in {1,2,3,5,7}.
inline std::optional<CarlitzMember> carlitz_family_member(std::uint64_t k) {
  if (k == 0 || binary_weight(k) != 2) return std::nullopt;
  const unsigned a = v2(k);
  const unsigned top = 63 - __builtin_clzll(k);
  const unsigned i = top - a;
  if (std::find(std::begin(kCarlitzGaps), std::end(kCarlitzGaps), i) == std::end(kCarlitzGaps)) {
    return std::nullopt;
  }
  return CarlitzMember{i, a};
}

// --- prime scan and hints ------------------------------------------------

enum class PrimeSource { Scan, Hint };

inline const char* to_string(PrimeSource s) { return s == PrimeSource::Scan ? "scan" : "hint"; }

struct PrimeObstruction {
  Integer p;
  std::uint64_t n = 0;  // index of the numerator, 4k
  PrimeSource source = PrimeSource::Scan;
  DivisibilityRoute route = DivisibilityRoute::Voronoi;
  std::string provenance;
};

namespace detail {
inline const std::vector<std::uint32_t>& scan_primes(std::uint64_t bound) {
  static std::mutex mu;
  static std::vector<std::uint32_t> cache;
  static std::uint64_t cached_bound = 0;
  std::lock_guard lock(mu);
  if (bound > cached_bound) {
    if (bound > 0xffffffffull) throw CapacityError("scan bound above 2^32");
    cache.clear();
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(bound))) {
      if (is_pm3_mod8(std::uint64_t{p})) cache.push_back(p);
    }
    cached_bound = bound;
  }
  return cache;
}
}  // namespace detail

/// Smallest p <= bound, p = +-3 (mod 8), with p | N_{4k}.
inline std::optional<std::uint64_t> scan_obstructing_prime(std::uint64_t k,
                                                           std::uint64_t bound = kDefaultScanBound) {
  if (k == 0) throw DomainError("scan_obstructing_prime: k must be positive");
  const std::uint64_t n = 4 * k;
  for (std::uint32_t p : detail::scan_primes(bound)) {
    if (p > bound) break;
    if (n % (p - 1) == 0) continue;
    if (divided_bernoulli_mod_p(n % (p - 1), p) == 0) return p;
  }
  return std::nullopt;
}

/// p = +-3 (mod 8) and p | N_{4k}. p must already be certified prime.
inline bool verify_prime_hint(std::uint64_t k, const Integer& p,
                              BernoulliTable& table = BernoulliTable::global()) {
  if (k == 0) throw DomainError("verify_prime_hint: k must be positive");
  if (!is_pm3_mod8(p)) return false;
  return divides_numerator(p, 4 * k, table).divides;
}

/// Primes = +-3 (mod 8) listed for N_{4k} in the store, each re-verified.
inline std::vector<PrimeObstruction> hint_obstructions(std::uint64_t k, const FactorStore& store,
                                                       BernoulliTable& table = BernoulliTable::global()) {
  std::vector<PrimeObstruction> out;
  const auto* rec = store.find(FactorTarget::numerator(4 * k));
  if (!rec) return out;
  for (const auto& f : rec->factors) {
    if (!is_pm3_mod8(f.p)) continue;
    auto d = divides_numerator(f.p, 4 * k, table);
    if (!d.divides) {
      throw VerificationError(FactorTarget::numerator(4 * k).label(),
                              "hint " + to_string(f.p) + " does not divide the numerator");
    }
    out.push_back({f.p, 4 * k, PrimeSource::Hint, d.route, rec->provenance});
  }
  return out;
}

/// Scan first; fall back to store hints. Smallest prime wins either way.
inline std::optional<PrimeObstruction> find_prime_obstruction(std::uint64_t k, std::uint64_t bound,
                                                              const FactorStore* store,
                                                              BernoulliTable& table = BernoulliTable::global()) {
  if (auto p = scan_obstructing_prime(k, bound)) {
    return PrimeObstruction{from_u64(*p), 4 * k, PrimeSource::Scan, DivisibilityRoute::Voronoi, {}};
  }
  if (!store) return std::nullopt;
  auto hints = hint_obstructions(k, *store, table);
  if (hints.empty()) return std::nullopt;
  return *std::min_element(hints.begin(), hints.end(),
                           [](const auto& x, const auto& y) { return x.p < y.p; });
}

// --- Kummer families -----------------------------------------------------

struct IrregularPair {
  std::uint64_t p = 0, m = 0;
  bool operator==(const IrregularPair&) const = default;
};

inline IrregularPair make_irregular_pair(std::uint64_t p, std::uint64_t m) {
  if (!is_prime(p) || !is_pm3_mod8(p)) throw DomainError("irregular pair: p must be a prime = +-3 mod 8");
  if (m < 2 || m % 2 || m + 3 > p) throw DomainError("irregular pair: need even m in [2, p-3]");
  if (divided_bernoulli_mod_p(m, p) != 0) {
    throw DomainError("irregular pair: " + std::to_string(p) + " does not divide N_" + std::to_string(m));
  }
  return {p, m};
}

/// All (p, m) with p < bound, p = +-3 (mod 8), p | N_m, m <= p - 3.
inline std::vector<IrregularPair> irregular_pairs_below(std::uint64_t bound) {
  std::vector<IrregularPair> out;
  for (std::uint32_t p : detail::scan_primes(bound)) {
    if (p >= bound) break;
    for (std::uint64_t m = 2; m + 3 <= p; m += 2) {
      if (divided_bernoulli_mod_p(m, p) == 0) out.push_back({p, m});
    }
  }
  return out;
}

/// Class of (a, b): entries below `preperiod` are exact, the rest are mod L.
struct ResidueClass {
  unsigned a = 0, b = 0;
  bool operator==(const ResidueClass&) const = default;
};

struct KummerFamily {
  IrregularPair pair;
  unsigned preperiod = 0;
  unsigned period = 0;
  std::vector<ResidueClass> classes;  // a <= b; diagonal first, then lexicographic

  bool empty() const { return classes.empty(); }

  /// Is k = 2^a + 2^b (or 2^(c+1) = 2^c + 2^c) covered?
  bool covers(std::uint64_t k) const {
    if (k == 0 || binary_weight(k) > 2) return false;
    unsigned a, b;
    if (binary_weight(k) == 1) {
      if (k == 1) return false;
      a = b = v2(k) - 1;
    } else {
      a = v2(k);
      b = 63 - __builtin_clzll(k);
    }
    auto reduce = [&](unsigned e) { return e < preperiod ? e : preperiod + (e - preperiod) % period; };
    const ResidueClass c{std::min(reduce(a), reduce(b)), std::max(reduce(a), reduce(b))};
    return std::find(classes.begin(), classes.end(), c) != classes.end();
  }
};

/// Enumerate classes of (a, b) with 4(2^a + 2^b) = m (mod p-1), detecting the
/// cycle of 4*2^a mod (p-1) directly.
inline KummerFamily kummer_family(const IrregularPair& pair) {
  const std::uint64_t M = pair.p - 1;
  std::vector<std::uint64_t> seq;
  std::map<std::uint64_t, unsigned> seen;
  std::uint64_t v = 4 % M;
  while (!seen.count(v)) {
    seen[v] = static_cast<unsigned>(seq.size());
    seq.push_back(v);
    v = 2 * v % M;
  }
  KummerFamily fam{pair, seen[v], static_cast<unsigned>(seq.size()) - seen[v], {}};
  const unsigned span = static_cast<unsigned>(seq.size());
  for (unsigned a = 0; a < span; ++a)
    for (unsigned b = a; b < span; ++b)
      if ((seq[a] + seq[b]) % M == pair.m % M) fam.classes.push_back({a, b});
  std::stable_sort(fam.classes.begin(), fam.classes.end(), [](const auto& x, const auto& y) {
    return (x.a == x.b) > (y.a == y.b);
  });
  return fam;
}

namespace detail {
inline std::string exponent(unsigned period, const char* var, unsigned offset, bool exact) {
  if (exact) return "2^{" + std::to_string(offset) + "}";
  return "2^{" + std::to_string(period) + var + "+" + std::to_string(offset) + "}";
}
}  // namespace detail

/// Dimensions 8k from one class: 2^{Lr+a+3} + 2^{Ls+b+3}.
inline std::string dimension_family(const KummerFamily& fam, const ResidueClass& c) {
  return detail::exponent(fam.period, "r", c.a + 3, c.a < fam.preperiod) + "+" +
         detail::exponent(fam.period, "s", c.b + 3, c.b < fam.preperiod);
}

/// Power-of-two dimensions from the diagonal class, 2^{Lr+c+4}.
inline std::optional<std::string> power_of_two_family(const KummerFamily& fam) {
  for (const auto& c : fam.classes) {
    if (c.a == c.b && c.a >= fam.preperiod) {
      return detail::exponent(fam.period, "r", c.a + 4, false);
    }
  }
  return std::nullopt;
}

/// The irregular pairs with p = +-3 (mod 8) and p < 400, as tabulated.
inline std::vector<IrregularPair> tabulated_pairs() {
  return {{37, 32},  {59, 44},  {67, 58},  {101, 68}, {131, 22},  {149, 130}, {157, 62},
          {157, 110}, {283, 20}, {293, 156}, {307, 88}, {347, 280}, {379, 174}, {389, 200}};
}

// --- the dimension table -------------------------------------------------

struct PrimeTableRow {
  std::uint64_t k = 0;
  unsigned a = 0, b = 0;  // k = 2^a + 2^b, a >= b; 2^c is written (c-1, c-1)
  std::optional<PrimeObstruction> obstruction;
  std::uint64_t dimension() const { return 8 * k; }
  std::string label() const { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }
};

/// Dimensions lo < 8k <= hi with wt(k) <= 2 not ruled out by the mod-8 test.
inline std::vector<PrimeTableRow> prime_table(std::uint64_t lo_dim, std::uint64_t hi_dim,
                                              std::uint64_t bound, const FactorStore* store,
                                              BernoulliTable& table = BernoulliTable::global()) {
  std::vector<PrimeTableRow> rows;
  for (std::uint64_t k = lo_dim / 8 + 1; 8 * k <= hi_dim; ++k) {
    const unsigned w = binary_weight(k);
    if (w > 2 || mod8_test(k)) continue;
    PrimeTableRow row;
    row.k = k;
    if (w == 1) {
      row.a = row.b = v2(k) - 1;
    } else {
      row.a = 63 - __builtin_clzll(k);
      row.b = v2(k);
    }
    row.obstruction = find_prime_obstruction(k, bound, store, table);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string render_prime_table(const std::vector<PrimeTableRow>& rows) {
  std::ostringstream os;
  os << "| (a,b) | prime p \\| N_4k, p = +-3 mod 8 | dimension n=8k | QP^2 in dimension n? |\n";
  os << "|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.label() << " | " << (r.obstruction ? to_string(r.obstruction->p) : "?") << " | "
       << r.dimension() << " | " << (r.obstruction ? "No" : "?") << " |\n";
  }
  return os.str();
}

inline std::string render_kummer_table(const std::vector<KummerFamily>& fams) {
  std::ostringstream os;
  os << "| irregular prime p \\| N_m | (a,b) with 4(2^a+2^b) = m mod p-1 | dimensions n=8k |\n";
  os << "|---|---|---|\n";
  // pairs sharing a prime and both empty are merged, as in "157 | N_62 and N_110"
  for (std::size_t i = 0; i < fams.size(); ++i) {
    const auto& f = fams[i];
    std::string head = std::to_string(f.pair.p) + " \\| N_" + std::to_string(f.pair.m);
    while (i + 1 < fams.size() && fams[i + 1].pair.p == f.pair.p && f.empty() && fams[i + 1].empty()) {
      head += " and N_" + std::to_string(fams[++i].pair.m);
    }
    os << "| " << head << " | ";
    if (f.empty()) {
      os << "no such (a,b) | |\n";
      continue;
    }
    for (std::size_t j = 0; j < f.classes.size(); ++j) {
      os << (j ? "; " : "") << "(" << f.classes[j].a << "," << f.classes[j].b << ")";
    }
    os << " (mod " << f.period << ") | ";
    for (std::size_t j = 0; j < f.classes.size(); ++j) {
      os << (j ? "; " : "") << dimension_family(f, f.classes[j]);
    }
    os << " |\n";
  }
  return os.str();
}

}  // namespace qp2
