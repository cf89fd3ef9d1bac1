#pragma once

// The quadratic residue equation a xbar^2 = c (mod b) for dimension 8k,
// its solvability from a verified factorization of b, and certificates
// (xbar, l, x, y, z) re-checked against the plane conditions.

#include <optional>
#include <string>
#include <vector>

#include "qp2/factordb.hpp"
#include "qp2/genus.hpp"

namespace qp2 {

/// k = 2^a (a == b, power_of_two) or k = 2^b + 2^a with b > a.
struct KShape {
  bool power_of_two = true;
  unsigned a = 0, b = 0;
};

inline std::optional<KShape> shape_of(std::uint64_t k) {
  if (k == 0) return std::nullopt;
  const unsigned w = binary_weight(k);
  if (w > 2) return std::nullopt;
  const unsigned lo = v2(k);
  if (w == 1) return KShape{true, lo, lo};
  return KShape{false, lo, static_cast<unsigned>(63 - __builtin_clzll(k))};
}

inline std::string to_string(const KShape& s) {
  if (s.power_of_two) return "2^" + std::to_string(s.a);
  return "2^" + std::to_string(s.b) + "+2^" + std::to_string(s.a);
}

struct QrEquation {
  unsigned long k = 0;
  KShape shape;
  Integer a, b, c;                 // after dividing out gcd_removed
  Integer a_full, b_full, c_full;  // as derived
  Integer rho;                     // OD_4k / OD_2k
  bool odd_xbar = false;           // solutions must have xbar odd
  Integer gcd_removed;
  Integer residual_gcd;            // gcd(a c, b) after reduction
  int sign = 1;                    // (-1)^(k+1)
  Integer mersenne, n2k, n4k, od2k, od4k;
};

/// Coefficients with the general sign (-1)^(k+1):
///   U = (2^(2k-1)-1) N_2k,  T = (2^(4k-1)-1) N_4k,  rho = OD_4k / OD_2k
///   wt(k) = 1:  a = U (rho U + s 2^(2k) T),   b = T OD_2k,  c = 2 OD_2k OD_4k
///   wt(k) = 2:  A = 2U (rho U + s 2^(2k) T),  B = T OD_2k,  C = OD_2k OD_4k
inline QrEquation build_equation(unsigned long k, BernoulliTable& table = BernoulliTable::global()) {
  const auto shape = shape_of(k);
  if (!shape) throw ShapeError("k = " + std::to_string(k) + " is not 2^a or 2^a + 2^b");
  if (4 * k > table.exact_limit())
    throw DomainError("k = " + std::to_string(k) + " needs N_" + std::to_string(4 * k) +
                      " beyond the exact limit");
  QrEquation eq;
  eq.k = k;
  eq.shape = *shape;
  eq.sign = k % 2 ? 1 : -1;
  eq.odd_xbar = !shape->power_of_two;
  const auto& b2 = table.get(2 * k);
  const auto& b4 = table.get(4 * k);
  eq.n2k = b2.numerator;
  eq.n4k = b4.numerator;
  eq.od2k = b2.odd_denominator;
  eq.od4k = b4.odd_denominator;
  if (!divides(eq.od2k, eq.od4k)) throw std::logic_error("OD_2k does not divide OD_4k");
  eq.rho = eq.od4k / eq.od2k;
  eq.mersenne = pow2(4 * k - 1) - 1;

  const Integer U = (pow2(2 * k - 1) - 1) * eq.n2k;
  const Integer T = eq.mersenne * eq.n4k;
  Integer inner = eq.rho * U + eq.sign * pow2(2 * k) * T;
  eq.a_full = U * inner;
  eq.b_full = T * eq.od2k;
  eq.c_full = eq.od2k * eq.od4k;
  if (shape->power_of_two) eq.c_full *= 2;
  else eq.a_full *= 2;

  eq.gcd_removed = gcd(gcd(eq.a_full, eq.b_full), eq.c_full);
  eq.a = eq.a_full / eq.gcd_removed;
  eq.b = eq.b_full / eq.gcd_removed;
  eq.c = eq.c_full / eq.gcd_removed;
  eq.residual_gcd = gcd(eq.a * eq.c, eq.b);
  return eq;
}

enum class JacobiScreen { MinusOne, PlusOne, Blocked };

inline const char* to_string(JacobiScreen s) {
  switch (s) {
    case JacobiScreen::MinusOne: return "-1";
    case JacobiScreen::PlusOne: return "+1";
    case JacobiScreen::Blocked: return "blocked";
  }
  return "?";
}

/// jacobi(a^-1 c, b) when gcd(a c, b) = 1. -1 rules out a solution.
inline JacobiScreen jacobi_screen(const Integer& a, const Integer& b, const Integer& c) {
  if (b < 1 || mpz_even_p(b.get_mpz_t())) throw DomainError("jacobi_screen: modulus must be odd and positive");
  if (gcd(a * c, b) != 1) return JacobiScreen::Blocked;
  const Integer t = mod_floor(*inverse_mod(a, b) * c, b);
  return jacobi(t, b) < 0 ? JacobiScreen::MinusOne : JacobiScreen::PlusOne;
}

inline JacobiScreen jacobi_screen(const QrEquation& eq) { return jacobi_screen(eq.a, eq.b, eq.c); }

struct LocalSolution {
  PrimePower pp;
  bool solvable = false;
  Integer root;  // a root^2 = c (mod p^r) when solvable
};

/// a x^2 = c (mod p^r) for odd p, by valuation case split.
inline LocalSolution solve_local(const Integer& a, const Integer& c, const PrimePower& pp) {
  LocalSolution out{pp, false, 0};
  const Integer m = pp.value();
  const Integer am = mod_floor(a, m), cm = mod_floor(c, m);
  const unsigned long va = am == 0 ? pp.r : std::min(valuation(am, pp.p), pp.r);
  const unsigned long vc = cm == 0 ? pp.r : std::min(valuation(cm, pp.p), pp.r);
  if (vc >= pp.r) {  // x = 0 works
    out.solvable = true;
    return out;
  }
  if (va > vc || (vc - va) % 2) return out;
  const unsigned long rest = pp.r - vc;
  const PrimePower unit_mod{pp.p, rest};
  const Integer modulus = unit_mod.value();
  const Integer a_unit = mod_floor(am / pow_ui(pp.p, va), modulus);
  const Integer c_unit = mod_floor(cm / pow_ui(pp.p, vc), modulus);
  const auto u = sqrt_mod(mod_floor(*inverse_mod(a_unit, modulus) * c_unit, modulus), unit_mod);
  if (!u) return out;
  out.solvable = true;
  out.root = mod_floor(pow_ui(pp.p, (vc - va) / 2) * *u, m);
  return out;
}

enum class QrStatus { Solvable, Unsolvable, Undecided };

inline const char* to_string(QrStatus s) {
  switch (s) {
    case QrStatus::Solvable: return "solvable";
    case QrStatus::Unsolvable: return "unsolvable";
    case QrStatus::Undecided: return "undecided";
  }
  return "?";
}

struct QrDecision {
  QrStatus status = QrStatus::Undecided;
  Integer xbar;                      // Solvable: a representative honoring the parity constraint
  std::optional<PrimePower> witness; // Unsolvable
  Integer missing = 1;               // Undecided: unfactored part of b
  std::vector<LocalSolution> local;
};

/// Decides a xbar^2 = c (mod b) from a verified factorization of b.
inline QrDecision decide(const QrEquation& eq, const VerifiedFactorization& fb) {
  if (fb.value() != eq.b) throw DomainError("factorization does not belong to this equation's modulus");
  QrDecision d;
  std::vector<Residue> roots;
  for (const auto& pp : fb.factors()) {
    auto loc = solve_local(eq.a, eq.c, pp);
    d.local.push_back(loc);
    if (!loc.solvable) {
      d.status = QrStatus::Unsolvable;
      d.witness = pp;
      return d;
    }
    const Integer m = pp.value();
    roots.push_back({std::min(loc.root, mod_floor(m - loc.root, m)), m});
  }
  if (!fb.complete()) {
    d.status = QrStatus::Undecided;
    d.missing = fb.remainder();
    return d;
  }
  Residue x = crt(std::span<const Residue>(roots));
  Integer xbar = x.value;
  if (x.modulus == 1) xbar = 0;
  // b is odd, so adding b flips parity; a power-of-two k has no constraint but
  // xbar = 0 only solves when b | c.
  if (eq.odd_xbar && mpz_even_p(xbar.get_mpz_t())) xbar += eq.b;
  d.status = QrStatus::Solvable;
  d.xbar = xbar;
  return d;
}

struct Certificate {
  unsigned long k = 0;
  Integer xbar, l, x, y, z;
};

/// Back-substitution from a solution xbar of the unreduced relation
/// a xbar^2 + b l = c. Throws CertificateError if any step fails.
inline Certificate make_certificate(const QrEquation& eq, const Integer& xbar,
                                    BernoulliTable& table = BernoulliTable::global()) {
  Certificate cert;
  cert.k = eq.k;
  cert.xbar = xbar;
  const Integer num = eq.c_full - eq.a_full * xbar * xbar;
  if (!divides(eq.b_full, num)) throw CertificateError("xbar does not solve the equation");
  cert.l = num / eq.b_full;
  if (mpz_odd_p(xbar.get_mpz_t()) != mpz_odd_p(cert.l.get_mpz_t()))
    throw CertificateError("xbar and l differ in parity");

  const unsigned long k = eq.k;
  const unsigned wt = eq.shape.power_of_two ? 1 : 2;
  const Integer U = (pow2(2 * k - 1) - 1) * eq.n2k;
  const Integer od4 = odd_factorial(4 * k - 1);
  if (!divides(eq.od2k, od4)) throw CertificateError("OD_2k does not divide Od[(4k-1)!]");
  cert.z = od4 / eq.od2k * eq.sign * pow2(2 * k + wt - 1) * U * xbar * xbar + od4 * cert.l;
  cert.x = odd_factorial(2 * k - 1) * xbar;
  const Integer twice_y = cert.z + cert.x * cert.x;
  if (mpz_odd_p(twice_y.get_mpz_t())) throw CertificateError("z + x^2 is odd");
  cert.y = twice_y / 2;
  if (!check_plane_conditions(k, cert.x, cert.y, table).ok())
    throw CertificateError("certificate fails the plane conditions");
  return cert;
}

/// All (x, y) with |x| <= bound, |y| <= bound^2 satisfying the plane
/// conditions; y is read off the signature equation for each x.
inline std::vector<std::pair<Integer, Integer>> brute_force_small(unsigned long k, long bound,
                                                                  BernoulliTable& table = BernoulliTable::global()) {
  if (k == 0 || k > 3) throw DomainError("brute_force_small supports 1 <= k <= 3");
  const LGenusCoeffs s = l_coeffs(k, table);
  const Integer ymax = Integer(bound) * bound;
  std::vector<std::pair<Integer, Integer>> out;
  for (long xi = -bound; xi <= bound; ++xi) {
    const Integer x = xi;
    Rational y = (Rational(1) - s.s_kk * Rational(x * x)) / s.s_2k;
    y.canonicalize();
    if (y.get_den() != 1) continue;
    const Integer yi = y.get_num();
    if (abs(yi) > ymax) continue;
    if (check_plane_conditions(k, x, yi, table).ok()) out.emplace_back(x, yi);
  }
  return out;
}

/// Verified factorization of the reduced modulus b of build_equation(k),
/// assembled from the parts 2^(4k-1)-1, N_4k and OD_2k. Stored records are
/// used first; the rest goes through factor() within budget.
inline VerifiedFactorization factors_of_B(const QrEquation& eq, const FactorStore& store,
                                          const FactorBudget& budget = {}) {
  struct Part {
    FactorTarget target;
    Integer value;
  };
  const std::vector<Part> parts = {{FactorTarget::mersenne(4 * eq.k - 1), eq.mersenne},
                                   {FactorTarget::numerator(4 * eq.k), eq.n4k},
                                   {FactorTarget::of(eq.od2k), eq.od2k}};
  std::vector<PrimePower> all;
  Integer remainder = 1;
  std::string provenance;
  for (const auto& part : parts) {
    Integer rest = part.value;
    std::string source;
    if (const auto* rec = store.find(part.target)) {
      for (const auto& f : rec->factors) {
        const unsigned long r = valuation(rest, f.p);
        if (r) {
          rest /= pow_ui(f.p, r);
          add_factor(all, f.p, r);
        }
      }
      source = rec->provenance.empty() ? "factor file" : rec->provenance;
    }
    if (rest > 1) {
      Factorization f = factor(rest, budget);
      for (const auto& g : f.factors) add_factor(all, g.p, g.r);
      remainder *= f.remainder;
      source += source.empty() ? "computed" : " + computed";
      if (!f.complete()) source += " (cofactor of " + std::to_string(mpz_sizeinbase(f.remainder.get_mpz_t(), 10)) + " digits unfactored)";
    }
    if (source.empty()) source = "trivial";
    if (!provenance.empty()) provenance += "; ";
    provenance += (part.target.kind == TargetKind::Literal ? std::string("OD_") + std::to_string(2 * eq.k)
                                                           : part.target.label()) + ": " + source;
  }
  // divide out the common factor removed from (a, b, c)
  Integer g = eq.gcd_removed;
  for (auto& f : all) {
    while (f.r > 0 && divides(f.p, g)) {
      g /= f.p;
      --f.r;
    }
  }
  if (g != 1) {
    if (!divides(g, remainder)) throw std::logic_error("gcd factor missing from factorization of b");
    remainder /= g;
  }
  std::erase_if(all, [](const PrimePower& f) { return f.r == 0; });
  (void)remainder;  // verify_factorization recomputes it from eq.b
  return verify_factorization(eq.b, all, provenance);
}

}  // namespace qp2
