#pragma once

// L-genus and A-hat coefficients for a manifold whose only nonzero rational
// Pontryagin classes are p_k and p_2k, the e_l classes of the Hattori-Stong
// lattice, and the integrality conditions on the numbers (x^2, y).

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "qp2/bernoulli.hpp"

namespace qp2 {

class FactorialCache {
 public:
  static FactorialCache& global() {
    static FactorialCache cache;
    return cache;
  }

  const Integer& get(unsigned long n) {
    std::lock_guard lock(mu_);
    auto it = values_.find(n);
    if (it != values_.end()) return it->second;
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return values_.emplace(n, std::move(f)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<unsigned long, Integer> values_;  // node-based: references stay valid
};

inline const Integer& factorial(unsigned long n) { return FactorialCache::global().get(n); }

/// Od[n!]
inline Integer odd_factorial(unsigned long n) { return odd_part(factorial(n)); }

/// Reduced denominator is a power of two.
inline bool in_z_half(const Rational& q) {
  return odd_part(Integer(q.get_den())) == 1;
}

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

/// |B_n| as an exact rational, n even.
inline Rational abs_bernoulli(unsigned long n, BernoulliTable& table = BernoulliTable::global()) {
  const auto& b = table.get(n);
  Rational q(b.numerator * static_cast<unsigned long>(n), b.denominator);
  q.canonicalize();
  return q;
}

struct LGenusCoeffs {
  unsigned long k = 0;
  Rational s_k, s_2k, s_kk;
};

struct AHatCoeffs {
  unsigned long k = 0;
  Rational a_k, a_2k, a_kk;
};

namespace detail {

inline void check_genus_range(unsigned long k, const BernoulliTable& table) {
  if (k == 0 || 4 * k > table.exact_limit())
    throw DomainError("k = " + std::to_string(k) + " outside 1 <= k <= exact_limit/4");
}

// 2^(2j) (2^(2j-1) - 1) |B_2j| / (2j)!
inline Rational l_coefficient(unsigned long j, BernoulliTable& table) {
  Rational q = Rational(pow2(2 * j) * (pow2(2 * j - 1) - 1)) * abs_bernoulli(2 * j, table) /
               Rational(factorial(2 * j));
  q.canonicalize();
  return q;
}

// -|B_2j| / (2 (2j)!)
inline Rational a_coefficient(unsigned long j, BernoulliTable& table) {
  Rational q = -abs_bernoulli(2 * j, table) / Rational(2 * factorial(2 * j));
  q.canonicalize();
  return q;
}

}  // namespace detail

inline LGenusCoeffs l_coeffs(unsigned long k, BernoulliTable& table = BernoulliTable::global()) {
  detail::check_genus_range(k, table);
  LGenusCoeffs c;
  c.k = k;
  c.s_k = detail::l_coefficient(k, table);
  c.s_2k = detail::l_coefficient(2 * k, table);
  c.s_kk = (c.s_k * c.s_k - c.s_2k) / 2;
  c.s_kk.canonicalize();
  return c;
}

inline AHatCoeffs a_coeffs(unsigned long k, BernoulliTable& table = BernoulliTable::global()) {
  detail::check_genus_range(k, table);
  AHatCoeffs c;
  c.k = k;
  c.a_k = detail::a_coefficient(k, table);
  c.a_2k = detail::a_coefficient(2 * k, table);
  c.a_kk = (c.a_k * c.a_k - c.a_2k) / 2;
  c.a_kk.canonicalize();
  return c;
}

/// M_l(k) = sum_{j=0}^{l-1} (-1)^j C(2l, j) (l-j)^(2k)
inline Integer M(unsigned long l, unsigned long k) {
  if (l == 0) throw DomainError("M: l must be positive");
  Integer sum = 0, binom = 1;  // C(2l, j)
  for (unsigned long j = 0; j < l; ++j) {
    Integer term = binom * pow_ui(Integer(l - j), 2 * k);
    if (j % 2) sum -= term;
    else sum += term;
    binom = binom * (2 * l - j) / (j + 1);
  }
  return sum;
}

/// c_pk p_k + c_pk2 p_k^2 + c_p2k p_2k; every other Pontryagin monomial is zero.
struct FormalClass {
  unsigned long k = 0;
  Rational pk, pk2, p2k;

  FormalClass& operator+=(const FormalClass& o) {
    pk += o.pk;
    pk2 += o.pk2;
    p2k += o.p2k;
    return *this;
  }
  friend FormalClass operator+(FormalClass a, const FormalClass& b) { return a += b; }
  friend FormalClass operator*(const Rational& s, FormalClass a) {
    a.pk *= s;
    a.pk2 *= s;
    a.p2k *= s;
    return a;
  }
  /// Product in the truncated ring: only p_k * p_k survives.
  friend FormalClass operator*(const FormalClass& a, const FormalClass& b) {
    FormalClass r;
    r.k = a.k;
    r.pk2 = a.pk * b.pk;
    return r;
  }
  friend bool operator==(const FormalClass& a, const FormalClass& b) {
    return a.pk == b.pk && a.pk2 == b.pk2 && a.p2k == b.p2k;
  }
  bool is_zero() const { return pk == 0 && pk2 == 0 && p2k == 0; }
};

/// e_1 in closed form.
inline FormalClass e1_class(unsigned long k) {
  FormalClass e;
  e.k = k;
  const Rational f2k(factorial(2 * k - 1)), f4k(factorial(4 * k - 1));
  e.pk = Rational(k % 2 ? 1 : -1) / f2k;
  e.pk2 = Rational(1) / (2 * f4k);
  e.p2k = Rational(-1) / f4k;
  e.pk.canonicalize();
  e.pk2.canonicalize();
  e.p2k.canonicalize();
  return e;
}

/// e_1 .. e_l from the Newton-Girard recursion with m_l expressed through M_l.
inline std::vector<FormalClass> e_classes_formula(unsigned long l_max, unsigned long k) {
  if (k == 0) throw DomainError("k must be positive");
  if (l_max > 2 * k) throw DomainError("e_l vanishes in degree 8k for l > 2k");
  std::vector<FormalClass> e(l_max + 1);
  if (l_max == 0) return e;
  e[1] = e1_class(k);
  const Rational pk_unit = e[1].pk;  // (-1)^(k+1) / (2k-1)!
  for (unsigned long l = 2; l <= l_max; ++l) {
    const Integer ml_k = M(l, k), ml_2k = M(l, 2 * k);
    FormalClass m = Rational(ml_2k) * e[1];
    m.pk += Rational(ml_k - ml_2k) * pk_unit;
    FormalClass cur = Rational(l % 2 ? 1 : -1, l) * m;
    cur.k = k;
    FormalClass half_sum;
    for (unsigned long i = 1; i < l; ++i) half_sum += e[i] * e[l - i];
    cur += Rational(1, 2) * half_sum;
    cur.pk.canonicalize();
    cur.pk2.canonicalize();
    cur.p2k.canonicalize();
    e[l] = cur;
  }
  return e;
}

inline FormalClass e_class_formula(unsigned long l, unsigned long k) {
  if (l == 0) throw DomainError("l must be positive");
  return e_classes_formula(l, k)[l];
}

namespace detail {

// Element of the graded ring Q[p_k, p_2k] truncated above t-degree 2k:
// coefficients of 1, p_k, p_k^2, p_2k.
struct Truncated {
  Rational c0, pk, pk2, p2k;
  Truncated& operator+=(const Truncated& o) {
    c0 += o.c0;
    pk += o.pk;
    pk2 += o.pk2;
    p2k += o.p2k;
    return *this;
  }
  friend Truncated operator*(const Rational& s, Truncated a) {
    a.c0 *= s;
    a.pk *= s;
    a.pk2 *= s;
    a.p2k *= s;
    return a;
  }
  friend Truncated operator*(const Truncated& a, const Truncated& b) {
    Truncated r;
    r.c0 = a.c0 * b.c0;
    r.pk = a.c0 * b.pk + a.pk * b.c0;
    r.pk2 = a.c0 * b.pk2 + a.pk2 * b.c0 + a.pk * b.pk;
    r.p2k = a.c0 * b.p2k + a.p2k * b.c0;
    return r;
  }
};

}  // namespace detail

/// e_l from first principles: power sums of t from the elementary values
/// (p_j = 0 unless j in {k, 2k}), the series T = sum 2 t^n/(2n)!, and
/// Newton-Girard back to the elementary symmetric functions of T.
inline FormalClass e_class_bruteforce(unsigned long l, unsigned long k) {
  if (k == 0 || l == 0) throw DomainError("l and k must be positive");
  if (k > 6) throw CapacityError("brute-force e_l oracle supports k <= 6");
  FormalClass zero;
  zero.k = k;
  const unsigned long top = 2 * k;
  if (l > top) return zero;
  using detail::Truncated;

  std::vector<Truncated> sigma(top + 1), power(top + 1);
  sigma[0].c0 = 1;
  sigma[k].pk = 1;
  sigma[top].p2k = 1;
  // P_n = sum_{i=1}^{n-1} (-1)^(i-1) sigma_i P_{n-i} + (-1)^(n-1) n sigma_n
  for (unsigned long n = 1; n <= top; ++n) {
    Truncated acc;
    for (unsigned long i = 1; i < n; ++i)
      acc += Rational(i % 2 ? 1 : -1) * (sigma[i] * power[n - i]);
    acc += Rational(n % 2 ? 1 : -1) * Rational(n) * sigma[n];
    power[n] = acc;
  }

  // coefficient of t^n in T^j, for j, n <= top
  std::vector<std::vector<Rational>> tpow(top + 1, std::vector<Rational>(top + 1));
  std::vector<Rational> series(top + 1);
  for (unsigned long n = 1; n <= top; ++n) series[n] = Rational(2) / Rational(factorial(2 * n));
  tpow[0][0] = 1;
  for (unsigned long j = 1; j <= top; ++j)
    for (unsigned long n = j; n <= top; ++n)
      for (unsigned long d = 1; d <= n - (j - 1); ++d) tpow[j][n] += series[d] * tpow[j - 1][n - d];

  // power sums of T: m_j(T) = sum_n [t^n]T^j * P_n(t)
  std::vector<Truncated> mT(top + 1);
  for (unsigned long j = 1; j <= top; ++j)
    for (unsigned long n = j; n <= top; ++n) mT[j] += tpow[j][n] * power[n];

  // j e_j = sum_{i=1}^{j} (-1)^(i-1) e_{j-i} m_i
  std::vector<Truncated> e(l + 1);
  e[0].c0 = 1;
  for (unsigned long j = 1; j <= l; ++j) {
    Truncated acc;
    for (unsigned long i = 1; i <= j; ++i)
      acc += Rational(i % 2 ? 1 : -1) * (e[j - i] * mT[i]);
    e[j] = Rational(1, j) * acc;
  }
  FormalClass r;
  r.k = k;
  r.pk = e[l].pk;
  r.pk2 = e[l].pk2;
  r.p2k = e[l].p2k;
  r.pk.canonicalize();
  r.pk2.canonicalize();
  r.p2k.canonicalize();
  return r;
}

/// <c . L, mu> with <p_k^2, mu> = x^2 and <p_2k, mu> = y.
inline Rational pair_with_l(const FormalClass& c, const LGenusCoeffs& s, const Integer& x,
                            const Integer& y) {
  Rational v = (c.pk * s.s_k + c.pk2) * Rational(x * x) + c.p2k * Rational(y);
  v.canonicalize();
  return v;
}

/// The three conditions on (x, y) for a plane in dimension 8k.
struct PlaneConditionReport {
  unsigned long k = 0;
  Rational signature;  // s_kk x^2 + s_2k y, must equal 1
  Rational e1_value;   // must lie in Z[1/2]
  Rational e1e1_value; // x^2 / ((2k-1)!)^2, must lie in Z[1/2]
  bool signature_ok = false, e1_ok = false, e1e1_ok = false;
  bool ok() const { return signature_ok && e1_ok && e1e1_ok; }
};

inline PlaneConditionReport check_plane_conditions(unsigned long k, const Integer& x,
                                                   const Integer& y,
                                                   BernoulliTable& table = BernoulliTable::global()) {
  const LGenusCoeffs s = l_coeffs(k, table);
  PlaneConditionReport r;
  r.k = k;
  const Rational x2(x * x), yq(y);
  r.signature = s.s_kk * x2 + s.s_2k * yq;
  r.signature.canonicalize();
  const Rational f2k(factorial(2 * k - 1)), f4k(factorial(4 * k - 1));
  const Rational sign(k % 2 ? 1 : -1);
  r.e1_value = (sign * s.s_k / f2k + Rational(1) / (2 * f4k)) * x2 - yq / f4k;
  r.e1_value.canonicalize();
  r.e1e1_value = x2 / (f2k * f2k);
  r.e1e1_value.canonicalize();
  r.signature_ok = r.signature == 1;
  r.e1_ok = in_z_half(r.e1_value);
  r.e1e1_ok = in_z_half(r.e1e1_value);
  return r;
}

/// Signature 1 plus <e_l L> and <e_l e_m L> in Z[1/2] for every l <= 2k and
/// l + m <= 2k, with e_l from the brute-force oracle.
inline bool hattori_stong_full_check(unsigned long k, const Integer& x, const Integer& y,
                                     BernoulliTable& table = BernoulliTable::global()) {
  if (k > 4) throw CapacityError("full Hattori-Stong check supports k <= 4");
  const LGenusCoeffs s = l_coeffs(k, table);
  Rational sig = s.s_kk * Rational(x * x) + s.s_2k * Rational(y);
  if (sig != 1) return false;
  std::vector<FormalClass> e(2 * k + 1);
  for (unsigned long l = 1; l <= 2 * k; ++l) e[l] = e_class_bruteforce(l, k);
  for (unsigned long l = 1; l <= 2 * k; ++l) {
    if (!in_z_half(pair_with_l(e[l], s, x, y))) return false;
    for (unsigned long m = l; l + m <= 2 * k; ++m)
      if (!in_z_half(pair_with_l(e[l] * e[m], s, x, y))) return false;
  }
  return true;
}

}  // namespace qp2
