#pragma once

// Spin rational projective planes. A Spin ℚP² in dimension 8k with
// signature sigma forces v2(2 sigma) >= 4k - 2 v2(k) - 5; with sigma = 1
// only k = 1, 2 survive.

#include <string>

#include "qp2/genus.hpp"

namespace qp2 {

inline long spin_bound_rhs(std::uint64_t k) {
  return 4 * static_cast<long>(k) - 2 * static_cast<long>(v2(k)) - 5;
}

/// The necessary 2-adic condition on the signature.
inline bool spin_bound(std::uint64_t k, const Integer& sigma) {
  if (k == 0) throw DomainError("spin_bound: k must be positive");
  if (sigma == 0) throw DomainError("spin_bound: signature must be nonzero");
  return static_cast<long>(v2(Integer(2 * sigma))) >= spin_bound_rhs(k);
}

struct SpinCheckInput {
  std::uint64_t k = 1;
  Integer sigma = 1;
  Integer xi;  // p_k^2 [M]
  Integer y;   // p_2k [M]
};

struct SpinConditionReport {
  Rational signature_value;  // s_kk xi + s_2k y
  Rational ahat_value;       // a_kk xi + a_2k y
  Rational e1e1_value;       // xi / ((2k-1)!)^2
  bool signature_ok = false;
  bool ahat_integral = false;
  bool e1e1_integral = false;
  bool ok() const { return signature_ok && ahat_integral && e1e1_integral; }
};

inline SpinConditionReport spin_conditions(const SpinCheckInput& in,
                                           BernoulliTable& table = BernoulliTable::global()) {
  if (in.sigma == 0) throw DomainError("spin_conditions: signature must be nonzero");
  const auto s = l_coeffs(in.k, table);
  const auto a = a_coeffs(in.k, table);
  SpinConditionReport r;
  r.signature_value = s.s_kk * in.xi + s.s_2k * in.y;
  r.ahat_value = a.a_kk * in.xi + a.a_2k * in.y;
  const Integer f = factorial(2 * in.k - 1);
  r.e1e1_value = Rational(in.xi, f * f);
  r.e1e1_value.canonicalize();
  r.signature_ok = r.signature_value == Rational(in.sigma);
  r.ahat_integral = is_integral(r.ahat_value);
  r.e1e1_integral = is_integral(r.e1e1_value);
  return r;
}

enum class SpinReason { NotPlaneDimension, OddIntersectionForm, TwoAdicBound };

inline const char* to_string(SpinReason r) {
  switch (r) {
    case SpinReason::NotPlaneDimension: return "no rational projective plane in this dimension";
    case SpinReason::OddIntersectionForm: return "intersection form is odd in dimension 4";
    case SpinReason::TwoAdicBound: return "2-adic signature bound fails";
  }
  return "?";
}

struct SpinVerdict {
  bool possible = false;
  std::optional<SpinReason> reason;
};

inline SpinVerdict spin_classify(std::uint64_t n) {
  if (n == 4) return {false, SpinReason::OddIntersectionForm};
  if (n == 0 || n % 8) return {false, SpinReason::NotPlaneDimension};
  if (!spin_bound(n / 8, 1)) return {false, SpinReason::TwoAdicBound};
  return {true, std::nullopt};
}

}  // namespace qp2
