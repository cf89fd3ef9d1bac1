#include <gtest/gtest.h>

#include "qp2/genus.hpp"

namespace {

using qp2::Integer;
using qp2::Rational;

Rational q(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

TEST(GenusCoeffs, Examples) {
  auto s = qp2::l_coeffs(1);
  EXPECT_EQ(s.s_k, q(1, 3));
  EXPECT_EQ(s.s_2k, q(7, 45));
  EXPECT_EQ(s.s_kk, q(-1, 45));
  EXPECT_EQ(qp2::l_coeffs(2).s_2k, q(127, 4725));
  EXPECT_EQ(qp2::l_coeffs(2).s_kk, q(-19, 14175));
  EXPECT_EQ(qp2::a_coeffs(1).a_k, q(-1, 24));
  EXPECT_EQ(qp2::a_coeffs(1).a_2k, q(-1, 1440));
  EXPECT_EQ(qp2::a_coeffs(1).a_kk, q(7, 5760));
  EXPECT_THROW(qp2::l_coeffs(0), qp2::DomainError);
  qp2::BernoulliTable small(16);
  EXPECT_THROW(qp2::l_coeffs(5, small), qp2::DomainError);
}

TEST(GenusCoeffs, LAndAHatTopCoefficientsAreProportional) {
  for (unsigned long k = 1; k <= 40; ++k) {
    auto s = qp2::l_coeffs(k);
    auto a = qp2::a_coeffs(k);
    Rational factor(-(qp2::pow2(4 * k + 1) * (qp2::pow2(4 * k - 1) - 1)));
    EXPECT_EQ(s.s_2k, factor * a.a_2k) << k;
    EXPECT_EQ(s.s_kk, (s.s_k * s.s_k - s.s_2k) / 2);
    EXPECT_EQ(a.a_kk, (a.a_k * a.a_k - a.a_2k) / 2);
  }
}

TEST(MCoefficient, Examples) {
  for (unsigned long k = 1; k <= 10; ++k) EXPECT_EQ(qp2::M(1, k), 1);
  EXPECT_EQ(qp2::M(2, 3), 60);
  EXPECT_EQ(qp2::M(3, 2), 0);
  EXPECT_THROW(qp2::M(0, 1), qp2::DomainError);
}

TEST(MCoefficient, DivisibleByLThrough64) {
  for (unsigned long l = 1; l <= 64; ++l)
    for (unsigned long k = 1; k <= 64; ++k)
      ASSERT_TRUE(qp2::divides(Integer(l), qp2::M(l, k))) << "l=" << l << " k=" << k;
}

TEST(MCoefficient, VanishesBelowDegree) {
  // m_l(T) has no terms of t-degree below l.
  for (unsigned long l = 2; l <= 20; ++l)
    for (unsigned long k = 1; k < l; ++k) EXPECT_EQ(qp2::M(l, k), 0) << l << " " << k;
}

TEST(LipschitzSylvester, OddExponentVariant) {
  // Integral except at k = 1 with a = 2 (mod 4), where a (a^2 - 1) / 12
  // keeps a single factor 2 in the denominator. Z[1/2] membership,
  // which is what the integrality argument consumes, holds throughout.
  for (unsigned long a = 1; a <= 10; ++a)
    for (unsigned long k = 1; k <= 40; ++k) {
      Integer ak = qp2::pow_ui(Integer(a), 2 * k);
      Rational v = Rational(qp2::pow_ui(Integer(a), 2 * k - 1) * (ak - 1)) *
                   qp2::abs_bernoulli(2 * k) / Rational(2 * k);
      v.canonicalize();
      EXPECT_TRUE(qp2::in_z_half(v)) << "a=" << a << " k=" << k;
      if (k == 1 && a % 4 == 2)
        EXPECT_EQ(v.get_den(), 2) << "a=" << a;
      else
        EXPECT_TRUE(qp2::is_integral(v)) << "a=" << a << " k=" << k;
    }
}

TEST(EClass, FormulaExamples) {
  auto e = qp2::e_class_formula(1, 1);
  EXPECT_EQ(e.pk, 1);
  EXPECT_EQ(e.pk2, q(1, 12));
  EXPECT_EQ(e.p2k, q(-1, 6));

  e = qp2::e_class_formula(1, 2);
  EXPECT_EQ(e.pk, q(-1, 6));
  EXPECT_EQ(e.pk2, q(1, 2 * 5040));
  EXPECT_EQ(e.p2k, q(-1, 5040));

  // M_3(2) = 0, so e_3 has no p_k term at k = 2
  EXPECT_EQ(qp2::e_class_formula(3, 2).pk, 0);
  EXPECT_THROW(qp2::e_class_formula(5, 2), qp2::DomainError);
}

TEST(EClass, ClosedFormForPkAndP2kCoefficients) {
  for (unsigned long k = 1; k <= 8; ++k)
    for (unsigned long l = 1; l <= 2 * k; ++l) {
      auto e = qp2::e_class_formula(l, k);
      const Rational f2k(qp2::factorial(2 * k - 1)), f4k(qp2::factorial(4 * k - 1));
      Rational pk = Rational((k + l) % 2 ? -1 : 1) * Rational(qp2::M(l, k)) / (Rational(l) * f2k);
      Rational p2k = Rational(l % 2 ? -1 : 1) * Rational(qp2::M(l, 2 * k)) / (Rational(l) * f4k);
      pk.canonicalize();
      p2k.canonicalize();
      EXPECT_EQ(e.pk, pk) << "l=" << l << " k=" << k;
      EXPECT_EQ(e.p2k, p2k) << "l=" << l << " k=" << k;
    }
}

TEST(EClass, BruteForceAgreesWithFormula) {
  for (unsigned long k = 1; k <= 4; ++k) {
    EXPECT_EQ(qp2::e_class_bruteforce(1, k), qp2::e_class_formula(1, k)) << k;
    for (unsigned long l = 2; l <= 2 * k; ++l) {
      auto brute = qp2::e_class_bruteforce(l, k);
      auto formula = qp2::e_class_formula(l, k);
      EXPECT_EQ(brute.pk, formula.pk) << "l=" << l << " k=" << k;
      EXPECT_EQ(brute.p2k, formula.p2k) << "l=" << l << " k=" << k;
      // The recursion also determines the p_k^2 coefficient.
      EXPECT_EQ(brute.pk2, formula.pk2) << "l=" << l << " k=" << k;
    }
  }
}

TEST(EClass, BruteForceBounds) {
  EXPECT_TRUE(qp2::e_class_bruteforce(5, 2).is_zero());
  EXPECT_THROW(qp2::e_class_bruteforce(1, 7), qp2::CapacityError);
  EXPECT_NO_THROW(qp2::e_class_bruteforce(12, 6));
}

TEST(PlaneConditions, Examples) {
  auto r = qp2::check_plane_conditions(1, 2, 7);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.signature, 1);
  EXPECT_EQ(r.e1_value, q(1, 2));

  EXPECT_TRUE(qp2::check_plane_conditions(2, 6, 39).ok());

  r = qp2::check_plane_conditions(1, 0, 6);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.signature_ok);
  EXPECT_EQ(r.signature, q(42, 45));
}

TEST(HattoriStong, Examples) {
  EXPECT_TRUE(qp2::hattori_stong_full_check(1, 2, 7));
  EXPECT_TRUE(qp2::hattori_stong_full_check(2, 6, 39));
  EXPECT_FALSE(qp2::check_plane_conditions(1, 1, 1).ok());
  EXPECT_FALSE(qp2::hattori_stong_full_check(1, 1, 1));
  EXPECT_THROW(qp2::hattori_stong_full_check(5, 1, 1), qp2::CapacityError);
}

TEST(HattoriStong, ReducedConditionsEquivalentOnSmallGrid) {
  int agreeing_solutions = 0;
  for (unsigned long k = 1; k <= 2; ++k)
    for (long x = -20; x <= 20; ++x)
      for (long y = -200; y <= 200; ++y) {
        const bool reduced = qp2::check_plane_conditions(k, x, y).ok();
        const bool full = qp2::hattori_stong_full_check(k, x, y);
        ASSERT_EQ(reduced, full) << "k=" << k << " x=" << x << " y=" << y;
        agreeing_solutions += reduced;
      }
  EXPECT_GT(agreeing_solutions, 0);
}

}  // namespace
