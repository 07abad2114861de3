#include <gtest/gtest.h>

#include "circle_ergodic/singular.hpp"

using namespace ce;

namespace {
constexpr double kGamma0 = 0.57721566490153286061;
constexpr double kGamma1 = -0.07281584548367672486;
constexpr double kGamma2 = -0.00969036319287231848;
constexpr double kGamma3 = 0.00205383442030334587;

// Limit definition with the trapezoid correction f(n)/2, at a fixed large n.
double stieltjes_by_limit(int k, long n) {
  long double s = 0.0L;
  for (long m = 1; m <= n; ++m) s += std::pow(std::log(static_cast<long double>(m)), k) / m;
  const long double L = std::log(static_cast<long double>(n));
  s -= std::pow(L, k + 1) / (k + 1);
  s -= std::pow(L, k) / n / 2;
  return static_cast<double>(s);
}
}  // namespace

TEST(Stieltjes, ReferenceTable) {
  EXPECT_NEAR(stieltjes_constant(0), kGamma0, 1e-12);
  EXPECT_NEAR(stieltjes_constant(1), kGamma1, 1e-12);
  EXPECT_NEAR(stieltjes_constant(2), kGamma2, 1e-12);
  EXPECT_NEAR(stieltjes_constant(3), kGamma3, 1e-12);
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(stieltjes_constant(k), stieltjes_by_limit(k, 2000000), 1e-9);
  for (int k = 4; k <= 10; ++k) EXPECT_NO_THROW(stieltjes_constant(k));
}

TEST(Laurent, ZetaExpansion) {
  auto z = zeta_laurent(3);
  EXPECT_EQ(z[-1], 1.0);
  EXPECT_NEAR(z[0], 0.5772156649, 1e-9);
  EXPECT_NEAR(z[1], 0.0728158454, 1e-9);
  EXPECT_EQ(z.pole_order(), 1);
  EXPECT_THROW(z[4], TruncationError);
  EXPECT_THROW(zeta_laurent(11), DomainError);
}

TEST(Laurent, ArithmeticAndResidue) {
  auto a = LaurentSeries::taylor({1.0, 2.0, 3.0});
  auto inv = a.inverse();
  auto one = a * inv;
  EXPECT_NEAR(one[0], 1.0, 1e-15);
  EXPECT_NEAR(one[1], 0.0, 1e-15);
  EXPECT_NEAR(one[2], 0.0, 1e-15);
  // Res ζ(s) x^s/s = x.
  auto r = residue_polynomial(zeta_laurent(2));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], 1.0);
  // Res ζ(s)² x^s/s = x(log x + 2γ₀ − 1).
  auto r2 = residue_polynomial(zeta_laurent(3).pow(2));
  ASSERT_EQ(r2.size(), 2u);
  EXPECT_NEAR(r2[1], 1.0, 1e-15);
  EXPECT_NEAR(r2[0], 2 * kGamma0 - 1, 1e-12);
}

TEST(Hecke, LocalSums) {
  auto t = tau_table(100);
  auto lam = hecke_lambda(t);
  for (auto p : primes_up_to(97)) {
    auto s = euler_local_sum(p, 0, lam[p]);
    EXPECT_NEAR(s.value * hecke_local_inverse(p, lam[p]), 1.0, 1e-11) << p;
  }
  // Hypothetical λ(p) = 0: the j = 0 term is 1 and the odd powers vanish.
  auto z = euler_local_sum(3, 0, 0.0);
  EXPECT_NEAR(z.value, 1.0 / (1.0 - 1.0 / 9.0), 1e-11);
  // Stopping rule: the last included term is below the tolerance.
  auto s2 = euler_local_sum(2, 0, lam[2], 1e-6);
  auto s2b = euler_local_sum(2, 0, lam[2], 1e-12);
  EXPECT_LT(s2.terms, s2b.terms);
  EXPECT_NEAR(s2.value, s2b.value, 1e-6);
}

TEST(Hecke, DqBasics) {
  auto t = tau_table(200);
  auto lam = hecke_lambda(t);
  EXPECT_EQ(D_q(1, 0.3841, lam).value, 0.3841);
  // Bound shape |D_q| ≤ κ d(q)(log(q+2))^7/q, report κ.
  double kappa = 0.0;
  for (std::uint64_t q = 1; q <= 100; ++q) {
    const double d = D_q(q, 0.3841, lam).value;
    kappa = std::max(kappa, std::abs(d) * q / (num_divisors(q) * std::pow(std::log(q + 2.0), 7)));
  }
  EXPECT_LT(kappa, 1.0);
  RecordProperty("kappa", std::to_string(kappa));
}

TEST(Piltz, ClosedFormQ1) {
  auto P = piltz_log_polynomial(2, 1);
  ASSERT_EQ(P.coeffs.size(), 2u);
  EXPECT_NEAR(P.coeffs[0], 1.0, 1e-12);
  EXPECT_NEAR(P.coeffs[1], 2 * kGamma0, 1e-8);
  auto F = piltz_main_term(2, 1);
  EXPECT_NEAR(F.coeffs[1], 2 * kGamma0 - 1, 1e-10);
  EXPECT_THROW(piltz_log_polynomial(3, 1, 2), TruncationError);
  EXPECT_THROW(piltz_log_polynomial(1, 1), DomainError);
}

TEST(Piltz, CoefficientBoundShape) {
  for (int v = 2; v <= 3; ++v) {
    double kappa = 0.0;
    for (std::uint64_t q = 1; q <= 50; ++q)
      for (double c : piltz_log_polynomial(v, q).coeffs)
        kappa = std::max(kappa, std::abs(c) * std::pow(static_cast<double>(q), 0.9));
    // Observed maximum 10.36 at v = 3, q = 48.
    EXPECT_LT(kappa, 12.0) << v;
  }
}

TEST(Generic, CesaroAmplitudes) {
  auto spec = cesaro_spec();
  auto one = generic_log_polynomials(spec, 1);
  ASSERT_EQ(one.F.coeffs.size(), 1u);
  EXPECT_NEAR(one.F.coeffs[0], 1.0, 1e-12);
  EXPECT_NEAR(one.G.coeffs[0], 1.0, 1e-12);
  for (std::uint64_t q = 2; q <= 30; ++q) EXPECT_NEAR(generic_log_polynomials(spec, q).F.coeffs[0], 0.0, 1e-12) << q;
}

TEST(Generic, DivisorMatchesPiltz) {
  for (int v = 2; v <= 3; ++v) {
    auto spec = divisor_spec(v);
    for (std::uint64_t q = 1; q <= 20; ++q) {
      auto g = generic_log_polynomials(spec, q);
      auto p = piltz_log_polynomial(v, q);
      auto f = piltz_main_term(v, q);
      ASSERT_EQ(g.G.coeffs.size(), p.coeffs.size());
      for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        EXPECT_NEAR(g.G.coeffs[i], p.coeffs[i], 1e-10) << v << " " << q << " " << i;
        EXPECT_NEAR(g.F.coeffs[i], f.coeffs[i], 1e-10) << v << " " << q << " " << i;
      }
    }
  }
}

TEST(Generic, HeckeMatchesDq) {
  auto t = tau_table(100);
  auto lam = hecke_lambda(t);
  const double c = 0.3841;
  auto spec = hecke_square_spec(lam, c);
  for (std::uint64_t q = 1; q <= 30; ++q) {
    auto g = generic_log_polynomials(spec, q);
    ASSERT_EQ(g.G.coeffs.size(), 1u);
    EXPECT_NEAR(g.G.coeffs[0], D_q(q, c, lam).value, 1e-10) << q;
  }
}

TEST(Generic, Linearity) {
  auto spec = divisor_spec(3);
  auto doubled = spec;
  doubled.laurent_data = spec.laurent_data.scaled(2.0);
  for (std::uint64_t q : {1u, 6u, 12u}) {
    auto a = generic_log_polynomials(spec, q), b = generic_log_polynomials(doubled, q);
    for (std::size_t i = 0; i < a.F.coeffs.size(); ++i) EXPECT_NEAR(b.F.coeffs[i], 2 * a.F.coeffs[i], 1e-13);
  }
}

TEST(Generic, DivergentLocalFactor) {
  auto spec = cesaro_spec();
  spec.divisor_exponent = 0;
  spec.local_factor = [](std::uint64_t, int l) { return l >= 3 ? 2.0 : 1.0; };
  EXPECT_THROW(generic_log_polynomials(spec, 2), DivergenceError);
}
