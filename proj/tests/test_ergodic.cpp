#include <gtest/gtest.h>

#include <algorithm>

#include "circle_ergodic/ergodic.hpp"

using namespace ce;

namespace {

const WeightSequence& hecke() {
  static const WeightSequence w = hecke_lambda_sq(20000);
  return w;
}

const WeightSequence& cesaro() {
  static const WeightSequence w = generic_table(cesaro_spec(), 20000);
  return w;
}

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    d = std::max({d, std::abs((i + 1) / n - xs[i]), std::abs(xs[i] - i / n)});
  return d;
}

Sequence delta0() { return Sequence{0, {1.0}}; }

}  // namespace

TEST(WeightedAverage, ConstantObservable) {
  const auto sys = DynamicalSystem::rotation(std::sqrt(2.0) - 1.0);
  EXPECT_EQ(weighted_average(sys, hecke(), Observable::character(0), 0.3, 1000), cplx(1.0, 0.0));
  EXPECT_EQ(weighted_average(sys, hecke(), Observable::grid_table({1.0, 1.0, 1.0}), 0.3, 1000), cplx(1.0, 0.0));
  EXPECT_EQ(weighted_average(DynamicalSystem::doubling(), cesaro(), Observable::character(0), 0.3, 500, 7),
            cplx(1.0, 0.0));
}

TEST(WeightedAverage, RotationMatchesExponentialSum) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const double theta = rng.uniform();
    const double x0 = rng.uniform();
    const auto n = static_cast<std::size_t>(rng.integer(1, 20000));
    const cplx avg = weighted_average(DynamicalSystem::rotation(theta), hecke(), Observable::character(1), x0, n);
    const cplx ref = unit(x0) * normalized_T(hecke(), theta, n);
    EXPECT_LT(std::abs(avg - ref), 1e-10) << theta << " " << x0 << " " << n;
  }
}

TEST(WeightedAverage, HigherCharacterOnRotation) {
  // e(3x) along x0 + kθ is e(3x0)·T_n(3θ).
  const double theta = 0.1234567, x0 = 0.77;
  const cplx avg = weighted_average(DynamicalSystem::rotation(theta), cesaro(), Observable::character(3), x0, 5000);
  const cplx ref = unit(3 * x0) * normalized_T(cesaro(), 3 * theta, 5000);
  EXPECT_LT(std::abs(avg - ref), 1e-10);
}

TEST(WeightedAverage, UnboundedObservableRejected) {
  EXPECT_THROW(Observable::grid_table({1.0, std::numeric_limits<double>::infinity()}), DomainError);
  EXPECT_THROW(Observable::grid_table({}), DomainError);
  EXPECT_THROW(Observable::interval(0.5, 0.2), DomainError);
}

TEST(Orbit, DoublingFollowsBinaryShift) {
  const double x0 = 0.6180339887498949;
  Orbit orbit(DynamicalSystem::doubling(), x0, 3);
  double x = x0;
  // x_k shares its first 53 − k digits with the exact doubling of x0; the
  // rest come from the generator.
  for (int k = 1; k <= 40; ++k) {
    x = frac(2 * x);
    EXPECT_LT(std::abs(orbit.next() - x), std::ldexp(1.0, k - 53)) << k;
  }
}

TEST(Orbit, PreservesLebesgueMeasure) {
  Rng rng(5);
  std::vector<double> rot, dbl;
  const auto sys_r = DynamicalSystem::rotation(std::sqrt(2.0) - 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double x0 = rng.uniform();
    Orbit r(sys_r, x0), d(DynamicalSystem::doubling(), x0, static_cast<std::uint64_t>(i));
    double xr = 0, xd = 0;
    for (int k = 0; k < 100; ++k) {
      xr = r.next();
      xd = d.next();
    }
    rot.push_back(xr);
    dbl.push_back(xd);
  }
  EXPECT_LT(ks_uniform(rot), 0.05);
  EXPECT_LT(ks_uniform(dbl), 0.05);
}

TEST(Orbit, ShiftHasNoPointOrbit) {
  EXPECT_THROW(Orbit(DynamicalSystem::integer_shift(), 0.1), DomainError);
}

TEST(Diagnostic, ConstantHasNoOscillation) {
  auto d = convergence_diagnostic(DynamicalSystem::doubling(), cesaro(), Observable::character(0), 0.3, 2.0, 14, 1);
  ASSERT_EQ(d.N.size(), 14u);
  for (double t : d.tail_sup) EXPECT_EQ(t, 0.0);
}

TEST(Diagnostic, DoublingTailsShrink) {
  for (const WeightSequence* w : {&cesaro(), &hecke()}) {
    auto d = convergence_diagnostic(DynamicalSystem::doubling(), *w, Observable::character(1), 0.3, 2.0, 14, 9);
    ASSERT_GE(d.tail_sup.size(), 10u);
    EXPECT_LT(d.tail_sup.back(), 0.5 * d.tail_sup.front()) << w->name();
    for (std::size_t j = 1; j < d.tail_sup.size(); ++j) EXPECT_LE(d.tail_sup[j], d.tail_sup[j - 1]);
  }
}

TEST(Lacunary, Construction) {
  auto s = dyadic_lacunary(1.5, 6);
  EXPECT_EQ(s.J(), 6u);
  EXPECT_EQ(s.Nj.back(), 64u);
  EXPECT_EQ(s.points.front(), 1u);
  for (std::size_t i = 1; i < s.points.size(); ++i) EXPECT_LT(s.points[i - 1], s.points[i]);
  EXPECT_THROW(lacunary(2.0, {1, 3, 5}), DomainError);
  EXPECT_THROW(lacunary(1.0, {1, 2}), DomainError);
  EXPECT_THROW(lacunary(2.0, {4}), DomainError);
}

TEST(Kernel, NormalizedAndNonnegative) {
  for (std::size_t n : {1u, 7u, 1000u, 20000u}) {
    auto k = KernelFamily::weighted(hecke()).at(n);
    KahanSum s;
    for (double c : k.c) {
      EXPECT_GE(c, 0.0);
      s.add(c);
    }
    EXPECT_NEAR(s.value(), 1.0, 1e-12);
    auto c = KernelFamily::cesaro().at(n);
    EXPECT_NEAR(c.level * static_cast<double>(n), 1.0, 1e-12);
  }
}

TEST(Convolve, DeltaGivesWindow) {
  auto out = convolve(KernelFamily::cesaro().at(5), delta0());
  ASSERT_EQ(out.v.size(), 6u);
  for (std::int64_t i = -2; i <= 8; ++i) EXPECT_EQ(out.at(i), (i >= 1 && i <= 5) ? 0.2 : 0.0) << i;
}

TEST(Convolve, RoutesAgree) {
  const auto g = random_sequence(3000, -40, 2);
  const auto k = KernelFamily::weighted(hecke()).at(4000);
  const auto a = detail::convolve_direct(k, g);
  const auto b = detail::convolve_fft(k, g);
  ASSERT_EQ(a.v.size(), b.v.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  EXPECT_LT(m, 1e-12);

  Kernel dense = KernelFamily::cesaro().at(300);
  const double lvl = dense.level;
  dense.flat = false;
  dense.c.assign(301, lvl);
  dense.c[0] = 0.0;
  const auto f = convolve(KernelFamily::cesaro().at(300), g);
  const auto d = detail::convolve_direct(dense, g);
  m = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) m = std::max(m, std::abs(f.v[i] - d.v[i]));
  EXPECT_LT(m, 1e-12);
}

TEST(Convolve, ParsevalBound) {
  const auto g = random_sequence(2000, 0, 3);
  for (std::size_t n : {10u, 500u, 5000u}) {
    EXPECT_LE(convolve(KernelFamily::weighted(hecke()).at(n), g).norm2(), g.norm2() * (1 + 1e-12));
    EXPECT_LE(convolve(KernelFamily::cesaro().at(n), g).norm2(), g.norm2() * (1 + 1e-12));
  }
}

TEST(Convolve, OmegaIsScaledCesaro) {
  const auto lam = hecke_lambda(tau_table(20000));
  const double c_phi = estimate_C_Phi(hecke(), 20000);
  const auto g = random_sequence(1000, 1, 4);
  for (std::uint64_t q : {1u, 2u, 4u, 8u}) {
    const auto D = D_q(q, c_phi, lam).value;
    const auto fam = KernelFamily::omega(hecke(), LogPolynomial{q, 1, {D}});
    for (std::size_t n : {100u, 10000u}) {
      const auto lhs = convolve(fam.at(n), g);
      const auto rhs = convolve(KernelFamily::cesaro().at(n), g);
      const double s = D * static_cast<double>(n) / hecke().prefix[n];
      for (std::size_t i = 0; i < lhs.v.size(); ++i) ASSERT_NEAR(lhs.v[i], s * rhs.v[i], 1e-12);
    }
  }
}

TEST(Convolve, ShiftAverageOrientation) {
  // Σ_k K(k) z_{j+k} = (K ∗ g)(−j) with g(m) = z_{−m}.
  const auto z = random_sequence(400, -100, 6);  // z_m = z.v[m + 100]
  Sequence g;
  g.offset = -299;
  g.v.assign(z.v.rbegin(), z.v.rend());
  const std::size_t n = 150;
  const auto conv = convolve(KernelFamily::weighted(hecke()).at(n), g);
  for (std::int64_t j : {-120, -3, 0, 50, 250}) {
    const double avg = weighted_average_shift(hecke(), z.v, z.offset - j, n);
    EXPECT_NEAR(avg, conv.at(-j), 1e-12) << j;
  }
}

TEST(MaximalCesaro, DeltaByEnumeration) {
  // sup_{n≤N} |κ_n ∗ δ₀|(t) = 1/t for 1 ≤ t ≤ N.
  for (std::size_t N : {1u, 10u, 300u}) {
    double s = 0.0;
    for (std::size_t t = 1; t <= N; ++t) {
      double best = 0.0;
      for (std::size_t n = 1; n <= N; ++n)
        if (t <= n) best = std::max(best, 1.0 / static_cast<double>(n));
      s += best * best;
    }
    EXPECT_NEAR(maximal_cesaro(delta0(), N), std::sqrt(s), 1e-14);
  }
}

TEST(MaximalCesaro, ScalingAndBound) {
  auto g = random_sequence(2000, 1, 8);
  const double r = maximal_cesaro(g, 500);
  EXPECT_LE(r, 10.0);
  EXPECT_GE(r, 1.0);  // n = 1 alone reproduces g shifted
  for (double c : {-3.0, 1e-5, 2e7}) {
    auto h = g;
    for (auto& x : h.v) x *= c;
    EXPECT_NEAR(maximal_cesaro(h, 500), r, 1e-12 * r);
  }
  EXPECT_THROW(maximal_cesaro(g, 0), DomainError);
}

TEST(Oscillation, ZeroInput) {
  Sequence zero{5, std::vector<double>(100, 0.0)};
  auto r = oscillation_sum(zero, KernelFamily::cesaro(), dyadic_lacunary(2.0, 8));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.J, 8u);
}

TEST(Oscillation, TranslationInvariant) {
  auto g = random_sequence(300, 1, 12);
  auto h = g;
  h.offset = -777;
  for (const auto& fam : {KernelFamily::cesaro(), KernelFamily::weighted(hecke())}) {
    auto a = oscillation_sum(g, fam, dyadic_lacunary(1.3, 10));
    auto b = oscillation_sum(h, fam, dyadic_lacunary(1.3, 10));
    EXPECT_NEAR(a.value, b.value, 1e-12 * a.value);
  }
}

TEST(Oscillation, SupOverBlockPoints) {
  // With ρ = 2 every block holds only its endpoints, so term j is
  // ‖(K_{N_{j+1}} − K_{N_j}) ∗ g‖².
  auto g = random_sequence(100, 1, 13);
  auto r = oscillation_sum(g, KernelFamily::cesaro(), dyadic_lacunary(2.0, 6));
  for (std::size_t j = 0; j < 6; ++j) {
    const auto a = convolve(KernelFamily::cesaro().at(std::size_t{1} << j), g);
    const auto b = convolve(KernelFamily::cesaro().at(std::size_t{2} << j), g);
    double s = 0.0;
    for (std::int64_t i = 0; i <= 300; ++i) s += std::pow(b.at(i) - a.at(i), 2);
    EXPECT_NEAR(r.terms[j], s, 1e-12 * s);
  }
}

TEST(Oscillation, CesaroPerBlockDecays) {
  // Blocks beyond the support length contribute less and less.
  auto g = random_sequence(64, 1, 14);
  auto r = oscillation_sum(g, KernelFamily::cesaro(), dyadic_lacunary(2.0, 14));
  double early = 0, late = 0;
  for (std::size_t j = 0; j < 5; ++j) early += r.terms[j];
  for (std::size_t j = 9; j < 14; ++j) late += r.terms[j];
  EXPECT_LT(late, 0.2 * early);
  EXPECT_NEAR(r.per_J, r.value / 14.0, 1e-15);
}
