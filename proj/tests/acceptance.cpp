// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
//
//   acceptance [--only 1,4,13]

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>

#include "circle_ergodic/circle_ergodic.hpp"

using namespace ce;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared workspaces, built on first use. The λ² table reaches 2^20 so the
// J = 20 dyadic oscillation sums fit.
constexpr std::size_t kHeckeMax = std::size_t{1} << 20;

const Workspace& hecke_ws() {
  static const Workspace ws = make_workspace("hecke2", kHeckeMax);
  return ws;
}
const Workspace& piltz2_ws() {
  static const Workspace ws = make_workspace("piltz2", 1'000'000);
  return ws;
}
const Workspace& cesaro_ws() {
  static const Workspace ws = make_workspace("cesaro", kHeckeMax);
  return ws;
}

const std::vector<std::size_t> kArcGrid = {10'000, 100'000, 1'000'000};

std::string failing_checks(const std::vector<VerificationReport>& reports) {
  std::string out;
  for (const auto& r : reports)
    for (const auto& c : r.checks)
      if (!c.pass) out += fmt(" [%s/%s %s h=%.3g]", r.test_id.c_str(), r.kind.c_str(), c.statistic.c_str(), c.headroom);
  return out;
}

// 1 -------------------------------------------------------------------------

i128 sigma11_mod(std::size_t n, i128 m) {
  i128 s = 0;
  for (std::uint64_t d : divisors(n)) {
    i128 p = 1;
    for (int i = 0; i < 11; ++i) p = p * static_cast<i128>(d) % m;
    s = (s + p) % m;
  }
  return s;
}

Outcome criterion_tau() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t N = 10'000;
  const TauTable t = tau_table(N);
  std::size_t bad = 0, checks = 0;
  for (std::size_t m = 2; m <= N; ++m)
    for (std::size_t n = m + 1; m * n <= N; ++n)
      if (std::gcd(m, n) == 1) {
        ++checks;
        bad += t(m * n) != t(m) * t(n);
      }
  for (std::uint32_t p : primes_up_to(N)) {
    const i128 p11 = [&] {
      i128 r = 1;
      for (int i = 0; i < 11; ++i) r *= p;
      return r;
    }();
    i128 prev = 1;
    std::size_t pk = p;
    while (pk <= N / p) {
      ++checks;
      bad += t(pk * p) != t(p) * t(pk) - p11 * prev;
      prev = t(pk);
      pk *= p;
    }
  }
  for (std::size_t n = 1; n <= N; ++n) {
    ++checks;
    const i128 r = ((t(n) - sigma11_mod(n, 691)) % 691 + 691) % 691;
    bad += r != 0;
  }
  // Independent oracle: expand q∏_{k≤6}(1 − q^k)^24 with plain integer
  // polynomial products.
  std::vector<std::int64_t> series(7, 0);
  series[0] = 1;
  for (int k = 1; k <= 6; ++k)
    for (int rep = 0; rep < 24; ++rep)
      for (int i = 6; i >= k; --i) series[i] -= series[i - k];
  for (std::size_t n = 1; n <= 6; ++n) {
    ++checks;
    bad += t(n) != series[n - 1];
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 && secs < 60.0,
          fmt("%zu identities (multiplicativity, Hecke recursion, mod 691, series n<=6), %zu failures, %.2f s < 60 s",
              checks, bad, secs)};
}

// 2 -------------------------------------------------------------------------

Outcome criterion_deligne() {
  const auto lam = hecke_lambda(tau_table(100'000));
  double worst = 0.0;
  std::size_t count = 0;
  for (std::uint32_t p : primes_up_to(100'000)) {
    worst = std::max(worst, lam[p] * lam[p]);
    ++count;
  }
  return {worst <= 4.0 + 1e-9, fmt("max lambda(p)^2 = %.12f over %zu primes p <= 1e5 (bound 4 + 1e-9)", worst, count)};
}

// 3 -------------------------------------------------------------------------

Outcome criterion_leading_terms() {
  const auto r = verify_kernel_asymptotics(hecke_ws(), {100'000, 1'000'000});
  const auto c = r.series("c_phi");
  const auto res = r.series("residual_fourth");
  const double rel = std::abs(c[1] / c[0] - 1.0);
  const bool ok = rel <= 0.02 && res[1] < res[0];
  return {ok, fmt("C_Phi fit %.6f (1e5) vs %.6f (1e6), rel diff %.2e <= 0.02; sum lambda^4 residual/(n log n) %.3e -> %.3e",
                  c[0], c[1], rel, res[0], res[1])};
}

// 4 -------------------------------------------------------------------------

Outcome criterion_rational_point() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_rational_point(hecke_ws(), 20, {100'000, 300'000, 1'000'000});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double d1 = std::abs(r.param("D1_minus_C_Phi"));
  const auto med = r.series("median_scaled_error");
  const bool ok = r.pass && d1 <= 1e-12 && secs < 600.0;
  return {ok, fmt("median |Lambda_n(a/q) - D_q n|/n^0.8 = %.4g, %.4g, %.4g (10%% slack); |D_1 - C_Phi| = %.1e; %.1f s%s",
                  med[0], med[1], med[2], d1, secs, failing_checks({r}).c_str())};
}

// 5 -------------------------------------------------------------------------

// Residue-pipeline main terms against a least-squares fit of the real part of
// Σ_{k≤m} d_v(k)e(ka/q) / m in powers of log m, m on 3000 geometric points
// of [2·10⁵, 2·10⁷]. The deviation is measured against the largest
// coefficient of the pipeline polynomial.
Outcome criterion_residues() {
  const auto P = piltz_log_polynomial(2, 1).coeffs;
  const double closed = 2.0 * std::numbers::egamma;
  const double dev0 = std::max(std::abs(P[0] - 1.0), std::abs(P[1] - closed));
  bool ok = P.size() == 2 && dev0 <= 1e-8;

  constexpr std::size_t lo = 200'000, hi = 20'000'000;
  const auto ms = geometric_grid(lo, hi, 3000);
  std::string detail = fmt("P_{2,1} dev %.1e;", dev0);
  for (int v : {2, 3}) {
    const WeightSequence w = piltz_table(v, hi);
    double worst = 0.0, worst_coef = 0.0;
    std::uint64_t wq = 0;
    for (std::uint64_t q = 1; q <= 20; ++q) {
      const auto F = piltz_main_term(v, q).coeffs;
      double scale = 0.0;
      for (double c : F) scale = std::max(scale, std::abs(c));
      const auto cls = detail::residue_class_sums(w, q, ms);
      for (std::uint64_t a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        std::vector<std::pair<double, double>> samples;
        for (std::size_t i = 0; i < ms.size(); ++i) {
          ComplexKahanSum s;
          for (std::uint64_t r = 0; r < q; ++r)
            s.add(cls[i][r] * unit(static_cast<double>(r * a % q) / static_cast<double>(q)));
          samples.push_back({static_cast<double>(ms[i]), s.value().real() / static_cast<double>(ms[i])});
        }
        const LogFit fit = fit_log_polynomial(samples, v - 1);
        for (std::size_t j = 0; j < F.size(); ++j) {
          const double d = std::abs(fit.coeffs[j] - F[j]);
          if (d / scale > worst) {
            worst = d / scale;
            wq = q;
          }
          worst_coef = std::max(worst_coef, d / std::abs(F[j]));
        }
      }
    }
    ok = ok && worst <= 0.05;
    detail += fmt(" v=%d max dev %.2f%% of leading scale (q=%lu), per-coefficient max %.1f%%;", v, 100 * worst,
                  static_cast<unsigned long>(wq), 100 * worst_coef);
  }
  return {ok, detail};
}

// 6, 7 ----------------------------------------------------------------------

Outcome criterion_character_identity() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::uint64_t q1 = 1; q1 <= 30; ++q1) {
    const auto chars = dirichlet_characters(q1);
    std::vector<cplx> g;
    for (const auto& c : chars) g.push_back(gauss_sum(c));
    for (std::uint64_t a = 1; a <= q1; ++a) {
      if (std::gcd(a, q1) != 1) continue;
      for (std::uint64_t m1 = 0; m1 < q1; ++m1) {
        worst = std::max(worst, character_identity_check(a, m1, chars, g));
        ++cases;
      }
    }
  }
  return {worst <= 1e-10, fmt("%zu cases (all q1 <= 30, a coprime, m1 mod q1), max error %.2e", cases, worst)};
}

Outcome criterion_gauss_sums() {
  double principal = 0.0, excess = -1e300;
  std::size_t count = 0;
  for (std::uint64_t q = 1; q <= 30; ++q)
    for (const auto& c : dirichlet_characters(q)) {
      const cplx g = gauss_sum(c);
      ++count;
      if (c.principal)
        principal = std::max(principal, std::abs(g - static_cast<double>(mobius(q))));
      else
        excess = std::max(excess, std::abs(g) - std::sqrt(static_cast<double>(q)));
    }
  return {principal <= 1e-9 && excess <= 1e-9,
          fmt("%zu characters; principal |tau - mu(q)| <= %.1e; max |tau| - sqrt(q) = %.2e", count, principal, excess)};
}

// 8 -------------------------------------------------------------------------

Outcome criterion_grid_vs_direct() {
  constexpr std::size_t n = 10'000, M = 1 << 12;
  double worst = 0.0;
  for (const WeightSequence& w : {hecke_lambda_sq(n), piltz_table(2, n), piltz_table(3, n)}) {
    const auto g = exp_sum_grid(w, n, M);
    std::vector<double> dev(M), mag(M);
    parallel_for(M, [&](std::size_t j) {
      const cplx d = exp_sum(w, static_cast<double>(j) / static_cast<double>(M), n);
      dev[j] = std::abs(d - g[j]);
      mag[j] = std::abs(d);
    });
    worst = std::max(worst, *std::max_element(dev.begin(), dev.end()) / *std::max_element(mag.begin(), mag.end()));
  }
  return {worst <= 1e-8, fmt("max |grid - direct| / max |S_n| = %.2e over lambda^2, d_2, d_3 (n = 1e4, M = 4096)", worst)};
}

// 9, 10 ---------------------------------------------------------------------

Outcome arc_suite(Suite s) {
  SuiteOptions o;
  o.sample_size = 1000;
  o.grid_M = 4096;
  std::vector<VerificationReport> all;
  std::string detail;
  for (const Workspace* ws : {&hecke_ws(), &piltz2_ws()}) {
    const auto reps = verify_suites({s}, *ws, cesaro_ws(), kArcGrid, o);
    const auto st = reps[1].series("statistic");
    detail += fmt("%s %.3g, %.3g, %.3g; ", ws->kind.c_str(), st[0], st[1], st[2]);
    all.insert(all.end(), reps.begin(), reps.end());
  }
  bool ok = true;
  for (const auto& r : all) ok = ok && r.pass;
  return {ok, detail + "non-increasing with 10% slack, Cesaro gates passed" + failing_checks(all)};
}

// 11 ------------------------------------------------------------------------

Outcome criterion_rotation() {
  const WeightSequence& w = hecke_ws().w;
  Rng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double theta = rng.uniform(), x0 = rng.uniform();
    const auto n = static_cast<std::size_t>(rng.integer(1, 100'000));
    const cplx avg = weighted_average(DynamicalSystem::rotation(theta), w, Observable::character(1), x0, n);
    worst = std::max(worst, std::abs(avg - unit(x0) * normalized_T(w, theta, n)));
  }
  return {worst <= 1e-10, fmt("100 random (theta, x0, n <= 1e5) with lambda^2 weights, max |avg - e(x0)T_n| = %.2e", worst)};
}

// 12 ------------------------------------------------------------------------

Outcome criterion_kernels() {
  const Workspace& ws = hecke_ws();
  const Sequence g0 = random_sequence(2000, 1, 12);
  double worst = 0.0;
  for (std::uint64_t q : {1u, 2u, 3u, 4u, 8u}) {
    const auto fam = KernelFamily::omega(ws.w, ws.main_term(q));
    for (std::size_t n : {10u, 1000u, 100'000u}) {
      const auto lhs = convolve(fam.at(n), g0);
      const auto rhs = convolve(KernelFamily::cesaro().at(n), g0);
      const double s = ws.main_term(q).coeffs.back() * static_cast<double>(n) / ws.w.prefix[n];
      for (std::size_t i = 0; i < lhs.v.size(); ++i) worst = std::max(worst, std::abs(lhs.v[i] - s * rhs.v[i]));
    }
  }
  double ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    ratio = std::max(ratio, maximal_cesaro(random_sequence(10'000, 1, seed), 10'000));
  return {worst <= 1e-12 && ratio <= 10.0,
          fmt("omega = (D_q n/Lambda_n) kappa_n to %.1e (q in 1,2,3,4,8); max Cesaro maximal ratio %.4f over 100 g on "
              "[1, 1e4], n <= 1e4",
              worst, ratio)};
}

// 13 ------------------------------------------------------------------------

// The ω statistic is held to the same constant 10 as the maximal ratio; the
// constant is fixed here, not fitted to the measured values.
constexpr double kOmegaConstant = 10.0;

Outcome criterion_oscillation() {
  const Workspace& ws = hecke_ws();
  const auto lac5 = dyadic_lacunary(2.0, 5), lac20 = dyadic_lacunary(2.0, 20);
  constexpr std::size_t support = 1024;
  int dec_w = 0, dec_c = 0;
  double omega_max = 0.0, omega_min = 1e300;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Sequence g = random_sequence(support, 1, seed);
    const auto W = KernelFamily::weighted(ws.w), C = KernelFamily::cesaro();
    dec_w += oscillation_sum(g, W, lac20).per_J < oscillation_sum(g, W, lac5).per_J;
    dec_c += oscillation_sum(g, C, lac20).per_J < oscillation_sum(g, C, lac5).per_J;
    const double n2 = g.norm2() * g.norm2();
    for (std::uint64_t q : {1u, 2u, 4u, 8u}) {
      const double v = oscillation_sum(g, KernelFamily::omega(ws.w, ws.main_term(q)), lac20).value;
      const double stat = v * std::pow(static_cast<double>(q) + 1.0, 0.9) / n2;
      omega_max = std::max(omega_max, stat);
      omega_min = std::min(omega_min, stat);
    }
  }
  const bool ok = dec_w >= 9 && dec_c >= 9 && omega_max <= kOmegaConstant;
  return {ok, fmt("value/J(20) < value/J(5): lambda^2 %d/10, Cesaro %d/10 seeds; omega value (q+1)^0.9/|g|^2 in "
                  "[%.2e, %.3f] <= %.0f for q in 1,2,4,8",
                  dec_w, dec_c, omega_min, omega_max, kOmegaConstant)};
}

// 14 ------------------------------------------------------------------------

Outcome criterion_determinism() {
  const std::vector<std::size_t> grid = {10'000, 100'000};
  const Workspace h = make_workspace("hecke2", 100'000), p = make_workspace("piltz2", 100'000),
                  p3 = make_workspace("piltz3", 100'000), c = make_workspace("cesaro", 100'000);
  const auto suites = parse_suites("all");
  SuiteOptions o;
  o.seed = 99;
  auto dump = [&] {
    std::string s;
    for (const Workspace* ws : {&h, &p, &p3, &c}) s += suites_to_json(verify_suites(suites, *ws, c, grid, o)).dump();
    const Sequence g = random_sequence(500, 1, o.seed);
    const auto r = oscillation_sum(g, KernelFamily::weighted(h.w), dyadic_lacunary(2.0, 12));
    for (double t : r.terms) s += fmt("%a,", t);
    return s;
  };
  const unsigned before = threads();
  set_threads(1);
  const std::string a = dump();
  set_threads(4);
  const std::string b = dump();
  set_threads(before);
  const std::string c2 = dump();
  const bool ok = a == b && a == c2;
  return {ok, fmt("all five suites for hecke2, piltz2, piltz3, cesaro plus an oscillation report: %zu bytes, identical "
                  "across 3 reruns (1, 4, %u threads)",
                  a.size(), before)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"tau table", criterion_tau},
      {"Deligne bound", criterion_deligne},
      {"leading terms", criterion_leading_terms},
      {"rational points", criterion_rational_point},
      {"residues", criterion_residues},
      {"character identity", criterion_character_identity},
      {"Gauss sums", criterion_gauss_sums},
      {"grid vs direct", criterion_grid_vs_direct},
      {"minor arcs", [] { return arc_suite(Suite::Minor); }},
      {"phi_n approximation", [] { return arc_suite(Suite::Phi); }},
      {"rotation identity", criterion_rotation},
      {"kernel calculus", criterion_kernels},
      {"oscillation sums", criterion_oscillation},
      {"determinism", criterion_determinism},
  };
  const std::set<int> wanted(only.begin(), only.end());
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %2d %-20s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
