#pragma once

// Major and minor arcs: P = (log n)^{3(1−ε)}, Q = n/(log n)^{2(1−ε)}, the
// classification of points, rational approximation, the smooth bump η, and
// the approximants ψ_{n,q} and φ_n built from rational-point amplitudes.

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "circle_ergodic/core.hpp"
#include "circle_ergodic/expsum.hpp"
#include "circle_ergodic/singular.hpp"

namespace ce {

struct ArcParams {
  std::size_t n = 0;
  double eps = 0.1;
  double M = 1.0;
  double P = 0.0;
  double Q = 0.0;
  double n0 = 0.0;         // 1/Q ≤ 1/(8MP²) for all n ≥ n0
  double n0_disjoint = 0.0;  // P² < Q for all n ≥ n0_disjoint
};

namespace detail {
// Largest n beyond which n/(log n)^{2(1−ε)} ≥ c·(log n)^{6(1−ε)}, i.e.
// L − 8(1−ε) log L − log c ≥ 0 with L = log n.
inline double arc_threshold(double eps, double c) {
  const double k = 8.0 * (1.0 - eps);
  auto g = [&](double L) { return L - k * std::log(L) - std::log(c); };
  double lo = std::max(k, std::log(3.0));  // g increases for L > k
  if (g(lo) >= 0.0) {
    // g may still dip below zero before k when c is small; scan down.
    double L = lo;
    while (L > std::log(3.0) && g(L) >= 0.0) L -= 1e-3;
    return std::exp(std::max(L, std::log(3.0)));
  }
  double hi = lo * 2.0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}
}  // namespace detail

inline ArcParams arc_params(std::size_t n, double eps = 0.1, double M = 1.0) {
  if (n < 3) throw DomainError("arc_params needs n >= 3");
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("eps must lie in (0, 1/2), got " + std::to_string(eps));
  if (!(M >= 1.0)) throw DomainError("bump constant M must be >= 1");
  const double L = std::log(static_cast<double>(n));
  ArcParams a;
  a.n = n;
  a.eps = eps;
  a.M = M;
  a.P = std::pow(L, 3.0 * (1.0 - eps));
  a.Q = static_cast<double>(n) / std::pow(L, 2.0 * (1.0 - eps));
  a.n0 = detail::arc_threshold(eps, 8.0 * M);
  a.n0_disjoint = detail::arc_threshold(eps, 1.0);
  return a;
}

struct Rational {
  std::uint64_t a = 0;
  std::uint64_t q = 1;
  bool operator==(const Rational&) const = default;
};

/// Major{a, q} when some 0 ≤ a ≤ q ≤ P has |x − a/q| ≤ 1/Q (smallest such q,
/// which is automatically reduced), otherwise Minor (nullopt).
inline std::optional<Rational> classify(double x, const ArcParams& p) {
  const auto qmax = static_cast<std::uint64_t>(std::floor(p.P));
  const double tol = 1.0 / p.Q;
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    const double qx = static_cast<double>(q) * x;
    const double a = std::nearbyint(qx);
    if (a < 0.0 || a > static_cast<double>(q)) continue;
    if (std::abs(qx - a) <= tol * static_cast<double>(q)) {
      const auto ai = static_cast<std::uint64_t>(a);
      const auto g = std::gcd(ai, q);
      return Rational{ai / g, q / g};
    }
  }
  return std::nullopt;
}

namespace detail {

// Continued-fraction convergents of a double (an exact dyadic rational).
struct Convergents {
  std::vector<std::uint64_t> p, q;       // convergents with q ≤ bound
  std::vector<std::uint64_t> partials;   // partial quotients a_0, a_1, ...
  bool exhausted = false;                // x equals the last convergent
};

inline Convergents convergents(double x, std::uint64_t q_bound) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("x must lie in [0, 1)");
  Convergents c;
  int e = 0;
  const double f = std::frexp(x, &e);  // x = f·2^e, f ∈ [0.5, 1)
  if (x == 0.0 || 53 - e > 120) {
    c.p = {0};
    c.q = {1};
    c.partials = {0};
    c.exhausted = x == 0.0;
    return c;
  }
  u128 num = static_cast<u128>(std::ldexp(f, 53));
  u128 den = static_cast<u128>(1) << (53 - e);
  // h_{-1} = 1, h_{-2} = 0; k_{-1} = 0, k_{-2} = 1.
  u128 h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  while (den != 0) {
    const u128 a = num / den;
    const u128 r = num % den;
    const u128 h = a * h1 + h2, k = a * k1 + k2;
    if (k > q_bound) {
      c.partials.push_back(static_cast<std::uint64_t>(std::min<u128>(a, UINT64_MAX)));
      return c;
    }
    c.partials.push_back(static_cast<std::uint64_t>(a));
    c.p.push_back(static_cast<std::uint64_t>(h));
    c.q.push_back(static_cast<std::uint64_t>(k));
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    num = den;
    den = r;
  }
  c.exhausted = true;
  return c;
}

inline double rational_distance(double x, std::uint64_t a, std::uint64_t q) {
  return std::abs(static_cast<double>(q) * x - static_cast<double>(a)) / static_cast<double>(q);
}

}  // namespace detail

/// Best approximation of the first kind: minimizes |x − a/q| over q ≤ q_max,
/// ties to the smaller q. The minimizer is a convergent or a semiconvergent.
inline Rational best_rational(double x, std::uint64_t q_max) {
  if (q_max < 1) throw DomainError("q_max must be >= 1");
  x = frac(x);
  const auto c = detail::convergents(x, q_max);
  Rational best{c.p.back(), c.q.back()};
  if (c.exhausted) return best;
  // Semiconvergents between the last two convergents: (p_{k−1} + t p_k)/(q_{k−1} + t q_k).
  const std::uint64_t pk = c.p.back(), qk = c.q.back();
  const std::uint64_t pk1 = c.p.size() >= 2 ? c.p[c.p.size() - 2] : 1;
  const std::uint64_t qk1 = c.q.size() >= 2 ? c.q[c.q.size() - 2] : 0;
  if (qk > 0 && q_max >= qk1) {
    const std::uint64_t t = (q_max - qk1) / qk;
    if (t >= 1) {
      Rational semi{pk1 + t * pk, qk1 + t * qk};
      const double ds = detail::rational_distance(x, semi.a, semi.q);
      const double db = detail::rational_distance(x, best.a, best.q);
      if (ds < db) best = semi;
    }
  }
  return best;
}

/// The last continued-fraction convergent with denominator ≤ q_max. It
/// satisfies Dirichlet's bound |x − a/q| ≤ 1/(q·(q_max + 1)), which the
/// best approximation of the first kind may violate.
inline Rational dirichlet_approximation(double x, std::uint64_t q_max) {
  if (q_max < 1) throw DomainError("q_max must be >= 1");
  const auto c = detail::convergents(frac(x), q_max);
  return {c.p.back(), c.q.back()};
}

// ---------------------------------------------------------------------------
// Bump function.

/// η = 1 on [−1/4, 1/4], 0 outside (−1/2, 1/2), smooth transition
/// h(t) = g(t)/(g(t) + g(1−t)), g(t) = e^{−1/t}, t = 4(1/2 − |x|).
inline double eta(double x) {
  const double ax = std::abs(x);
  if (ax >= 0.5) return 0.0;
  if (ax <= 0.25) return 1.0;
  const double t = 4.0 * (0.5 - ax);
  const double gt = std::exp(-1.0 / t);
  const double g1 = std::exp(-1.0 / (1.0 - t));
  return gt / (gt + g1);
}

inline double eta_s(double x, int s, double M) { return eta(std::ldexp(M * x, 2 * s)); }

// ---------------------------------------------------------------------------
// Approximants.

/// Amplitudes at scale n: amp[q] is D_q (λ²), P_{v,q}(n) (d_v) or G_q(n)
/// (generic), and normalizer is S_n(0).
struct Approximant {
  std::size_t n = 0;
  double normalizer = 1.0;
  std::vector<double> amp;  // index q ≥ 1

  double amplitude(std::uint64_t q) const {
    if (q < 1 || q >= amp.size()) throw RangeError("amplitude for q = " + std::to_string(q) + " not tabulated");
    return amp[q];
  }
};

/// Amplitude polynomials for q = 1..q_limit; evaluating them at log n gives
/// the amplitudes at any scale.
struct AmplitudeTable {
  std::vector<LogPolynomial> poly;  // index q, poly[0] unused

  Approximant at(const WeightSequence& w, std::size_t n) const {
    detail::check_length(w, n);
    Approximant ap;
    ap.n = n;
    ap.normalizer = w.prefix[n];
    ap.amp.assign(poly.size(), 0.0);
    const double L = std::log(static_cast<double>(n));
    for (std::size_t q = 1; q < poly.size(); ++q) ap.amp[q] = poly[q].at_log(L);
    return ap;
  }
  std::uint64_t q_limit() const { return poly.empty() ? 0 : poly.size() - 1; }
};

inline AmplitudeTable hecke_amplitudes(std::uint64_t q_limit, double c_phi, const std::vector<double>& lambda) {
  AmplitudeTable t;
  t.poly.resize(q_limit + 1);
  parallel_for(q_limit, [&](std::size_t i) {
    const std::uint64_t q = i + 1;
    t.poly[q] = LogPolynomial{q, 1, {D_q(q, c_phi, lambda).value}};
  });
  return t;
}

inline AmplitudeTable piltz_amplitudes(int v, std::uint64_t q_limit) {
  AmplitudeTable t;
  t.poly.resize(q_limit + 1);
  parallel_for(q_limit, [&](std::size_t i) { t.poly[i + 1] = piltz_log_polynomial(v, i + 1); });
  return t;
}

inline AmplitudeTable generic_amplitudes(const MultiplicativeWeightSpec& spec, std::uint64_t q_limit) {
  AmplitudeTable t;
  t.poly.resize(q_limit + 1);
  parallel_for(q_limit, [&](std::size_t i) { t.poly[i + 1] = generic_log_polynomials(spec, i + 1).G; });
  return t;
}

/// ψ_{n,q}(β) = (amp_q / S_n(0)) Σ_{m≤n} e(mβ).
inline cplx psi(const Approximant& ap, std::uint64_t q, double beta) {
  return ap.amplitude(q) / ap.normalizer * geometric_kernel(ap.n, beta);
}

/// Default truncation of the dyadic s-sum: ⌈log₂ P⌉ + 2.
inline int default_s_max(const ArcParams& p) { return static_cast<int>(std::ceil(std::log2(p.P))) + 2; }

/// Largest q the φ_n sum touches for a given s_max.
inline std::uint64_t phi_q_limit(int s_max) { return (std::uint64_t{1} << s_max) - 1; }

/// φ_n(x) = ψ_{n,0}(x)η(Mx) + Σ_{s=1}^{s_max} Σ_{2^{s−1}≤q<2^s} Σ_{(a,q)=1}
/// ψ_{n,q}(x − a/q)η_s(x − a/q). Only the nearest a for each q can lie in
/// the support of η_s, so one candidate per q is examined. ψ_{n,0} uses the
/// q = 1 amplitude centred at 0.
inline cplx phi(double x, const ArcParams& p, const Approximant& ap, int s_max = -1) {
  if (s_max < 0) s_max = default_s_max(p);
  if (phi_q_limit(s_max) >= ap.amp.size()) throw RangeError("amplitude table too short for s_max");
  ComplexKahanSum acc;
  const double e0 = eta(p.M * x);
  if (e0 != 0.0) acc.add(psi(ap, 1, x) * e0);
  for (int s = 1; s <= s_max; ++s) {
    const double support = 0.5 / (std::ldexp(1.0, 2 * s) * p.M);
    for (std::uint64_t q = std::uint64_t{1} << (s - 1); q < (std::uint64_t{1} << s); ++q) {
      const double qx = static_cast<double>(q) * x;
      const double a = std::nearbyint(qx);
      if (a < 1.0 || a > static_cast<double>(q)) continue;
      const double beta = (qx - a) / static_cast<double>(q);
      if (std::abs(beta) >= support) continue;
      if (std::gcd(static_cast<std::uint64_t>(a), q) != 1) continue;
      const double e = eta_s(beta, s, p.M);
      if (e != 0.0) acc.add(psi(ap, q, beta) * e);
    }
  }
  return acc.value();
}

}  // namespace ce
