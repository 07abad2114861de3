#pragma once

// Rational-point amplitudes. For a multiplicative weight α the sum
// Σ_{k≤x} α(k) e(ka/q) has main term x·F_q(log x), where F_q collects, over
// the splits q = q₀q₁ with q₁ squarefree, μ(q₁)/(φ(q₁)q₀) times the residue at
// s = 1 of (x/q₀)^{s−1}/s · Σ_{(m,q₁)=1} α(q₀m) m^{−s}. The density of that
// main term is G_q = F_q + F_q′ (in log x). For λ² everything collapses to the
// constant D_q.

#include <cmath>
#include <vector>

#include "circle_ergodic/core.hpp"
#include "circle_ergodic/laurent.hpp"
#include "circle_ergodic/weights.hpp"

namespace ce {

/// Σ_i c_i (log x)^{d+1−i} with c stored highest power first.
struct LogPolynomial {
  std::uint64_t q = 1;
  int order = 1;  // v for d_v, ϰ for generic weights
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  double at_log(double L) const {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * L + c;
    return acc;
  }
  double operator()(double x) const { return at_log(std::log(x)); }
};

struct SingularCoefficientD {
  std::uint64_t q = 1;
  double value = 0.0;
  double c_phi = 0.0;
};

namespace detail {

// Ascending-coefficient polynomial helpers in L.
using Poly = std::vector<double>;

inline Poly poly_shift(const Poly& p, double h) {  // p(L + h)
  Poly out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double hp = 1.0;
    for (std::size_t j = 0; j <= i; ++j) {  // C(i, j) L^{i−j} h^j
      out[i - j] += p[i] * binomial(static_cast<int>(i), static_cast<int>(j)) * hp;
      hp *= h;
    }
  }
  return out;
}

inline Poly poly_plus_derivative(const Poly& p) {
  Poly out = p;
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] += static_cast<double>(i) * p[i];
  return out;
}

inline LogPolynomial to_log_polynomial(const Poly& p, std::uint64_t q, int order) {
  LogPolynomial lp{q, order, Poly(p.rbegin(), p.rend())};
  return lp;
}

/// Squarefree divisors q₁ of q, each with μ(q₁) and φ(q₁).
struct Split {
  std::uint64_t q0, q1;
  int mu;
  std::uint64_t phi;
};

inline std::vector<Split> squarefree_splits(std::uint64_t q) {
  std::vector<Split> out;
  for (auto d : divisors(q)) {
    const int mu = mobius(d);
    if (mu != 0) out.push_back({q / d, d, mu, totient(d)});
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// λ² amplitudes.

struct LocalSum {
  double value;
  int terms;
};

/// Σ_{j≥0} λ(p^{l+j})² p^{−j}, stopped once the tail bound
/// Σ_{j>J}(l+j+1)² p^{−j} (from |λ(p^m)| ≤ m+1) drops below tol.
inline LocalSum euler_local_sum(std::uint64_t p, int l, double lambda_p, double tol = 1e-12) {
  if (tol <= 0.0) throw DomainError("tolerance must be positive");
  if (p < 2) throw DomainError("p must be prime");
  const double pd = static_cast<double>(p);
  KahanSum acc;
  double lam_prev = lambda_prime_power(lambda_p, std::max(l - 1, 0));
  double lam = lambda_prime_power(lambda_p, l);
  if (l == 0) lam_prev = 0.0;  // λ(p^{−1}) = 0 keeps the recursion valid
  double pj = 1.0;             // p^{−j}
  for (int j = 0;; ++j) {
    acc.add(lam * lam * pj);
    // Tail after term j: next term bound times a geometric factor.
    const double m_next = l + j + 2;  // (l + (j+1) + 1)
    const double next_bound = m_next * m_next * pj / pd;
    const double ratio = ((m_next + 1) / m_next) * ((m_next + 1) / m_next) / pd;
    if (ratio < 1.0 && next_bound / (1.0 - ratio) < tol) return {acc.value(), j + 1};
    if (j > 10000) throw DivergenceError("local sum did not reach tolerance");
    const double lam_next = lambda_p * lam - lam_prev;
    lam_prev = lam;
    lam = lam_next;
    pj /= pd;
  }
}

/// 1/Σ_j λ(p^j)² p^{−j} = ((p−1)/(p+1))(1 − (λ(p)²−2)/p + 1/p²).
inline double hecke_local_inverse(std::uint64_t p, double lambda_p) {
  const double pd = static_cast<double>(p);
  return (pd - 1.0) / (pd + 1.0) * (1.0 - (lambda_p * lambda_p - 2.0) / pd + 1.0 / (pd * pd));
}

/// D_q = Σ_{q₀q₁=q} μ(q₁)/(φ(q₁)q₀) · C_Φ ∏_{p|q} (local inverse)
///       · ∏_{p^l‖q₀, p∤q₁} Σ_j λ(p^{l+j})² p^{−j} · ∏_{p^l‖q₀, p|q₁} λ(p^l)².
/// `lambda` must hold λ(p) for every prime p | q.
inline SingularCoefficientD D_q(std::uint64_t q, double c_phi, const std::vector<double>& lambda,
                                double tol = 1e-12) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (!(c_phi > 0.0)) throw DomainError("C_Phi must be positive");
  const auto fac = factorize(q);
  double common = c_phi;
  for (auto [p, e] : fac) {
    if (p >= lambda.size()) throw RangeError("lambda(p) not tabulated for p | q");
    common *= hecke_local_inverse(p, lambda[p]);
  }
  KahanSum total;
  for (const auto& s : detail::squarefree_splits(q)) {
    double w = common;
    for (auto [p, e] : fac) {
      const int l = valuation(s.q0, p);
      if (l == 0) continue;
      if (s.q1 % p != 0) {
        w *= euler_local_sum(p, l, lambda[p], tol).value;
      } else {
        const double lp = lambda_prime_power(lambda[p], l);
        w *= lp * lp;
      }
    }
    total.add(s.mu * w / (static_cast<double>(s.phi) * static_cast<double>(s.q0)));
  }
  return {q, q == 1 ? c_phi : total.value(), c_phi};
}

/// Σ_{k≤n} w(k)/n, the leading-term estimator of C_Φ; its error decays like
/// n^{−2/5}.
inline double estimate_C_Phi(const WeightSequence& w, std::size_t n) {
  if (n < 1 || n > w.N) throw RangeError("n outside table");
  return w.prefix[n] / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Residue pipeline.

namespace detail {

/// Main-term polynomial F (ascending in log x) given, per split, the Taylor
/// expansion W(s) of the finite Euler correction. `base` is the Laurent
/// expansion of the uncorrected series.
template <class Correction>
Poly residue_main_term(std::uint64_t q, const LaurentSeries& base, int order, Correction correction) {
  Poly total(static_cast<std::size_t>(order), 0.0);
  for (const auto& s : squarefree_splits(q)) {
    const LaurentSeries W = correction(s);
    const LaurentSeries E = base * W;
    Poly r = residue_polynomial(E);
    r.resize(static_cast<std::size_t>(order), 0.0);
    r = poly_shift(r, -std::log(static_cast<double>(s.q0)));
    const double scale = s.mu / (static_cast<double>(s.phi) * static_cast<double>(s.q0));
    for (std::size_t i = 0; i < r.size(); ++i) total[i] += scale * r[i];
  }
  return total;
}

/// Taylor expansion in (s−1) of Σ_j c_j p^{−js} for a polynomial in X = p^{−s}
/// with coefficients c (index j).
inline LaurentSeries poly_in_X(const std::vector<double>& c, std::uint64_t p, int max_index) {
  const double lp = std::log(static_cast<double>(p));
  LaurentSeries acc = LaurentSeries::constant(0.0, max_index);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    acc = acc + exp_linear(c[j] * std::pow(static_cast<double>(p), -static_cast<double>(j)),
                           static_cast<double>(j) * lp, max_index);
  }
  return acc;
}

/// Taylor expansion of Σ_{j≥0} α(p^{l+j}) p^{−js}, truncated by the tail
/// bound Σ_{j>J} (l+j+1)^k p^{−j} (j log p)^t/t! < tol for every t ≤ max_index.
template <class Alpha>
LaurentSeries local_series(Alpha alpha, int k, std::uint64_t p, int l, int max_index, double tol) {
  const double pd = static_cast<double>(p);
  const double lp = std::log(pd);
  std::vector<double> coef(static_cast<std::size_t>(max_index + 1), 0.0);
  std::vector<KahanSum> acc(coef.size());
  for (int j = 0;; ++j) {
    const double bound = std::pow(static_cast<double>(l + j + 1), k);
    const double a = alpha(p, l + j);
    if (!(a >= 0.0) || a > bound * (1.0 + 1e-12))
      throw DivergenceError("local factor exceeds its (l+j+1)^k bound at p = " + std::to_string(p));
    const double pj = std::pow(pd, -static_cast<double>(j));
    double term = a * pj;
    for (int t = 0; t <= max_index; ++t) {
      acc[static_cast<std::size_t>(t)].add(term);
      term *= -static_cast<double>(j) * lp / (t + 1);
    }
    // Tail bound: terms beyond j are dominated by a geometric series once the
    // ratio of consecutive bound terms falls below 1.
    const int jn = j + 1;
    bool tail_ok = true;
    for (int t = 0; t <= max_index && tail_ok; ++t) {
      auto bterm = [&](int jj) {
        double v = std::pow(static_cast<double>(l + jj + 1), k) * std::pow(pd, -static_cast<double>(jj));
        double f = 1.0;
        for (int i = 1; i <= t; ++i) f *= static_cast<double>(jj) * lp / i;
        return v * f;
      };
      const double b0 = bterm(jn), b1 = bterm(jn + 1);
      const double ratio = b0 > 0.0 ? b1 / b0 : 0.0;
      tail_ok = ratio < 0.9 && b0 / (1.0 - ratio) < tol;
    }
    if (tail_ok) break;
    if (j > 5000) throw DivergenceError("local series did not converge");
  }
  for (std::size_t t = 0; t < coef.size(); ++t) coef[t] = acc[t].value();
  return LaurentSeries::taylor(std::move(coef));
}

}  // namespace detail

/// Density polynomial P_{v,q} (coefficients of (log x)^{v−1}, ..., 1) of the
/// main term of Σ_{k≤x} d_v(k) e(ka/q), gcd(a, q) = 1.
inline LogPolynomial piltz_log_polynomial(int v, std::uint64_t q, int series_order = -1);

/// Main term n·F(log n) of Σ_{k≤n} d_v(k) e(ka/q), F returned with the same
/// coefficient convention.
inline LogPolynomial piltz_main_term(int v, std::uint64_t q, int series_order = -1) {
  if (v < 2) throw DomainError("piltz_log_polynomial needs v >= 2");
  if (q < 1) throw DomainError("q must be >= 1");
  if (series_order < 0) series_order = v + 1;
  if (series_order < v) throw TruncationError("internal series order must be >= v");
  // ζ^v known through index ≥ −1 requires ζ through index v−2.
  const LaurentSeries base = zeta_laurent(std::min(10, series_order)).pow(v);
  const auto fac = factorize(q);
  const int T = v - 1;  // Taylor order needed in the correction
  auto correction = [&](const detail::Split& s) {
    LaurentSeries W = LaurentSeries::constant(1.0, T);
    for (auto [p, e] : fac) {
      const int a = valuation(s.q0, p);
      // (1−X)^v ∏ local part, as a polynomial in X = p^{−s}.
      std::vector<double> poly;
      if (s.q1 % p == 0) {
        poly.assign(static_cast<std::size_t>(v + 1), 0.0);
        for (int m = 0; m <= v; ++m)
          poly[static_cast<std::size_t>(m)] = ((m % 2) ? -1.0 : 1.0) * binomial(v, m) * piltz_prime_power(v, a);
      } else {
        // (1−X)^v Σ_j C(a+j+v−1, v−1) X^j = X^{−a}(1 − (1−X)^v Σ_{m<a} C(m+v−1, v−1) X^m).
        std::vector<double> inner(static_cast<std::size_t>(a + v + 1), 0.0);
        for (int m = 0; m < a; ++m)
          for (int i = 0; i <= v; ++i)
            inner[static_cast<std::size_t>(m + i)] +=
                piltz_prime_power(v, m) * ((i % 2) ? -1.0 : 1.0) * binomial(v, i);
        inner[0] = 1.0 - inner[0];
        for (std::size_t i = 1; i < inner.size(); ++i) inner[i] = -inner[i];
        // Division by X^a: the low coefficients vanish identically.
        poly.assign(inner.begin() + a, inner.end());
      }
      W = W * detail::poly_in_X(poly, p, T);
    }
    return W;
  };
  const auto F = detail::residue_main_term(q, base, v, correction);
  return detail::to_log_polynomial(F, q, v);
}

inline LogPolynomial piltz_log_polynomial(int v, std::uint64_t q, int series_order) {
  auto F = piltz_main_term(v, q, series_order);
  detail::Poly asc(F.coeffs.rbegin(), F.coeffs.rend());
  return detail::to_log_polynomial(detail::poly_plus_derivative(asc), q, v);
}

struct GenericAmplitudes {
  LogPolynomial F;  // main term n·F(log n)
  LogPolynomial G;  // density, d/dx (x F(log x))
};

/// F_q and G_q for a generic multiplicative weight, driven by the supplied
/// Laurent data of 𝒜(s) and the Euler corrections at p | q.
inline GenericAmplitudes generic_log_polynomials(const MultiplicativeWeightSpec& spec, std::uint64_t q,
                                                 double tol = 1e-12) {
  spec.validate();
  if (q < 1) throw DomainError("q must be >= 1");
  const int kappa = spec.pole_order;
  const int T = kappa - 1;
  const auto fac = factorize(q);
  auto alpha = [&](std::uint64_t p, int l) { return l == 0 ? 1.0 : spec.local_factor(p, l); };
  auto correction = [&](const detail::Split& s) {
    LaurentSeries W = LaurentSeries::constant(1.0, T);
    for (auto [p, e] : fac) {
      const int a = valuation(s.q0, p);
      const LaurentSeries full = detail::local_series(alpha, spec.divisor_exponent, p, 0, T, tol);
      W = W * full.inverse();
      if (s.q1 % p == 0) {
        W = W.scaled(alpha(p, a));
      } else {
        W = W * detail::local_series(alpha, spec.divisor_exponent, p, a, T, tol);
      }
    }
    return W;
  };
  const auto F = detail::residue_main_term(q, spec.laurent_data, kappa, correction);
  return {detail::to_log_polynomial(F, q, kappa),
          detail::to_log_polynomial(detail::poly_plus_derivative(F), q, kappa)};
}

}  // namespace ce
