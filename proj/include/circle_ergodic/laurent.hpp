#pragma once

// Truncated Laurent expansions around s = 1, the Stieltjes constants and the
// expansion of ζ(s) built from them. Residues of Dirichlet series twisted by
// y^s/s are read off through residue_polynomial().

#include <algorithm>
#include <cmath>
#include <vector>

#include "circle_ergodic/core.hpp"

namespace ce {

/// Σ_{i=min_index}^{max_index} c_i (s−1)^i. Coefficients above max_index are
/// unknown (truncated), below min_index they are zero.
class LaurentSeries {
 public:
  LaurentSeries() = default;
  LaurentSeries(int min_index, std::vector<double> coeffs)
      : min_index_(min_index), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw DomainError("LaurentSeries needs at least one coefficient");
  }

  static LaurentSeries taylor(std::vector<double> coeffs) { return {0, std::move(coeffs)}; }
  static LaurentSeries constant(double c, int max_index) {
    std::vector<double> v(static_cast<std::size_t>(max_index + 1), 0.0);
    v[0] = c;
    return taylor(std::move(v));
  }

  int min_index() const { return min_index_; }
  int max_index() const { return min_index_ + static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double operator[](int i) const {
    if (i < min_index_) return 0.0;
    if (i > max_index()) throw TruncationError("Laurent coefficient beyond truncation order");
    return coeffs_[static_cast<std::size_t>(i - min_index_)];
  }

  double residue() const { return (*this)[-1]; }

  /// Order of the pole at s = 1 (0 when the series is holomorphic there).
  int pole_order() const {
    for (int i = min_index_; i <= std::min(-1, max_index()); ++i)
      if ((*this)[i] != 0.0) return -i;
    return 0;
  }

  LaurentSeries truncated(int max_index) const {
    if (max_index > this->max_index()) throw TruncationError("cannot extend a truncated series");
    std::vector<double> v(coeffs_.begin(), coeffs_.begin() + (max_index - min_index_ + 1));
    return {min_index_, std::move(v)};
  }

  LaurentSeries scaled(double c) const {
    auto v = coeffs_;
    for (auto& x : v) x *= c;
    return {min_index_, std::move(v)};
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    const int lo = std::min(a.min_index_, b.min_index_);
    const int hi = std::min(a.max_index(), b.max_index());
    std::vector<double> v(static_cast<std::size_t>(std::max(hi - lo + 1, 1)), 0.0);
    for (int i = lo; i <= hi; ++i) v[static_cast<std::size_t>(i - lo)] = a[i] + b[i];
    return {lo, std::move(v)};
  }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    const int lo = a.min_index_ + b.min_index_;
    const int hi = std::min(a.max_index() + b.min_index_, b.max_index() + a.min_index_);
    if (hi < lo) throw TruncationError("product has no known coefficients");
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (int i = a.min_index_; i <= a.max_index(); ++i)
      for (int j = b.min_index_; j <= b.max_index() && i + j <= hi; ++j)
        v[static_cast<std::size_t>(i + j - lo)] += a[i] * b[j];
    return {lo, std::move(v)};
  }

  LaurentSeries pow(int e) const {
    if (e < 0) throw DomainError("negative Laurent power");
    LaurentSeries r = constant(1.0, max_index() - min_index_);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  /// Reciprocal of a power series with nonzero constant term.
  LaurentSeries inverse() const {
    if (min_index_ != 0 || coeffs_[0] == 0.0)
      throw DomainError("inverse needs a power series with nonzero constant term");
    const std::size_t n = coeffs_.size();
    std::vector<double> r(n, 0.0);
    r[0] = 1.0 / coeffs_[0];
    for (std::size_t k = 1; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= k; ++j) acc += coeffs_[j] * r[k - j];
      r[k] = -acc / coeffs_[0];
    }
    return taylor(std::move(r));
  }

 private:
  int min_index_ = 0;
  std::vector<double> coeffs_{0.0};
};

/// Taylor coefficients in (s−1) of c^{−s·m}·p-style factors: returns the
/// expansion of exp(−t·(s−1)) scaled by `scale`, i.e. Σ_k scale·(−t)^k/k!.
inline LaurentSeries exp_linear(double scale, double t, int max_index) {
  std::vector<double> v(static_cast<std::size_t>(max_index + 1));
  double term = scale;
  for (int k = 0; k <= max_index; ++k) {
    v[static_cast<std::size_t>(k)] = term;
    term *= -t / (k + 1);
  }
  return LaurentSeries::taylor(std::move(v));
}

/// Given E(s) known through index −1, the polynomial R (ascending powers of
/// L) with Res_{s=1} E(s) y^s / s = y·R(log y).
///
/// y^s/s = y·Σ_k (s−1)^k Σ_{i≤k} L^i/i!·(−1)^{k−i}, so the residue collects
/// E_{−1−k} against the k-th coefficient.
inline std::vector<double> residue_polynomial(const LaurentSeries& e) {
  if (e.max_index() < -1) throw TruncationError("series must be known through index -1");
  const int order = std::max(e.pole_order(), 1);
  std::vector<double> r(static_cast<std::size_t>(order), 0.0);
  for (int k = 0; k < order; ++k) {
    const double ek = e[-1 - k];
    if (ek == 0.0) continue;
    double inv_fact = 1.0;
    for (int i = 0; i <= k; ++i) {
      if (i > 0) inv_fact /= i;
      const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
      r[static_cast<std::size_t>(i)] += ek * sign * inv_fact;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Stieltjes constants.

namespace detail {

// B_2, B_4, ..., B_20.
inline constexpr double kBernoulliEven[] = {
    1.0 / 6,  -1.0 / 30,       1.0 / 42,        -1.0 / 30,     5.0 / 66,
    -691.0 / 2730, 7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330};

/// Euler–Maclaurin corrected value of Σ_{m≤n}(log m)^k/m − (log n)^{k+1}/(k+1).
inline long double stieltjes_partial(int k, long double n) {
  using ld = long double;
  ld s = 0.0L, c = 0.0L;
  const auto nn = static_cast<long>(n);
  for (long m = 2; m <= nn; ++m) {  // m = 1 contributes (log 1)^k = [k == 0]
    const ld lm = std::log(static_cast<ld>(m));
    const ld term = std::pow(lm, k) / static_cast<ld>(m) - c;
    const ld t = s + term;
    c = (t - s) - term;
    s = t;
  }
  if (k == 0) s += 1.0L;
  const ld L = std::log(n);
  s -= std::pow(L, k + 1) / (k + 1);

  // f(x) = (log x)^k / x, f^{(r)}(x) = x^{−1−r} P_r(log x).
  std::vector<ld> poly(static_cast<std::size_t>(k + 1), 0.0L);
  poly[static_cast<std::size_t>(k)] = 1.0L;
  auto eval = [&](const std::vector<ld>& p) {
    ld acc = 0.0L;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * L + p[i];
    return acc;
  };
  s -= eval(poly) / n / 2.0L;
  ld fact = 1.0L;  // (2j)!
  for (int r = 0, j = 0; j < 10; ++r) {
    // advance P_r -> P_{r+1}
    std::vector<ld> next(poly.size(), 0.0L);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] -= static_cast<ld>(r + 1) * poly[i];
      if (i > 0) next[i - 1] += static_cast<ld>(i) * poly[i];
    }
    poly = std::move(next);
    const int order = r + 1;  // derivative order now held in poly
    if (order % 2 == 1) {
      ++j;
      fact *= static_cast<ld>(2 * j - 1) * static_cast<ld>(2 * j);
      const ld deriv = eval(poly) / std::pow(n, static_cast<ld>(order + 1));
      s -= static_cast<ld>(kBernoulliEven[j - 1]) / fact * deriv;
    }
  }
  return s;
}

}  // namespace detail

/// γ_k from its limit definition, accelerated by the Euler–Maclaurin tail
/// expansion; the cutoff doubles until two successive values agree.
inline double stieltjes_constant(int k, double tol = 1e-13) {
  if (k < 0 || k > 20) throw DomainError("Stieltjes index out of supported range");
  long double prev = detail::stieltjes_partial(k, 32.0L);
  for (long double n = 64.0L; n <= 65536.0L; n *= 2.0L) {
    const long double cur = detail::stieltjes_partial(k, n);
    if (std::abs(static_cast<double>(cur - prev)) <= tol * std::max(1.0, std::abs(static_cast<double>(cur))))
      return static_cast<double>(cur);
    prev = cur;
  }
  throw PrecisionError("Stieltjes constant did not converge");
}

/// ζ(s) = 1/(s−1) + Σ_{k≥0} (−1)^k γ_k (s−1)^k / k!, known through index T.
inline LaurentSeries zeta_laurent(int T) {
  if (T < 0 || T > 10) throw DomainError("zeta_laurent supports 0 <= T <= 10");
  // γ_0..γ_10 are computed once per process.
  static const std::vector<double> gammas = [] {
    std::vector<double> g;
    for (int k = 0; k <= 10; ++k) g.push_back(stieltjes_constant(k));
    return g;
  }();
  std::vector<double> c(static_cast<std::size_t>(T + 2));
  c[0] = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= T; ++k) {
    if (k > 0) fact *= k;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(k + 1)] = sign * gammas[static_cast<std::size_t>(k)] / fact;
  }
  return {-1, std::move(c)};
}

}  // namespace ce
