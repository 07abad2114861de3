#pragma once

// Weighted Birkhoff averages on a rotation, the doubling map and the integer
// shift, and the kernel calculus on ℤ behind them: averaging kernels,
// convolutions, the Cesàro maximal function and lacunary oscillation sums.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <variant>
#include <vector>

#include "circle_ergodic/core.hpp"
#include "circle_ergodic/expsum.hpp"
#include "circle_ergodic/singular.hpp"
#include "circle_ergodic/weights.hpp"

namespace ce {

// ---------------------------------------------------------------------------
// Observables.

struct Observable {
  enum class Kind { Character, Interval, Table };
  Kind kind = Kind::Character;
  std::int64_t m = 1;         // Character: e(mx)
  double lo = 0.0, hi = 0.5;  // Interval: 1_{[lo, hi)}
  std::vector<double> table;  // Table: f(x) = table[⌊x·size⌋]

  static Observable character(std::int64_t m) {
    Observable f;
    f.kind = Kind::Character;
    f.m = m;
    return f;
  }
  static Observable interval(double lo, double hi) {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw DomainError("interval must satisfy 0 <= lo <= hi <= 1");
    Observable f;
    f.kind = Kind::Interval;
    f.lo = lo;
    f.hi = hi;
    return f;
  }
  static Observable grid_table(std::vector<double> values) {
    if (values.empty()) throw DomainError("empty observable table");
    for (double v : values)
      if (!std::isfinite(v)) throw DomainError("observable table holds a non-finite value (unbounded observable)");
    Observable f;
    f.kind = Kind::Table;
    f.table = std::move(values);
    return f;
  }

  cplx operator()(double x) const {
    switch (kind) {
      case Kind::Character: {
        // m·x mod 1 with an exact two-product.
        const double md = static_cast<double>(m);
        const double hi_ = md * x;
        const double lo_ = std::fma(md, x, -hi_);
        return unit((hi_ - std::floor(hi_)) + lo_);
      }
      case Kind::Interval: return (x >= lo && x < hi) ? 1.0 : 0.0;
      case Kind::Table: {
        const auto n = table.size();
        auto i = static_cast<std::size_t>(x * static_cast<double>(n));
        return table[std::min(i, n - 1)];
      }
    }
    return 0.0;
  }
};

// ---------------------------------------------------------------------------
// Systems on [0, 1).

struct DynamicalSystem {
  // IntegerShift acts on sequences (z_n) by (Sz)_n = z_{n+1}; its averages
  // go through weighted_average_shift and the kernel calculus below.
  enum class Kind { Rotation, Doubling, IntegerShift };
  Kind kind = Kind::Rotation;
  double theta = 0.0;

  static DynamicalSystem rotation(double theta) { return {Kind::Rotation, frac(theta)}; }
  static DynamicalSystem doubling() { return {Kind::Doubling, 0.0}; }
  static DynamicalSystem integer_shift() { return {Kind::IntegerShift, 0.0}; }
};

/// Generates x_k = τ^k(x₀), k = 1, 2, ...
///
/// Rotation: x₀ + kθ carried as an unevaluated sum hi + lo (TwoSum), reduced
/// mod 1 each step, so the phase error stays at a few ulps.
///
/// Doubling: a double in [1/2, 1) holds 53 fractional bits and doubling discards one per
/// step, so the orbit is generated symbolically. The binary expansion of x₀
/// supplies the first 53 digits; later digits are drawn from the seeded
/// generator (a random point of the cylinder set fixed by x₀), and x_k is read
/// from a 53-digit window starting at digit k+1.
class Orbit {
 public:
  Orbit(const DynamicalSystem& sys, double x0, std::uint64_t seed = 0) : sys_(sys), rng_(seed) {
    if (sys.kind == DynamicalSystem::Kind::IntegerShift)
      throw DomainError("the integer shift acts on sequences, not points of [0, 1)");
    if (!(x0 >= 0.0 && x0 < 1.0)) throw DomainError("x0 must lie in [0, 1)");
    hi_ = x0;
    if (sys.kind == DynamicalSystem::Kind::Doubling) {
      // First 53 binary digits of x0; digits below 2^-53 (present only when
      // x0 < 1/2) are replaced by generated ones.
      auto m = static_cast<std::uint64_t>(std::ldexp(x0, 53));
      for (int i = 52; i >= 0; --i) bits_.push_back(static_cast<std::uint8_t>((m >> i) & 1u));
    }
  }

  double next() {
    if (sys_.kind == DynamicalSystem::Kind::Rotation) {
      const double s = hi_ + sys_.theta;
      const double bb = s - hi_;
      const double err = (hi_ - (s - bb)) + (sys_.theta - bb);
      double h = s - std::floor(s);
      double l = lo_ + err;
      const double t = h + l;
      l = l - (t - h);
      h = t;
      const double fl = std::floor(h);
      hi_ = h - fl;
      lo_ = l;
      if (hi_ >= 1.0) hi_ -= 1.0;
      return hi_;
    }
    ++k_;
    while (bits_.size() < k_ + 53) {
      const std::uint64_t r = rng_.next();
      for (int i = 63; i >= 0; --i) bits_.push_back(static_cast<std::uint8_t>((r >> i) & 1u));
    }
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < 53; ++i) m = (m << 1) | bits_[k_ + i];
    return std::ldexp(static_cast<double>(m), -53);
  }

 private:
  DynamicalSystem sys_;
  Rng rng_;
  double hi_ = 0.0, lo_ = 0.0;
  std::size_t k_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Σ_{k≤n} w(k) f(τ^k x₀) / Σ_{k≤n} w(k).
inline cplx weighted_average(const DynamicalSystem& sys, const WeightSequence& w, const Observable& f, double x0,
                             std::size_t n, std::uint64_t seed = 0) {
  detail::check_length(w, n);
  if (w.prefix[n] <= 0.0) throw DomainError("weights vanish on [1, n]");
  Orbit orbit(sys, x0, seed);
  ComplexKahanSum acc;
  for (std::size_t k = 1; k <= n; ++k) acc.add(w.values[k] * f(orbit.next()));
  return acc.value() / w.prefix[n];
}

/// Average of z_k over the forward shift orbit: Σ_{k≤n} w(k) z_k / Σ w(k),
/// with z given as z[k − offset].
inline double weighted_average_shift(const WeightSequence& w, const std::vector<double>& z, std::int64_t offset,
                                     std::size_t n) {
  detail::check_length(w, n);
  KahanSum acc;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::int64_t i = static_cast<std::int64_t>(k) - offset;
    if (i >= 0 && i < static_cast<std::int64_t>(z.size())) acc.add(w.values[k] * z[static_cast<std::size_t>(i)]);
  }
  return acc.value() / w.prefix[n];
}

// ---------------------------------------------------------------------------
// Lacunary sequences.

struct LacunarySequence {
  double rho = 2.0;
  std::vector<std::size_t> points;  // I_ρ = {⌊ρ^m⌋ : m ≥ 1}, deduplicated, ≤ Nj.back()
  std::vector<std::size_t> Nj;      // N_1 < N_2 < ... with N_{j+1} ≥ 2N_j

  std::size_t J() const { return Nj.empty() ? 0 : Nj.size() - 1; }
};

inline LacunarySequence lacunary(double rho, std::vector<std::size_t> Nj) {
  if (!(rho > 1.0)) throw DomainError("rho must exceed 1");
  if (Nj.size() < 2) throw DomainError("need at least two block endpoints");
  for (std::size_t j = 0; j + 1 < Nj.size(); ++j)
    if (Nj[j] < 1 || Nj[j + 1] < 2 * Nj[j]) throw DomainError("block endpoints must satisfy N_{j+1} >= 2 N_j");
  LacunarySequence s;
  s.rho = rho;
  s.Nj = std::move(Nj);
  double r = rho;
  while (r <= static_cast<double>(s.Nj.back()) + 0.5) {
    const auto v = static_cast<std::size_t>(std::floor(r));
    if (s.points.empty() || s.points.back() != v) s.points.push_back(v);
    r *= rho;
  }
  return s;
}

/// N_j = 2^{j−1}, j = 1..J+1.
inline LacunarySequence dyadic_lacunary(double rho, std::size_t J) {
  std::vector<std::size_t> nj;
  for (std::size_t j = 0; j <= J; ++j) nj.push_back(std::size_t{1} << j);
  return lacunary(rho, std::move(nj));
}

struct DiagnosticSeries {
  std::vector<std::size_t> N;
  std::vector<cplx> average;
  std::vector<double> tail_sup;  // tail_sup[j] = sup_{i≥j} |A_{N_{i+1}} − A_{N_i}|
};

/// Weighted averages along the lacunary points ⌊ρ^m⌋ ≤ ⌊ρ^{j_max}⌋ and the
/// suprema of their successive differences over tails.
inline DiagnosticSeries convergence_diagnostic(const DynamicalSystem& sys, const WeightSequence& w,
                                               const Observable& f, double x0, double rho, int j_max,
                                               std::uint64_t seed = 0) {
  if (!(rho > 1.0)) throw DomainError("rho must exceed 1");
  DiagnosticSeries d;
  double r = rho;
  for (int j = 1; j <= j_max; ++j, r *= rho) {
    const auto v = static_cast<std::size_t>(std::floor(r));
    if (v >= 1 && (d.N.empty() || d.N.back() != v)) d.N.push_back(v);
  }
  if (d.N.empty()) return d;
  detail::check_length(w, d.N.back());
  Orbit orbit(sys, x0, seed);
  ComplexKahanSum acc;
  std::size_t idx = 0;
  for (std::size_t k = 1; k <= d.N.back(); ++k) {
    acc.add(w.values[k] * f(orbit.next()));
    if (k == d.N[idx]) {
      if (w.prefix[k] <= 0.0) throw DomainError("weights vanish on [1, N]");
      d.average.push_back(acc.value() / w.prefix[k]);
      ++idx;
    }
  }
  const std::size_t m = d.average.size();
  d.tail_sup.assign(m > 0 ? m - 1 : 0, 0.0);
  double sup = 0.0;
  for (std::size_t j = m - 1; j-- > 0;) {
    sup = std::max(sup, std::abs(d.average[j + 1] - d.average[j]));
    d.tail_sup[j] = sup;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Kernels and convolution on ℤ.

/// Finitely supported sequence: value at index offset + i is v[i].
struct Sequence {
  std::int64_t offset = 0;
  std::vector<double> v;

  double at(std::int64_t i) const {
    const std::int64_t k = i - offset;
    return (k >= 0 && k < static_cast<std::int64_t>(v.size())) ? v[static_cast<std::size_t>(k)] : 0.0;
  }
  double norm2() const {
    KahanSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value());
  }
};

/// c[k] for k = 0..n (c[0] = 0); flat kernels carry a single level value.
struct Kernel {
  std::size_t n = 0;
  std::vector<double> c;
  bool flat = false;
  double level = 0.0;  // c[k] for every 1 ≤ k ≤ n when flat
};

struct KernelFamily {
  enum class Kind { Weighted, Cesaro, Omega };
  Kind kind = Kind::Cesaro;
  const WeightSequence* w = nullptr;  // Weighted: the weights; Omega: the normalizer's weights
  LogPolynomial amplitude{1, 1, {1.0}};  // Omega: D_q (constant) or E_{q,n}

  static KernelFamily weighted(const WeightSequence& w) { return {Kind::Weighted, &w, {}}; }
  static KernelFamily cesaro() { return {Kind::Cesaro, nullptr, {}}; }
  static KernelFamily omega(const WeightSequence& w, LogPolynomial amplitude) {
    return {Kind::Omega, &w, std::move(amplitude)};
  }

  /// ω_{n,q} scale factor amp(n)/S_n(0); the kernel is this times Σ_{m≤n} δ_m.
  double omega_level(std::size_t n) const {
    detail::check_length(*w, n);
    return amplitude(static_cast<double>(n)) / w->prefix[n];
  }

  Kernel at(std::size_t n) const {
    if (n < 1) throw DomainError("kernel length must be >= 1");
    Kernel k;
    k.n = n;
    switch (kind) {
      case Kind::Weighted: {
        detail::check_length(*w, n);
        const double norm = w->prefix[n];
        k.c.assign(n + 1, 0.0);
        for (std::size_t i = 1; i <= n; ++i) k.c[i] = w->values[i] / norm;
        break;
      }
      case Kind::Cesaro:
        k.flat = true;
        k.level = 1.0 / static_cast<double>(n);
        break;
      case Kind::Omega:
        k.flat = true;
        k.level = omega_level(n);
        break;
    }
    return k;
  }
};

namespace detail {

inline Sequence convolve_direct(const Kernel& k, const Sequence& g) {
  Sequence out;
  out.offset = g.offset + 1;
  out.v.assign(g.v.size() + k.n, 0.0);
  if (g.v.empty()) return out;
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    const double gi = g.v[i];
    if (gi == 0.0) continue;
    for (std::size_t j = 1; j <= k.n; ++j) out.v[i + j - 1] += k.c[j] * gi;
  }
  return out;
}

inline Sequence convolve_flat(const Kernel& k, const Sequence& g) {
  // (K ∗ g)(i) = level · Σ_{j=1}^{n} g(i − j) from prefix sums of g.
  Sequence out;
  out.offset = g.offset + 1;
  const std::size_t len = g.v.size() + k.n;
  out.v.assign(len, 0.0);
  std::vector<double> G(g.v.size() + 1, 0.0);
  {
    KahanSum s;
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      s.add(g.v[i]);
      G[i + 1] = s.value();
    }
  }
  auto prefix = [&](std::int64_t upto) {  // Σ_{i < upto} g.v[i]
    if (upto <= 0) return 0.0;
    return G[std::min<std::size_t>(static_cast<std::size_t>(upto), g.v.size())];
  };
  for (std::size_t t = 0; t < len; ++t) {
    // output index offset+1+t sums g.v[i] for i ∈ [t − n + 1, t]
    const auto hi = static_cast<std::int64_t>(t) + 1;
    const auto lo = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(k.n) + 1;
    out.v[t] = k.level * (prefix(hi) - prefix(lo));
  }
  return out;
}

inline Sequence convolve_fft(const Kernel& k, const Sequence& g) {
  Sequence out;
  out.offset = g.offset + 1;
  const std::size_t len = g.v.size() + k.n;
  std::size_t size = 1;
  while (size < len) size <<= 1;
  const std::size_t half = size / 2 + 1;
  auto* a = static_cast<double*>(fftw_malloc(sizeof(double) * size));
  auto* b = static_cast<double*>(fftw_malloc(sizeof(double) * size));
  auto* fa = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half));
  auto* fb = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half));
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    const int sz = static_cast<int>(size);
    pa = fftw_plan_dft_r2c_1d(sz, a, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(sz, b, fb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(sz, fa, a, FFTW_ESTIMATE);
  }
  std::fill(a, a + size, 0.0);
  std::fill(b, b + size, 0.0);
  for (std::size_t j = 1; j <= k.n; ++j) a[j - 1] = k.c[j];
  std::copy(g.v.begin(), g.v.end(), b);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < half; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(pinv);
  out.v.assign(a, a + len);
  for (auto& x : out.v) x /= static_cast<double>(size);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(a);
  fftw_free(b);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

}  // namespace detail

/// (K ∗ g)(i) = Σ_{k=1}^{n} K(k) g(i − k), supported on supp(g) + [1, n].
/// Flat kernels use prefix sums; others are summed directly when small and
/// through a real FFT otherwise. The route depends only on the sizes.
inline Sequence convolve(const Kernel& k, const Sequence& g) {
  if (k.flat) return detail::convolve_flat(k, g);
  if (static_cast<double>(k.n) * static_cast<double>(g.v.size()) <= 4e6) return detail::convolve_direct(k, g);
  return detail::convolve_fft(k, g);
}

/// ‖sup_{n≤n_max} |κ_n ∗ g|‖₂ / ‖g‖₂.
inline double maximal_cesaro(const Sequence& g, std::size_t n_max) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  const double gn = g.norm2();
  if (gn == 0.0) return 0.0;
  const std::size_t L = g.v.size();
  // Output index i = offset + t, t ∈ [1, L + n_max − 1]; κ_n ∗ g(i) averages
  // g.v[t−n .. t−1].
  const std::size_t T = L + n_max - 1;
  std::vector<double> inv(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) inv[n] = 1.0 / static_cast<double>(n);
  std::vector<double> sq(T, 0.0);
  parallel_for(T, [&](std::size_t i) {
    const std::size_t t = i + 1;
    double run = 0.0, best = 0.0;
    const std::size_t top = std::min(n_max, t);
    for (std::size_t n = 1; n <= top; ++n) {
      const std::size_t idx = t - n;
      if (idx < L) run += g.v[idx];
      best = std::max(best, std::abs(run) * inv[n]);
    }
    sq[i] = best * best;
  });
  KahanSum total;
  for (double x : sq) total.add(x);
  return std::sqrt(total.value()) / gn;
}

struct OscillationResult {
  std::size_t J = 0;
  double value = 0.0;
  double per_J = 0.0;
  std::vector<double> terms;  // term j = ‖sup_{N ∈ I_ρ ∩ [N_j, N_{j+1}]} |(K_N − K_{N_j}) ∗ g|‖²
};

/// Σ_{j=1}^{J} ‖ sup_{N_j ≤ N ≤ N_{j+1}, N ∈ I_ρ} |(K_N − K_{N_j}) ∗ g| ‖²_{ℓ²}.
inline OscillationResult oscillation_sum(const Sequence& g, const KernelFamily& family, const LacunarySequence& lac) {
  OscillationResult r;
  r.J = lac.J();
  if (g.norm2() == 0.0) {
    r.terms.assign(r.J, 0.0);
    return r;
  }
  const std::int64_t lo = g.offset + 1;
  r.terms.assign(r.J, 0.0);
  parallel_for(r.J, [&](std::size_t j) {
    const std::size_t a = lac.Nj[j], b = lac.Nj[j + 1];
    const Sequence base = convolve(family.at(a), g);
    std::vector<double> sup(g.v.size() + b, 0.0);  // indices lo .. lo + len − 1
    for (std::size_t N : lac.points) {
      if (N < a || N > b) continue;
      const Sequence cur = convolve(family.at(N), g);
      for (std::size_t t = 0; t < sup.size(); ++t) {
        const std::int64_t i = lo + static_cast<std::int64_t>(t);
        sup[t] = std::max(sup[t], std::abs(cur.at(i) - base.at(i)));
      }
    }
    KahanSum s;
    for (double x : sup) s.add(x * x);
    r.terms[j] = s.value();
  });
  for (double t : r.terms) r.value += t;
  r.per_J = r.J > 0 ? r.value / static_cast<double>(r.J) : 0.0;
  return r;
}

/// I.i.d. standard normal values on [offset, offset + length).
inline Sequence random_sequence(std::size_t length, std::int64_t offset, std::uint64_t seed) {
  Rng rng(seed);
  Sequence g;
  g.offset = offset;
  g.v.resize(length);
  for (auto& x : g.v) x = rng.normal();
  return g;
}

}  // namespace ce
