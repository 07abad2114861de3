#pragma once

// Arithmetic weight sequences: Ramanujan τ and the normalized Hecke squares
// λ(n)² = τ(n)²/n¹¹, Piltz divisor functions d_v, and generic multiplicative
// weights described by their values on prime powers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circle_ergodic/core.hpp"
#include "circle_ergodic/laurent.hpp"
#include "circle_ergodic/ntt.hpp"

namespace ce {

/// Largest N accepted by tau_table. |τ(n)| ≤ d(n) n^{11/2} stays below 2^126
/// well past this point; the transform length is the binding limit.
inline constexpr std::size_t kTauCapacity = 2'000'000;

struct TauTable {
  std::size_t N = 0;
  std::vector<i128> tau;  // tau[n] for 1 ≤ n ≤ N, tau[0] = 0

  i128 operator()(std::size_t n) const {
    if (n == 0 || n > N) throw RangeError("tau index out of range");
    return tau[n];
  }
};

/// τ(1..N) from the q-expansion q∏(1−q^n)^24.
inline TauTable tau_table(std::size_t N) {
  if (N < 1) throw DomainError("tau_table needs N >= 1");
  if (N > kTauCapacity) throw CapacityError("tau_table: N exceeds " + std::to_string(kTauCapacity));
  auto coeffs = ntt::eta24_exact(N);
  TauTable t;
  t.N = N;
  t.tau.assign(N + 1, 0);
  for (std::size_t n = 1; n <= N; ++n) t.tau[n] = coeffs[n - 1];
  return t;
}

/// λ(n) = τ(n)/n^{11/2}, index 0 unused.
inline std::vector<double> hecke_lambda(const TauTable& t) {
  std::vector<double> lam(t.N + 1, 0.0);
  for (std::size_t n = 1; n <= t.N; ++n)
    lam[n] = static_cast<double>(t.tau[n]) / std::pow(static_cast<double>(n), 5.5);
  return lam;
}

/// λ(p^m) from λ(p) through λ(p^{m+1}) = λ(p)λ(p^m) − λ(p^{m−1}).
inline double lambda_prime_power(double lambda_p, int m) {
  if (m < 0) throw DomainError("negative exponent");
  double prev = 1.0, cur = lambda_p;  // λ(1), λ(p)
  if (m == 0) return 1.0;
  for (int j = 1; j < m; ++j) {
    const double next = lambda_p * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

enum class WeightKind { HeckeSquare, Piltz, Generic };

/// Values w(1..N) of one weight with running sums. Index 0 holds 0 in both
/// arrays so prefix[n] = Σ_{k≤n} w(k).
struct WeightSequence {
  WeightKind kind = WeightKind::Generic;
  int v = 0;            // Piltz order
  std::string spec_id;  // Generic spec name
  std::size_t N = 0;
  std::vector<double> values;
  std::vector<double> prefix;

  double w(std::size_t k) const { return values.at(k); }
  double prefix_sum(std::size_t n) const {
    if (n > N) throw RangeError("prefix index beyond table");
    return prefix[n];
  }

  std::string name() const {
    switch (kind) {
      case WeightKind::HeckeSquare: return "hecke2";
      case WeightKind::Piltz: return "piltz" + std::to_string(v);
      case WeightKind::Generic: return "generic:" + spec_id;
    }
    return "?";
  }

  void finalize_prefix() {
    prefix.assign(N + 1, 0.0);
    KahanSum acc;
    for (std::size_t k = 1; k <= N; ++k) {
      acc.add(values[k]);
      prefix[k] = acc.value();
    }
  }
};

inline WeightSequence hecke_lambda_sq(const TauTable& t) {
  WeightSequence w;
  w.kind = WeightKind::HeckeSquare;
  w.N = t.N;
  w.values.assign(t.N + 1, 0.0);
  for (std::size_t n = 1; n <= t.N; ++n) {
    // τ² overflows 128 bits past n ≈ 10^5; square after normalizing.
    const double lam = static_cast<double>(t.tau[n]) / std::pow(static_cast<double>(n), 5.5);
    w.values[n] = lam * lam;
  }
  w.values[1] = 1.0;
  w.finalize_prefix();
  return w;
}

inline WeightSequence hecke_lambda_sq(std::size_t N) { return hecke_lambda_sq(tau_table(N)); }

/// d_v(1..N) by v−1 divisor-sum sweeps starting from the constant 1.
inline WeightSequence piltz_table(int v, std::size_t N) {
  if (v < 1) throw DomainError("piltz_table needs v >= 1");
  if (N < 1) throw DomainError("piltz_table needs N >= 1");
  std::vector<std::uint64_t> cur(N + 1, 1), next(N + 1);
  cur[0] = 0;
  for (int j = 1; j < v; ++j) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t d = 1; d <= N; ++d)
      for (std::size_t m = d; m <= N; m += d) next[m] += cur[d];
    std::swap(cur, next);
  }
  WeightSequence w;
  w.kind = WeightKind::Piltz;
  w.v = v;
  w.N = N;
  w.values.assign(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) w.values[n] = static_cast<double>(cur[n]);
  w.finalize_prefix();
  return w;
}

/// d_v(p^m) = C(m+v−1, v−1).
inline double piltz_prime_power(int v, int m) { return binomial(m + v - 1, v - 1); }

// ---------------------------------------------------------------------------
// Generic multiplicative weights.

struct MultiplicativeWeightSpec {
  std::string spec_id;
  int pole_order = 1;        // ϰ
  int divisor_exponent = 1;  // k in 0 ≤ α(p^l) ≤ (l+1)^k
  std::function<double(std::uint64_t p, int l)> local_factor;
  LaurentSeries laurent_data;  // 𝒜(s) around s = 1, supplied by the caller
  int b1 = 4, b2 = 4;          // growth exponents, informational

  /// Checks the supplied α(p^l) against 0 ≤ α ≤ (l+1)^k.
  double checked_local(std::uint64_t p, int l) const {
    const double a = local_factor(p, l);
    const double bound = std::pow(static_cast<double>(l + 1), divisor_exponent);
    if (!(a >= 0.0) || a > bound * (1.0 + 1e-12))
      throw DomainError("local factor alpha(" + std::to_string(p) + "^" + std::to_string(l) +
                        ") = " + std::to_string(a) + " violates 0 <= alpha <= (l+1)^k");
    return a;
  }

  void validate() const {
    if (pole_order < 1) throw DomainError("pole order must be >= 1");
    if (!local_factor) throw DomainError("spec without local factor");
    if (laurent_data.pole_order() != pole_order)
      throw DomainError("laurent data pole order does not match spec pole order");
    if (laurent_data.max_index() < -1) throw TruncationError("laurent data must reach index -1");
  }
};

inline WeightSequence generic_table(const MultiplicativeWeightSpec& spec, std::size_t N) {
  if (N < 1) throw DomainError("generic_table needs N >= 1");
  if (!spec.local_factor) throw DomainError("spec without local factor");
  const auto spf = smallest_prime_factors(N);
  WeightSequence w;
  w.kind = WeightKind::Generic;
  w.spec_id = spec.spec_id;
  w.N = N;
  w.values.assign(N + 1, 0.0);
  w.values[1] = 1.0;
  for (std::size_t n = 2; n <= N; ++n) {
    const std::size_t p = spf[n];
    std::size_t m = n, pl = 1;
    int l = 0;
    while (m % p == 0) {
      m /= p;
      pl *= p;
      ++l;
    }
    w.values[n] = (m == 1) ? spec.checked_local(p, l) : w.values[m] * w.values[pl];
  }
  w.finalize_prefix();
  return w;
}

/// α ≡ 1, 𝒜 = ζ.
inline MultiplicativeWeightSpec cesaro_spec(int laurent_order = 4) {
  MultiplicativeWeightSpec s;
  s.spec_id = "cesaro";
  s.pole_order = 1;
  s.divisor_exponent = 0;
  s.local_factor = [](std::uint64_t, int) { return 1.0; };
  s.laurent_data = zeta_laurent(laurent_order);
  return s;
}

/// α = d_v, 𝒜 = ζ^v.
inline MultiplicativeWeightSpec divisor_spec(int v, int laurent_order = 6) {
  if (v < 1) throw DomainError("divisor_spec needs v >= 1");
  MultiplicativeWeightSpec s;
  s.spec_id = "d" + std::to_string(v);
  s.pole_order = v;
  s.divisor_exponent = v - 1;
  s.local_factor = [v](std::uint64_t, int l) { return piltz_prime_power(v, l); };
  s.laurent_data = zeta_laurent(laurent_order).pow(v);
  return s;
}

/// α = λ², whose series has a simple pole with residue C_Φ. Only the residue
/// is known numerically, so laurent_data stops at index −1.
inline MultiplicativeWeightSpec hecke_square_spec(std::vector<double> lambda, double c_phi) {
  MultiplicativeWeightSpec s;
  s.spec_id = "hecke2";
  s.pole_order = 1;
  s.divisor_exponent = 2;
  s.local_factor = [lam = std::move(lambda)](std::uint64_t p, int l) {
    if (p >= lam.size()) throw RangeError("lambda(p) not tabulated");
    const double v = lambda_prime_power(lam[p], l);
    return v * v;
  };
  s.laurent_data = LaurentSeries(-1, {c_phi});
  return s;
}

}  // namespace ce
