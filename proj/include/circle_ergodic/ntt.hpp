#pragma once

// Exact integer power series arithmetic through number-theoretic transforms
// over five word-size primes, recombined by Garner's algorithm into signed
// 128-bit integers. Used to expand q∏(1−q^n)^24 to large order.

#include <array>
#include <cstdint>
#include <vector>

#include "circle_ergodic/core.hpp"

namespace ce::ntt {

constexpr std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e > 0) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

constexpr std::uint32_t primitive_root(std::uint32_t p) {
  std::uint64_t phi = p - 1;
  std::array<std::uint64_t, 32> fac{};
  int nf = 0;
  std::uint64_t n = phi;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      fac[nf++] = d;
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fac[nf++] = n;
  for (std::uint32_t g = 2;; ++g) {
    bool ok = true;
    for (int i = 0; i < nf && ok; ++i) ok = pow_mod(g, phi / fac[i], p) != 1;
    if (ok) return g;
  }
}

/// Transform kernel for a compile-time prime; the modulus being a constant
/// lets the compiler strength-reduce every reduction.
template <std::uint32_t P>
struct Field {
  static constexpr std::uint32_t mod = P;
  static constexpr std::uint32_t root = primitive_root(P);
  static constexpr int two_adicity = [] {
    int k = 0;
    std::uint32_t m = P - 1;
    while ((m & 1u) == 0) {
      m >>= 1;
      ++k;
    }
    return k;
  }();

  static std::uint32_t mul(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % P);
  }
  static std::uint32_t add(std::uint32_t a, std::uint32_t b) {
    std::uint32_t s = a + b;
    return s >= P ? s - P : s;
  }
  static std::uint32_t sub(std::uint32_t a, std::uint32_t b) {
    return a >= b ? a - b : a + P - b;
  }

  /// In-place iterative radix-2 transform; length must be a power of two.
  static void transform(std::vector<std::uint32_t>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::uint32_t> tw(n / 2);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::uint64_t w = pow_mod(root, (P - 1) / len, P);
      if (inverse) w = pow_mod(w, P - 2, P);
      const std::size_t half = len / 2;
      tw[0] = 1;
      for (std::size_t k = 1; k < half; ++k) tw[k] = mul(tw[k - 1], static_cast<std::uint32_t>(w));
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const std::uint32_t u = a[i + k];
          const std::uint32_t v = mul(a[i + k + half], tw[k]);
          a[i + k] = add(u, v);
          a[i + k + half] = sub(u, v);
        }
      }
    }
    if (inverse) {
      const auto inv_n = static_cast<std::uint32_t>(pow_mod(n, P - 2, P));
      for (auto& x : a) x = mul(x, inv_n);
    }
  }
};

inline std::size_t transform_length(std::size_t terms) {
  std::size_t len = 1;
  while (len < 2 * terms - 1) len <<= 1;
  return len;
}

/// Residues mod P of (∏_{n≥1}(1−q^n))^24, truncated to `terms` coefficients.
/// The base series comes from Euler's pentagonal number theorem; the power is
/// formed as E² → E⁴ → E⁸ → E¹⁶, then E²⁴ = E¹⁶·E⁸.
template <std::uint32_t P>
std::vector<std::uint32_t> eta24_residues(std::size_t terms) {
  using F = Field<P>;
  const std::size_t len = transform_length(terms);
  if (len > (std::size_t{1} << F::two_adicity))
    throw CapacityError("transform length exceeds the prime's two-adicity");

  std::vector<std::uint32_t> cur(len, 0);
  // ∏(1−q^n) = Σ_k (−1)^k q^{k(3k−1)/2}, k ∈ ℤ.
  cur[0] = 1;
  for (std::int64_t k = 1;; ++k) {
    const auto g1 = static_cast<std::size_t>(k * (3 * k - 1) / 2);
    const auto g2 = static_cast<std::size_t>(k * (3 * k + 1) / 2);
    if (g1 >= terms) break;
    const std::uint32_t s = (k % 2 == 0) ? 1u : P - 1u;
    cur[g1] = s;
    if (g2 < terms) cur[g2] = s;
  }

  auto square_truncate = [&](std::vector<std::uint32_t>& v, std::vector<std::uint32_t>* keep_hat) {
    F::transform(v, false);
    if (keep_hat) *keep_hat = v;
    for (auto& x : v) x = F::mul(x, x);
    F::transform(v, true);
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(terms), v.end(), 0u);
  };

  std::vector<std::uint32_t> e8_hat;
  square_truncate(cur, nullptr);   // E^2
  square_truncate(cur, nullptr);   // E^4
  square_truncate(cur, nullptr);   // E^8
  square_truncate(cur, &e8_hat);   // E^16, keeping the transform of E^8
  F::transform(cur, false);
  for (std::size_t i = 0; i < len; ++i) cur[i] = F::mul(cur[i], e8_hat[i]);
  F::transform(cur, true);         // E^24
  cur.resize(terms);
  return cur;
}

inline constexpr std::array<std::uint32_t, 5> kPrimes = {998244353u, 167772161u, 469762049u,
                                                        754974721u, 2013265921u};

/// Smallest transform length any of the primes cannot support.
inline constexpr std::size_t kMaxTransformLength = std::size_t{1} << 23;

/// Garner recombination of residues (one per prime in kPrimes) into the unique
/// signed integer of magnitude below half the prime product, which must fit
/// in 127 bits.
inline i128 garner(const std::array<std::uint32_t, 5>& r) {
  constexpr std::size_t K = kPrimes.size();
  std::array<std::uint64_t, K> digit{};
  for (std::size_t i = 0; i < K; ++i) {
    const std::uint64_t p = kPrimes[i];
    // x_i = (r_i − (d_0 + d_1 p_0 + ...)) / (p_0 ... p_{i−1}) mod p_i
    std::uint64_t acc = 0, prod = 1;
    for (std::size_t j = 0; j < i; ++j) {
      acc = (acc + digit[j] * prod) % p;
      prod = prod * (kPrimes[j] % p) % p;
    }
    const std::uint64_t diff = (r[i] + p - acc) % p;
    digit[i] = diff * pow_mod(prod, p - 2, p) % p;
  }
  // Value in [0, P) modulo 2^128, and its position relative to P/2.
  u128 value = 0, radix = 1;
  double fraction = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < K; ++i) {
    value += static_cast<u128>(digit[i]) * radix;
    radix *= kPrimes[i];
  }
  for (std::size_t i = K; i-- > 0;) {
    scale /= static_cast<double>(kPrimes[i]);
    fraction += static_cast<double>(digit[i]) * scale;
  }
  if (fraction > 0.5) value -= radix;  // radix now holds P mod 2^128
  return static_cast<i128>(value);
}

/// Exact coefficients of (∏(1−q^n))^24 up to q^{terms−1}.
inline std::vector<i128> eta24_exact(std::size_t terms) {
  if (terms == 0) return {};
  if (transform_length(terms) > kMaxTransformLength)
    throw CapacityError("series too long for the transform primes");
  const auto r0 = eta24_residues<kPrimes[0]>(terms);
  const auto r1 = eta24_residues<kPrimes[1]>(terms);
  const auto r2 = eta24_residues<kPrimes[2]>(terms);
  const auto r3 = eta24_residues<kPrimes[3]>(terms);
  const auto r4 = eta24_residues<kPrimes[4]>(terms);
  std::vector<i128> out(terms);
  for (std::size_t i = 0; i < terms; ++i) out[i] = garner({r0[i], r1[i], r2[i], r3[i], r4[i]});
  return out;
}

}  // namespace ce::ntt
