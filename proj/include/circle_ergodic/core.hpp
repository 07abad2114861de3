#pragma once

// Shared numeric plumbing: error types, unit-circle phases, compensated
// accumulation, small multiplicative number theory and the seeded generator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ce {

using cplx = std::complex<double>;
using i128 = __int128;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Errors. Every failure the library reports derives from ce::Error so the CLI
// can map them to a single usage exit code.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct CapacityError : Error {
  using Error::Error;
};
struct PrecisionError : Error {
  using Error::Error;
};
struct DivergenceError : Error {
  using Error::Error;
};
struct TruncationError : Error {
  using Error::Error;
};
struct RankError : Error {
  using Error::Error;
};
struct CorruptionError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Phases.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fractional part in [0, 1).
inline double frac(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Distance to the nearest integer, ‖x‖.
inline double dist_to_int(double x) {
  double r = frac(x);
  return std::min(r, 1.0 - r);
}

/// e(x) = exp(2πix). The argument is reduced to [-1/2, 1/2) first so the
/// trigonometric call never sees a large argument.
inline cplx unit(double x) {
  double r = x - std::nearbyint(x);
  return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

/// k·x mod 1 using an exact two-product, accurate to ~1 ulp for k < 2^53.
inline double phase(std::uint64_t k, double x) {
  const double kd = static_cast<double>(k);
  const double hi = kd * x;
  const double lo = std::fma(kd, x, -hi);
  double r = hi - std::floor(hi);
  r += lo;
  return frac(r);
}

// ---------------------------------------------------------------------------
// Compensated (Neumaier) accumulation.

class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexKahanSum {
 public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

// ---------------------------------------------------------------------------
// Elementary multiplicative number theory (small arguments).

using Factorization = std::vector<std::pair<std::uint64_t, int>>;

inline Factorization factorize(std::uint64_t n) {
  Factorization f;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline int mobius(std::uint64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline std::uint64_t totient(std::uint64_t n) {
  std::uint64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

inline std::uint64_t num_divisors(std::uint64_t n) {
  std::uint64_t d = 1;
  for (auto [p, e] : factorize(n)) d *= static_cast<std::uint64_t>(e + 1);
  return d;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> d{1};
  for (auto [p, e] : factorize(n)) {
    const std::size_t base = d.size();
    std::uint64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline int valuation(std::uint64_t n, std::uint64_t p) {
  int v = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

/// Smallest-prime-factor table for 0..n (entries 0 and 1 are 0).
inline std::vector<std::uint32_t> smallest_prime_factors(std::size_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > spf[i] || i * p > n) break;
      spf[i * p] = p;
    }
  }
  return spf;
}

inline std::vector<std::uint32_t> primes_up_to(std::size_t n) {
  std::vector<std::uint32_t> out;
  auto spf = smallest_prime_factors(n);
  for (std::size_t i = 2; i <= n; ++i)
    if (spf[i] == i) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

// ---------------------------------------------------------------------------
// Worker pool size. Work is split into fixed contiguous chunks and every
// result lands in a preassigned slot, so outputs do not depend on it.

namespace detail {
inline unsigned& thread_setting() {
  static unsigned n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}
}  // namespace detail

inline void set_threads(unsigned n) { detail::thread_setting() = std::max(1u, n); }
inline unsigned threads() { return detail::thread_setting(); }

/// Calls f(i) for i in [0, n) across threads(); f must only write to data
/// owned by index i.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Seeded generator: xoshiro256** (Blackman & Vigna) seeded through splitmix64.
// Fixed by algorithm so other implementations can reproduce the stream.

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t z = seed;
    for (auto& s : s_) s = splitmix64(z);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive), by rejection.
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do r = next();
    while (r >= limit);
    return lo + r % span;
  }

  /// Standard normal via Box–Muller (one value per call, deterministic).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace ce
