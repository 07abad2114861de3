#pragma once

// Dirichlet characters modulo q built from the structure of (ℤ/qℤ)*, Gauss
// sums, and the expansion of e(am/q)·1_{(m,q)=1} in characters.

#include <numeric>
#include <vector>

#include "circle_ergodic/core.hpp"

namespace ce {

struct DirichletCharacter {
  std::uint64_t q = 1;
  std::vector<cplx> values;  // χ(0..q−1)
  bool principal = true;

  cplx operator()(std::uint64_t m) const { return values[m % q]; }
};

namespace detail {

// One cyclic factor of (ℤ/qℤ)*: the discrete log of every residue modulo
// `modulus` with respect to `generator`, or −1 off the subgroup.
struct CyclicFactor {
  std::uint64_t modulus;
  std::uint64_t order;
  std::vector<std::int64_t> log;  // indexed by residue mod `modulus`
};

inline std::uint64_t primitive_root_prime_power(std::uint64_t p, int e) {
  const std::uint64_t phi = p - 1;
  auto fac = factorize(phi);
  std::uint64_t g = 2;
  for (;; ++g) {
    bool ok = true;
    for (auto [r, k] : fac) {
      std::uint64_t x = 1;
      for (std::uint64_t i = 0; i < phi / r; ++i) x = x * g % p;
      if (x == 1) ok = false;
    }
    if (ok) break;
  }
  if (e == 1) return g;
  // g generates mod p^e for all e ≥ 2 unless g^{p−1} ≡ 1 (mod p²).
  std::uint64_t x = 1;
  for (std::uint64_t i = 0; i < p - 1; ++i) x = x * g % (p * p);
  return x == 1 ? g + p : g;
}

inline CyclicFactor make_factor(std::uint64_t modulus, std::uint64_t generator, std::uint64_t order,
                                std::uint64_t step_modulus) {
  CyclicFactor f{modulus, order, std::vector<std::int64_t>(modulus, -1)};
  std::uint64_t x = 1 % step_modulus;
  for (std::uint64_t k = 0; k < order; ++k) {
    f.log[x % modulus] = static_cast<std::int64_t>(k);
    x = x * generator % step_modulus;
  }
  return f;
}

}  // namespace detail

/// All φ(q) characters mod q; the principal one comes first.
inline std::vector<DirichletCharacter> dirichlet_characters(std::uint64_t q) {
  if (q < 1) throw DomainError("modulus must be >= 1");
  if (q > 100000) throw CapacityError("modulus too large for character tables");

  // Each generator: (prime-power modulus, order, log function on residues).
  struct Gen {
    std::uint64_t pe;
    std::uint64_t order;
    std::vector<std::int64_t> log;  // residue mod pe → exponent, −1 if not coprime
  };
  std::vector<Gen> gens;
  for (auto [p, e] : factorize(q)) {
    std::uint64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (p != 2) {
      const std::uint64_t g = detail::primitive_root_prime_power(p, e);
      auto f = detail::make_factor(pe, g, pe / p * (p - 1), pe);
      gens.push_back({pe, f.order, std::move(f.log)});
    } else if (e == 2) {
      auto f = detail::make_factor(4, 3, 2, 4);
      gens.push_back({4, 2, std::move(f.log)});
    } else if (e >= 3) {
      // (ℤ/2^eℤ)* = ⟨−1⟩ × ⟨5⟩.
      std::vector<std::int64_t> sign(pe, -1), five(pe, -1);
      auto f5 = detail::make_factor(pe, 5, pe / 4, pe);
      for (std::uint64_t r = 1; r < pe; r += 2) {
        const bool neg = (r % 4 == 3);
        sign[r] = neg ? 1 : 0;
        five[r] = f5.log[neg ? pe - r : r];
      }
      gens.push_back({pe, 2, std::move(sign)});
      gens.push_back({pe, pe / 4, std::move(five)});
    }
    // 2^1 contributes the trivial group.
  }

  // Exponent vector of every residue.
  const std::size_t c = gens.size();
  std::vector<std::vector<std::int64_t>> logs(q, std::vector<std::int64_t>(c, 0));
  std::vector<bool> unit_res(q, false);
  for (std::uint64_t r = 0; r < q; ++r) {
    unit_res[r] = std::gcd(r, q) == 1;
    if (!unit_res[r]) continue;
    for (std::size_t i = 0; i < c; ++i) logs[r][i] = gens[i].log[r % gens[i].pe];
  }

  std::vector<DirichletCharacter> out;
  std::vector<std::uint64_t> idx(c, 0);
  for (;;) {
    DirichletCharacter chi;
    chi.q = q;
    chi.values.assign(q, cplx(0.0, 0.0));
    chi.principal = std::all_of(idx.begin(), idx.end(), [](std::uint64_t j) { return j == 0; });
    for (std::uint64_t r = 0; r < q; ++r) {
      if (!unit_res[r]) continue;
      double turn = 0.0;
      for (std::size_t i = 0; i < c; ++i)
        turn += static_cast<double>((idx[i] * static_cast<std::uint64_t>(logs[r][i])) % gens[i].order) /
                static_cast<double>(gens[i].order);
      chi.values[r] = unit(turn);
    }
    out.push_back(std::move(chi));
    std::size_t i = 0;
    while (i < c && ++idx[i] == gens[i].order) idx[i++] = 0;
    if (i == c) break;
  }
  return out;
}

/// τ(χ̄) = Σ_{m=1}^{q} χ̄(m) e(m/q).
inline cplx gauss_sum(const DirichletCharacter& chi) {
  ComplexKahanSum acc;
  for (std::uint64_t m = 1; m <= chi.q; ++m) {
    const cplx v = chi(m);
    if (v == cplx(0.0, 0.0)) continue;
    acc.add(std::conj(v) * unit(static_cast<double>(m % chi.q) / static_cast<double>(chi.q)));
  }
  return acc.value();
}

/// |e(am₁/q₁)·1_{(m₁,q₁)=1} − φ(q₁)^{−1} Σ_χ χ(a)χ(m₁)τ(χ̄)| for a given
/// character table mod q₁.
inline double character_identity_check(std::uint64_t a, std::uint64_t m1,
                                       const std::vector<DirichletCharacter>& chars,
                                       const std::vector<cplx>& gauss) {
  if (chars.empty()) throw DomainError("empty character table");
  const std::uint64_t q1 = chars.front().q;
  if (std::gcd(a, q1) != 1) throw DomainError("character identity requires gcd(a, q1) = 1");
  const cplx lhs = std::gcd(m1, q1) == 1
                       ? unit(static_cast<double>((a % q1) * (m1 % q1) % q1) / static_cast<double>(q1))
                       : cplx(0.0, 0.0);
  ComplexKahanSum rhs;
  for (std::size_t i = 0; i < chars.size(); ++i) rhs.add(chars[i](a) * chars[i](m1) * gauss[i]);
  return std::abs(lhs - rhs.value() / static_cast<double>(chars.size()));
}

inline double character_identity_check(std::uint64_t a, std::uint64_t q1, std::uint64_t m1) {
  if (q1 < 1) throw DomainError("modulus must be >= 1");
  if (std::gcd(a, q1) != 1) throw DomainError("character identity requires gcd(a, q1) = 1");
  const auto chars = dirichlet_characters(q1);
  std::vector<cplx> gauss;
  for (const auto& chi : chars) gauss.push_back(gauss_sum(chi));
  return character_identity_check(a, m1, chars, gauss);
}

}  // namespace ce
