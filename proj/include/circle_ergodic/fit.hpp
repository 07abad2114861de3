#pragma once

// Least-squares fits of sampled values against powers of log n.

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "circle_ergodic/core.hpp"

namespace ce {

struct LogFit {
  std::vector<double> coeffs;  // highest power of log n first
  double condition_number = 0.0;
  double max_residual = 0.0;
};

/// Least squares for value ≈ Σ_i c_i (log n)^{degree−i}, i = 0..degree.
/// Columns are scaled to unit norm before the solve and the reported
/// condition number is that of the scaled design matrix.
inline LogFit fit_log_polynomial(const std::vector<std::pair<double, double>>& samples, int degree) {
  if (degree < 0) throw DomainError("degree must be >= 0");
  const auto m = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index k = degree + 1;
  if (m < k + 1) throw RankError("need at least degree + 2 samples");
  double lo = samples.front().first, hi = lo;
  for (auto [n, v] : samples) {
    if (!(n > 0.0)) throw DomainError("sample abscissae must be positive");
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  if (hi < 10.0 * lo) throw RankError("samples must span a factor of 10 in n");

  Eigen::MatrixXd A(m, k);
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double L = std::log(samples[static_cast<std::size_t>(r)].first);
    for (Eigen::Index c = 0; c < k; ++c) A(r, c) = std::pow(L, static_cast<double>(degree - c));
    b(r) = samples[static_cast<std::size_t>(r)].second;
  }
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < k; ++c) A.col(c) /= scale(c);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) <= 1e-14 * sv(0)) throw RankError("design matrix is rank deficient");
  Eigen::VectorXd x = svd.solve(b);

  LogFit fit;
  fit.condition_number = sv(0) / sv(k - 1);
  fit.max_residual = (A * x - b).cwiseAbs().maxCoeff();
  for (Eigen::Index c = 0; c < k; ++c) fit.coeffs.push_back(x(c) / scale(c));
  return fit;
}

/// Geometric grid of `count` integers from lo to hi inclusive, deduplicated.
inline std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t count) {
  if (lo < 1 || hi < lo || count < 1) throw DomainError("invalid geometric grid");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    const auto n = static_cast<std::size_t>(std::llround(std::exp(std::log(static_cast<double>(lo)) * (1 - t) +
                                                                  std::log(static_cast<double>(hi)) * t)));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  out.back() = hi;
  return out;
}

}  // namespace ce
