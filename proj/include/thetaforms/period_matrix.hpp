#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "thetaforms/errors.hpp"
#include "thetaforms/linalg.hpp"

namespace thetaforms {

/// A point of the Siegel upper half-space: complex symmetric g x g matrix
/// with positive-definite imaginary part. Validated on construction.
class PeriodMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-13;

  PeriodMatrix() = default;
  explicit PeriodMatrix(CMatrix tau) : tau_(std::move(tau)) {
    if (!tau_.is_square() || tau_.rows() < 1) throw ShapeError("period matrix must be square with g >= 1");
    if (!is_symmetric(tau_, kSymmetryTol)) throw DomainError("period matrix is not symmetric");
    const int g = tau_.rows();
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) tau_(i, j) = tau_(j, i) = 0.5 * (tau_(i, j) + tau_(j, i));
    Eigen::MatrixXd y(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) y(i, j) = tau_(i, j).imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y);
    y_min_ = eig.eigenvalues().minCoeff();
    if (!(y_min_ > 0.0)) throw DomainError("imaginary part of the period matrix is not positive definite");
    const Eigen::MatrixXd yi = y.inverse();
    y_inv_ = RMatrix(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) y_inv_(i, j) = yi(i, j);
  }

  static PeriodMatrix from_parts(const RMatrix& re, const RMatrix& im) {
    if (re.rows() != im.rows() || re.cols() != im.cols()) throw ShapeError("real and imaginary parts differ in shape");
    CMatrix t(re.rows(), re.cols());
    for (int i = 0; i < t.rows(); ++i)
      for (int j = 0; j < t.cols(); ++j) t(i, j) = Complex(re(i, j), im(i, j));
    return PeriodMatrix(std::move(t));
  }

  /// diag(a, b) on the product locus H_{g1} x H_{g2}.
  static PeriodMatrix block_diagonal(const PeriodMatrix& a, const PeriodMatrix& b) {
    const int g1 = a.genus();
    const int g = g1 + b.genus();
    CMatrix t(g, g);
    for (int i = 0; i < g1; ++i)
      for (int j = 0; j < g1; ++j) t(i, j) = a.matrix()(i, j);
    for (int i = 0; i < b.genus(); ++i)
      for (int j = 0; j < b.genus(); ++j) t(g1 + i, g1 + j) = b.matrix()(i, j);
    return PeriodMatrix(std::move(t));
  }

  int genus() const noexcept { return tau_.rows(); }
  const CMatrix& matrix() const noexcept { return tau_; }
  const Complex& operator()(int i, int j) const { return tau_(i, j); }
  /// Smallest eigenvalue of Im(tau).
  double y_min() const noexcept { return y_min_; }
  const RMatrix& im_inverse() const noexcept { return y_inv_; }

  PeriodMatrix scaled(double s) const { return PeriodMatrix(tau_ * Complex(s)); }

 private:
  CMatrix tau_;
  double y_min_ = 0.0;
  RMatrix y_inv_;
};

/// Test/CLI sampler: tau = S + i (Q Q^T + y0 I), S symmetric and Q with
/// entries uniform in [-1, 1]. Deterministic for a given engine state.
inline PeriodMatrix sample_period_matrix(int g, std::mt19937_64& rng, double y0 = 0.8) {
  if (g < 1) throw DomainError("sample_period_matrix: g must be positive");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMatrix s(g, g), q(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) s(i, j) = s(j, i) = u(rng);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) q(i, j) = u(rng);
  RMatrix y = q * q.transpose();
  for (int i = 0; i < g; ++i) y(i, i) += y0;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) y(i, j) = y(j, i) = 0.5 * (y(i, j) + y(j, i));
  return PeriodMatrix::from_parts(s, y);
}

inline PeriodMatrix sample_period_matrix(int g, std::uint64_t seed, double y0 = 0.8) {
  std::mt19937_64 rng(seed);
  return sample_period_matrix(g, rng, y0);
}

/// Random point on the product locus diag(tau_1, tau_2), tau_i in H_{g_i}.
inline PeriodMatrix sample_product_period_matrix(int g1, int g2, std::mt19937_64& rng, double y0 = 0.8) {
  auto a = sample_period_matrix(g1, rng, y0);
  auto b = sample_period_matrix(g2, rng, y0);
  return PeriodMatrix::block_diagonal(a, b);
}

}  // namespace thetaforms
