#pragma once

// Theta functions with characteristics
//
//   theta_m(tau, z) = sum_{p in Z^g} exp(pi i [ n^t tau n + 2 n^t (z + delta/2) ]),  n = p + eps/2,
//
// second order theta functions Theta[sigma](tau, z) = theta[sigma, 0](2 tau, 2 z),
// their z-gradients and z-Hessians, and tau-derivatives obtained through the
// heat equation  d^2 theta / dz_i dz_j = 2 pi i (1 + delta_ij) d theta / d tau_ij.
//
// Truncation. With Y = Im tau, y = lambda_min(Y) and c = -Y^{-1} Im z, every
// term satisfies |t_n| <= exp(pi c^t Y c) exp(-pi y |n - c|^2). The sum runs
// over the ball |n - c| <= R. Each omitted lattice point owns a unit cube on
// which the Gaussian is at least its value shifted by h = sqrt(g)/2, so for
// R >= 2h and derivative order k the tail is bounded by
//
//   exp(pi c^t Y c) (2 pi)^k S_g (1 + H/T)^d  (1/2) a^{-(d+1)/2} Gamma((d+1)/2, a T^2)
//
// with a = pi y, T = R - 2h, H = 2h + |c|, d = g - 1 + k and S_g the area
// of the unit sphere. This bound is reported as trunc_bound.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "thetaforms/errors.hpp"
#include "thetaforms/f2char.hpp"
#include "thetaforms/linalg.hpp"
#include "thetaforms/period_matrix.hpp"
#include "thetaforms/symplectic.hpp"

namespace thetaforms {

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

struct ThetaOptions {
  double tol = 1e-12;
  /// Largest admissible summation radius.
  double radius_cap = 40.0;
  /// If positive, sum over exactly this radius instead of the minimal one
  /// meeting tol (the reported bound still refers to the radius used).
  double radius_override = 0.0;
};

template <class V>
struct ThetaEvaluation {
  V value;
  double trunc_bound = 0.0;
  int radius_used = 0;
};

/// Value, z-gradient and z-Hessian of one theta series at one point.
struct ThetaJet {
  Complex value;
  CVector gradient;
  CMatrix hessian;
  /// Truncation bound per derivative order (0, 1, 2), entrywise.
  std::array<double, 3> bounds{};
  double radius = 0.0;
  int radius_used = 0;
};

/// Canonical order of pairs i <= j: (0,0), (0,1), ..., (0,g-1), (1,1), ...
inline std::vector<std::pair<int, int>> sym_pairs(int g) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) out.emplace_back(i, j);
  return out;
}

inline int sym_dim(int g) { return g * (g + 1) / 2; }

namespace detail {

inline double tail_bound(int g, int order, double y_min, double radius, double center_norm,
                         double log_prefactor) {
  const double h = 0.5 * std::sqrt(static_cast<double>(g));
  const double t0 = radius - 2.0 * h;
  if (t0 <= 0.0) return std::numeric_limits<double>::infinity();
  const double a = kPi * y_min;
  const double big_h = 2.0 * h + center_norm;
  const double d = g - 1 + order;
  const double s = 0.5 * (d + 1.0);
  const double x = a * t0 * t0;
  // log of S_g = 2 pi^{g/2} / Gamma(g/2)
  const double log_sphere = std::log(2.0) + 0.5 * g * std::log(kPi) - std::lgamma(0.5 * g);
  const double q = boost::math::gamma_q(s, x);
  if (q == 0.0) return 0.0;
  const double log_bound = log_prefactor + order * std::log(2.0 * kPi) + log_sphere +
                           d * std::log1p(big_h / t0) + std::log(0.5) - s * std::log(a) +
                           std::lgamma(s) + std::log(q);
  return std::exp(log_bound);
}

struct SeriesSetup {
  std::vector<double> center;
  double radius = 0.0;
  std::array<double, 3> bounds{};
};

inline SeriesSetup plan_series(const PeriodMatrix& tau, const CVector& z, int order, const ThetaOptions& opts) {
  const int g = tau.genus();
  SeriesSetup s;
  s.center.assign(static_cast<std::size_t>(g), 0.0);
  double log_pref = 0.0;
  if (!z.empty()) {
    const RMatrix& yi = tau.im_inverse();
    for (int i = 0; i < g; ++i) {
      double ci = 0.0;
      for (int j = 0; j < g; ++j) ci -= yi(i, j) * z[static_cast<std::size_t>(j)].imag();
      s.center[static_cast<std::size_t>(i)] = ci;
    }
    // c^t Y c = Im(z)^t Y^{-1} Im(z) = -Im(z) . c
    for (int i = 0; i < g; ++i) log_pref -= z[static_cast<std::size_t>(i)].imag() * s.center[static_cast<std::size_t>(i)];
    log_pref *= kPi;
  }
  double cnorm = 0.0;
  for (double c : s.center) cnorm += c * c;
  cnorm = std::sqrt(cnorm);

  auto bounds_at = [&](double r) {
    std::array<double, 3> b{};
    for (int k = 0; k <= 2; ++k) b[static_cast<std::size_t>(k)] = tail_bound(g, k, tau.y_min(), r, cnorm, log_pref);
    return b;
  };
  if (opts.radius_override > 0.0) {
    s.radius = opts.radius_override;
    s.bounds = bounds_at(s.radius);
    return s;
  }
  if (!(opts.tol > 0.0)) throw DomainError("theta: tolerance must be positive");
  double r = std::sqrt(static_cast<double>(g)) + 0.25;
  while (true) {
    const auto b = bounds_at(r);
    bool ok = true;
    for (int k = 0; k <= order; ++k) ok = ok && b[static_cast<std::size_t>(k)] <= opts.tol;
    if (ok) {
      s.radius = r;
      s.bounds = b;
      return s;
    }
    r += 0.05;
    if (r > opts.radius_cap)
      throw TruncationError("theta: summation radius exceeds the cap (imaginary part too small, y_min = " +
                            std::to_string(tau.y_min()) + ")");
  }
}

/// Sum of the series with characteristic shift eps/2 and phase delta/2.
inline ThetaJet theta_series_jet(const std::vector<double>& shift, const std::vector<double>& phase,
                                 const PeriodMatrix& tau, const CVector& z, int order, const ThetaOptions& opts) {
  const int g = tau.genus();
  if (static_cast<int>(shift.size()) != g || static_cast<int>(phase.size()) != g)
    throw ShapeError("theta: characteristic length differs from genus");
  if (!z.empty() && static_cast<int>(z.size()) != g) throw ShapeError("theta: z length differs from genus");
  for (const auto& zi : z)
    if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) throw DomainError("theta: z must be finite");

  const SeriesSetup plan = plan_series(tau, z, order, opts);
  const double r2 = plan.radius * plan.radius;
  const CMatrix& t = tau.matrix();

  std::vector<Complex> w(static_cast<std::size_t>(g));  // z + delta/2
  for (int i = 0; i < g; ++i)
    w[static_cast<std::size_t>(i)] = (z.empty() ? Complex(0.0) : z[static_cast<std::size_t>(i)]) + phase[static_cast<std::size_t>(i)];

  std::vector<long> lo(static_cast<std::size_t>(g)), hi(static_cast<std::size_t>(g)), p(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const double c = plan.center[static_cast<std::size_t>(i)] - shift[static_cast<std::size_t>(i)];
    lo[static_cast<std::size_t>(i)] = static_cast<long>(std::ceil(c - plan.radius));
    hi[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(c + plan.radius));
    if (lo[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) lo[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)];
  }
  p = lo;

  Complex sum0 = 0.0;
  CVector sum1(static_cast<std::size_t>(order >= 1 ? g : 0), Complex(0.0));
  CMatrix sum2(order >= 2 ? g : 0, order >= 2 ? g : 0);
  std::vector<double> n(static_cast<std::size_t>(g));

  while (true) {
    double dist2 = 0.0;
    for (int i = 0; i < g; ++i) {
      n[static_cast<std::size_t>(i)] = static_cast<double>(p[static_cast<std::size_t>(i)]) + shift[static_cast<std::size_t>(i)];
      const double d = n[static_cast<std::size_t>(i)] - plan.center[static_cast<std::size_t>(i)];
      dist2 += d * d;
    }
    if (dist2 <= r2) {
      Complex quad = 0.0;
      for (int i = 0; i < g; ++i) {
        Complex row = t(i, i) * n[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < g; ++j) row += 2.0 * t(i, j) * n[static_cast<std::size_t>(j)];
        quad += row * n[static_cast<std::size_t>(i)];
      }
      Complex lin = 0.0;
      for (int i = 0; i < g; ++i) lin += n[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
      const Complex term = std::exp(kI * kPi * (quad + 2.0 * lin));
      sum0 += term;
      if (order >= 1)
        for (int i = 0; i < g; ++i) sum1[static_cast<std::size_t>(i)] += n[static_cast<std::size_t>(i)] * term;
      if (order >= 2)
        for (int i = 0; i < g; ++i)
          for (int j = i; j < g; ++j) sum2(i, j) += (n[static_cast<std::size_t>(i)] * n[static_cast<std::size_t>(j)]) * term;
    }
    int k = g - 1;
    while (k >= 0 && p[static_cast<std::size_t>(k)] == hi[static_cast<std::size_t>(k)]) {
      p[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)];
      --k;
    }
    if (k < 0) break;
    ++p[static_cast<std::size_t>(k)];
  }

  ThetaJet jet;
  jet.value = sum0;
  jet.radius = plan.radius;
  jet.radius_used = static_cast<int>(std::ceil(plan.radius));
  jet.bounds = plan.bounds;
  const Complex two_pi_i = 2.0 * kPi * kI;
  if (order >= 1) {
    jet.gradient = sum1;
    for (auto& x : jet.gradient) x *= two_pi_i;
  }
  if (order >= 2) {
    jet.hessian = CMatrix(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = i; j < g; ++j) jet.hessian(i, j) = jet.hessian(j, i) = two_pi_i * two_pi_i * sum2(i, j);
  }
  return jet;
}

inline std::vector<double> half_vector(const F2Vector& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = 0.5 * v[i];
  return out;
}

/// Runs fn(k) for k in [0, count) on up to `threads` workers. Each index is
/// handled by exactly one call, so results stored per index do not depend on
/// the split.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int k = w; k < count; k += workers) fn(k);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Full jet (value, gradient, Hessian up to `order`) of theta_m at (tau, z).
inline ThetaJet theta_jet(const Characteristic& m, const PeriodMatrix& tau, const CVector& z, int order,
                          const ThetaOptions& opts = {}) {
  if (m.genus() != tau.genus()) throw ShapeError("theta: characteristic genus differs from tau");
  if (order < 0 || order > 2) throw DomainError("theta_jet: order must be 0, 1 or 2");
  return detail::theta_series_jet(detail::half_vector(m.eps()), detail::half_vector(m.delta()), tau, z, order, opts);
}

inline ThetaEvaluation<Complex> theta(const Characteristic& m, const PeriodMatrix& tau, const CVector& z = {},
                                      const ThetaOptions& opts = {}) {
  const ThetaJet j = theta_jet(m, tau, z, 0, opts);
  return {j.value, j.bounds[0], j.radius_used};
}

/// v_m(tau) = grad_z theta_m(tau, z) at z = 0. Even characteristics are
/// rejected unless allow_even is set (their gradient vanishes identically).
inline ThetaEvaluation<CVector> theta_gradient(const Characteristic& m, const PeriodMatrix& tau,
                                               const ThetaOptions& opts = {}, bool allow_even = false) {
  if (m.is_even() && !allow_even) throw ParityError("theta_gradient: characteristic " + m.str() + " is even");
  const ThetaJet j = theta_jet(m, tau, {}, 1, opts);
  return {j.gradient, j.bounds[1], j.radius_used};
}

inline ThetaEvaluation<CMatrix> theta_hessian_z(const Characteristic& m, const PeriodMatrix& tau,
                                                const ThetaOptions& opts = {}, const CVector& z = {}) {
  const ThetaJet j = theta_jet(m, tau, z, 2, opts);
  return {j.hessian, j.bounds[2], j.radius_used};
}

/// Converts a z-Hessian into d/d tau_ij through the heat equation.
inline CMatrix heat_tau_derivatives(const CMatrix& hessian) {
  const int g = hessian.rows();
  CMatrix d(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) d(i, j) = hessian(i, j) / (2.0 * kPi * kI * (i == j ? 2.0 : 1.0));
  return d;
}

/// d theta_m / d tau_ij at z (symmetric matrix; tau_ij = tau_ji is one variable).
inline ThetaEvaluation<CMatrix> theta_tau_derivatives(const Characteristic& m, const PeriodMatrix& tau,
                                                      const ThetaOptions& opts = {}, const CVector& z = {}) {
  const ThetaJet j = theta_jet(m, tau, z, 2, opts);
  return {heat_tau_derivatives(j.hessian), j.bounds[2] / (2.0 * kPi), j.radius_used};
}

/// d f / d tau_ij of a holomorphic function of tau by the trapezoidal rule on
/// a circle |w| = r in the single variable tau_ij (= tau_ji). For entire f the
/// aliasing error decays like r^K times the K-th Taylor coefficient.
template <class Fn>
Complex contour_tau_derivative(Fn&& f, const PeriodMatrix& tau, int i, int j, double r = 0.05, int nodes = 16) {
  Complex acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const Complex w = r * std::exp(2.0 * kPi * kI * (static_cast<double>(k) / nodes));
    CMatrix t = tau.matrix();
    t(i, j) += w;
    if (i != j) t(j, i) += w;
    acc += f(PeriodMatrix(std::move(t))) / w;
  }
  return acc / static_cast<double>(nodes);
}

// Second order theta functions ----------------------------------------------

/// Theta[sigma](tau, z) = theta[sigma, 0](2 tau, 2 z).
inline ThetaEvaluation<Complex> second_order_theta(const F2Vector& sigma, const PeriodMatrix& tau, const CVector& z = {},
                                                   const ThetaOptions& opts = {}) {
  CVector z2;
  for (const auto& x : z) z2.push_back(2.0 * x);
  return theta(Characteristic(sigma, F2Vector(sigma.size())), tau.scaled(2.0), z2, opts);
}

/// Theta[sigma](tau) with its z-Hessian and tau-derivatives at z = 0.
struct SecondOrderJet {
  F2Vector sigma;
  Complex value;
  /// d^2 Theta[sigma](tau, z) / dz_i dz_j at z = 0.
  CMatrix hessian_z;
  /// d Theta[sigma](tau) / d tau_ij, via the heat equation.
  CMatrix tau_derivatives;
  double trunc_bound = 0.0;
  int radius_used = 0;
};

inline SecondOrderJet second_order_jet(const F2Vector& sigma, const PeriodMatrix& tau, const ThetaOptions& opts = {}) {
  ThetaOptions inner = opts;
  inner.tol = opts.tol / 4.0;  // the z-Hessian of Theta is 4 times that of theta(2 tau, .)
  const ThetaJet j = detail::theta_series_jet(detail::half_vector(sigma), std::vector<double>(static_cast<std::size_t>(sigma.size()), 0.0),
                                              tau.scaled(2.0), {}, 2, inner);
  SecondOrderJet out;
  out.sigma = sigma;
  out.value = j.value;
  out.hessian_z = j.hessian * Complex(4.0);
  // d/dtau Theta(tau) = 2 (d/dtau' theta)(2 tau) = 2 H / (2 pi i (1 + delta_ij))
  out.tau_derivatives = heat_tau_derivatives(j.hessian) * Complex(2.0);
  out.trunc_bound = 4.0 * std::max({j.bounds[0], j.bounds[1], j.bounds[2]});
  out.radius_used = j.radius_used;
  return out;
}

/// All 2^g second order jets in canonical sigma order.
inline std::vector<SecondOrderJet> second_order_jets(const PeriodMatrix& tau, const ThetaOptions& opts = {}, int threads = 1) {
  const auto sigmas = all_f2_vectors(tau.genus());
  std::vector<SecondOrderJet> out(sigmas.size());
  detail::parallel_for(static_cast<int>(sigmas.size()), threads,
                       [&](int k) { out[static_cast<std::size_t>(k)] = second_order_jet(sigmas[static_cast<std::size_t>(k)], tau, opts); });
  return out;
}

struct SecondOrderConstantVector {
  std::vector<Complex> values;
  double trunc_bound = 0.0;
};

inline SecondOrderConstantVector second_order_constants(const PeriodMatrix& tau, const ThetaOptions& opts = {}) {
  SecondOrderConstantVector out;
  for (const auto& s : all_f2_vectors(tau.genus())) {
    const auto e = second_order_theta(s, tau, {}, opts);
    out.values.push_back(e.value);
    out.trunc_bound = std::max(out.trunc_bound, e.trunc_bound);
  }
  return out;
}

/// N x 2^g matrix: row (i,j) in sym_pairs order, column sigma, entry
/// d Theta[sigma] / d tau_ij.
inline CMatrix second_order_tau_derivatives(const PeriodMatrix& tau, const ThetaOptions& opts = {}) {
  const int g = tau.genus();
  const auto jets = second_order_jets(tau, opts);
  const auto pairs = sym_pairs(g);
  CMatrix out(static_cast<int>(pairs.size()), static_cast<int>(jets.size()));
  for (std::size_t c = 0; c < jets.size(); ++c)
    for (std::size_t r = 0; r < pairs.size(); ++r)
      out(static_cast<int>(r), static_cast<int>(c)) = jets[c].tau_derivatives(pairs[r].first, pairs[r].second);
  return out;
}

// Identity checks -------------------------------------------------------------

/// Absolute residual together with the magnitude of the compared sides.
struct Residual {
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

inline Residual compare(Complex lhs, Complex rhs) {
  return {std::abs(lhs - rhs), std::max(std::abs(lhs), std::abs(rhs))};
}

inline Residual compare(const CMatrix& lhs, const CMatrix& rhs) {
  return {max_abs_diff(lhs, rhs), std::max(max_abs(lhs), max_abs(rhs))};
}

inline Residual worst(Residual a, Residual b) { return a.relative() >= b.relative() ? a : b; }

/// Riemann's bilinear relation
///   theta[eps;delta](tau,z)^2 = (-1)^{eps.delta} sum_sigma (-1)^{sigma.delta} Theta[sigma+eps](tau,z) Theta[sigma](tau,0).
/// The sign (-1)^{eps.delta} is +1 for even characteristics.
inline Residual riemann_bilinear_check(const F2Vector& eps, const F2Vector& delta, const PeriodMatrix& tau,
                                       const CVector& z = {}, const ThetaOptions& opts = {}) {
  const Characteristic m(eps, delta);
  const Complex t = theta(m, tau, z, opts).value;
  const Complex lhs = t * t;
  Complex rhs = 0.0;
  for (const auto& s : all_f2_vectors(tau.genus())) {
    const Complex a = second_order_theta(s + eps, tau, z, opts).value;
    const Complex b = second_order_theta(s, tau, {}, opts).value;
    rhs += static_cast<double>(sign_power(dot(s, delta))) * a * b;
  }
  rhs *= static_cast<double>(sign_power(dot(eps, delta)));
  return compare(lhs, rhs);
}

/// Theta[alpha] Theta[alpha+eps] = 2^{-g} sum_sigma (-1)^{alpha.sigma} theta[eps;sigma](tau)^2.
inline Residual addition_relation_check(const F2Vector& alpha, const F2Vector& eps, const PeriodMatrix& tau,
                                        const ThetaOptions& opts = {}) {
  const int g = tau.genus();
  const Complex lhs = second_order_theta(alpha, tau, {}, opts).value * second_order_theta(alpha + eps, tau, {}, opts).value;
  Complex rhs = 0.0;
  for (const auto& s : all_f2_vectors(g)) {
    const Complex t = theta(Characteristic(eps, s), tau, {}, opts).value;
    rhs += static_cast<double>(sign_power(dot(alpha, s))) * t * t;
  }
  rhs /= std::ldexp(1.0, g);
  return compare(lhs, rhs);
}

/// Heat equation for theta_m at (tau, z): the z-Hessian against d/d tau_ij
/// computed independently by contour integration of theta_m in tau_ij.
/// At z = 0 odd characteristics compare two vanishing sides.
inline Residual heat_equation_check(const Characteristic& m, const PeriodMatrix& tau, const ThetaOptions& opts = {},
                                    const CVector& z = {}) {
  const int g = tau.genus();
  const CMatrix hess = theta_hessian_z(m, tau, opts, z).value;
  CMatrix lhs(g, g), rhs(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) {
      const Complex d = contour_tau_derivative([&](const PeriodMatrix& t) { return theta(m, t, z, opts).value; }, tau, i, j);
      lhs(i, j) = hess(i, j);
      rhs(i, j) = 2.0 * kPi * kI * (i == j ? 2.0 : 1.0) * d;
    }
  return compare(lhs, rhs);
}

enum class TransformationKind { characteristic_weight_half, second_order, second_order_squared };

struct TransformationReport {
  TransformationKind kind{};
  /// max over evaluated entries of | |f(gamma tau)| - |det(C tau + D)|^{1/2} |f(tau)| | / scale.
  double modulus_residual = 0.0;
  /// characteristic_weight_half: |rho^4 - 1| with rho = theta(gamma tau)^2 / (e^{4 pi i phi} det theta(tau)^2).
  /// second_order: distance of the common ratio from {+1, -1}.
  /// second_order_squared: max |ratio - 1|.
  double root_of_unity_residual = 0.0;
  /// second_order kinds: max |ratio_sigma - ratio_0| (sigma-independence).
  double spread = 0.0;
  std::vector<Complex> ratios;
};

/// Transformation behaviour of theta constants under gamma.
///  characteristic_weight_half: gamma in Gamma_g(2), m even.
///  second_order:               gamma in Gamma_g(2,4), all sigma.
///  second_order_squared:       gamma in Gamma_g^*(2,4), all sigma.
/// No branch of det(C tau + D)^{1/2} is ever chosen: only squares and moduli
/// are compared.
inline TransformationReport transformation_check(const SymplecticElement& gamma, const PeriodMatrix& tau,
                                                 TransformationKind kind, const std::optional<Characteristic>& m = std::nullopt,
                                                 const ThetaOptions& opts = {}) {
  TransformationReport rep;
  rep.kind = kind;
  const PeriodMatrix moved = act(gamma, tau);
  const Complex j = automorphy_determinant(gamma, tau);
  if (kind == TransformationKind::characteristic_weight_half) {
    if (!membership(gamma, SubgroupTag::principal(2))) throw DomainError("transformation_check: gamma not in Gamma_g(2)");
    if (!m) throw DomainError("transformation_check: characteristic required");
    if (m->is_odd()) throw ParityError("transformation_check: odd theta constants vanish identically");
    const Complex a = theta(*m, moved, {}, opts).value;
    const Complex b = theta(*m, tau, {}, opts).value;
    const double rhs_mod = std::sqrt(std::abs(j)) * std::abs(b);
    rep.modulus_residual = std::abs(std::abs(a) - rhs_mod) / std::max(std::abs(a), rhs_mod);
    const double phi = phi_m(gamma, *m).to_double();
    const Complex rho = a * a / (std::exp(4.0 * kPi * kI * phi) * j * b * b);
    rep.ratios = {rho};
    rep.root_of_unity_residual = std::abs(std::pow(rho, 4) - 1.0);
    return rep;
  }
  const SubgroupTag need = kind == TransformationKind::second_order ? SubgroupTag::theta(2) : SubgroupTag::theta_star24();
  if (!membership(gamma, need)) throw DomainError("transformation_check: gamma not in " + need.name());
  const auto sigmas = all_f2_vectors(tau.genus());
  for (const auto& s : sigmas) {
    const Complex a = second_order_theta(s, moved, {}, opts).value;
    const Complex b = second_order_theta(s, tau, {}, opts).value;
    const double rhs_mod = std::sqrt(std::abs(j)) * std::abs(b);
    rep.modulus_residual = std::max(rep.modulus_residual, std::abs(std::abs(a) - rhs_mod) / std::max(std::abs(a), rhs_mod));
    rep.ratios.push_back(a * a / (j * b * b));
  }
  for (const auto& r : rep.ratios) rep.spread = std::max(rep.spread, std::abs(r - rep.ratios.front()));
  for (const auto& r : rep.ratios) {
    const double d = kind == TransformationKind::second_order ? std::min(std::abs(r - 1.0), std::abs(r + 1.0)) : std::abs(r - 1.0);
    rep.root_of_unity_residual = std::max(rep.root_of_unity_residual, d);
  }
  return rep;
}

}  // namespace thetaforms
