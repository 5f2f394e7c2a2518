#pragma once

// Vector-valued modular forms built from theta gradients and second order
// theta constants.
//
// Conventions used throughout:
//   v_m            grad_z theta_m(tau, 0)
//   C_{eps,delta}  2 v v^t for an odd characteristic [eps, delta]
//   H_sigma        d^2 Theta[sigma] / dz_i dz_j at z = 0
//   A_{eps,delta}  H_delta Theta[eps] - H_eps Theta[delta]
//   d_ij           (1 + delta_ij)/2 d/d tau_ij, so that d Theta = H / (8 pi i)
//
// With these definitions A = -2 * 4 pi i Theta[delta]^2 d(Theta[eps]/Theta[delta])
// and adj(A/2) = ((4 pi i)^{g-1}/(g-1)!) B, B the pairing of Theta[eps]^{g-1}
// with Theta[delta]^{g-1}.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "thetaforms/f2char.hpp"
#include "thetaforms/linalg.hpp"
#include "thetaforms/theta.hpp"

namespace thetaforms {

// Symmetric pair indexing -------------------------------------------------------

/// (i, j), 1 <= i <= j <= g, with its position in (1,1),(1,2),...,(1,g),(2,2),...,(g,g).
struct SymPairIndex {
  int i = 1;
  int j = 1;

  /// 0-based position in the canonical order.
  int position(int g) const {
    if (i < 1 || j < i || j > g) throw ShapeError("SymPairIndex out of range");
    return (i - 1) * g - (i - 1) * (i - 2) / 2 + (j - i);
  }

  static SymPairIndex at(int position, int g) {
    for (int i = 1; i <= g; ++i) {
      const int row = g - i + 1;
      if (position < row) return {i, i + position};
      position -= row;
    }
    throw ShapeError("SymPairIndex position out of range");
  }
};

/// Length-N column of the upper triangle in canonical order.
inline CVector flatten(const CMatrix& m) {
  const int g = m.rows();
  CVector out;
  out.reserve(static_cast<std::size_t>(sym_dim(g)));
  for (const auto& [i, j] : sym_pairs(g)) out.push_back(m(i, j));
  return out;
}

inline CMatrix unflatten(const CVector& v, int g) {
  if (static_cast<int>(v.size()) != sym_dim(g)) throw ShapeError("unflatten: length is not g(g+1)/2");
  CMatrix m(g, g);
  std::size_t k = 0;
  for (const auto& [i, j] : sym_pairs(g)) {
    m(i, j) = m(j, i) = v[k++];
  }
  return m;
}

// Evaluation context --------------------------------------------------------------

/// Theta data at one tau shared by all constructions: the 2^g second order
/// jets and the gradients of all odd thetas. Immutable after construction.
class ThetaContext {
 public:
  explicit ThetaContext(PeriodMatrix tau, ThetaOptions opts = {}, int threads = 1)
      : tau_(std::move(tau)), opts_(opts), jets_(second_order_jets(tau_, opts_, threads)) {
    for (const auto& j : jets_) bound_ = std::max(bound_, j.trunc_bound);
    const auto odd = enumerate_characteristics(tau_.genus(), ParityFilter::odd);
    std::vector<ThetaEvaluation<CVector>> grads(odd.size());
    detail::parallel_for(static_cast<int>(odd.size()), threads, [&](int k) {
      grads[static_cast<std::size_t>(k)] = theta_gradient(odd[static_cast<std::size_t>(k)], tau_, opts_);
    });
    for (std::size_t k = 0; k < odd.size(); ++k) {
      bound_ = std::max(bound_, grads[k].trunc_bound);
      gradients_.emplace(odd[k].index(), std::move(grads[k].value));
    }
  }

  const PeriodMatrix& tau() const noexcept { return tau_; }
  int genus() const noexcept { return tau_.genus(); }
  const ThetaOptions& options() const noexcept { return opts_; }
  /// Largest truncation bound among the cached evaluations.
  double trunc_bound() const noexcept { return bound_; }

  const SecondOrderJet& jet(const F2Vector& sigma) const {
    if (sigma.size() != genus()) throw ShapeError("ThetaContext: sigma length differs from genus");
    return jets_[static_cast<std::size_t>(sigma.index())];
  }
  const std::vector<SecondOrderJet>& jets() const noexcept { return jets_; }

  /// d_ij Theta[sigma] = H_ij / (8 pi i).
  CMatrix d_matrix(const F2Vector& sigma) const { return jet(sigma).hessian_z * (1.0 / (8.0 * kPi * kI)); }

  const CVector& gradient(const Characteristic& m) const {
    if (m.genus() != genus()) throw ShapeError("ThetaContext: characteristic genus differs");
    if (!m.is_odd()) throw ParityError("gradient requested for even characteristic " + m.str());
    return gradients_.at(m.index());
  }

 private:
  PeriodMatrix tau_;
  ThetaOptions opts_;
  std::vector<SecondOrderJet> jets_;
  std::map<std::uint64_t, CVector> gradients_;
  double bound_ = 0.0;
};

// C and A -----------------------------------------------------------------------

inline CMatrix C_matrix(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const Characteristic m(eps, delta);
  if (!m.is_odd()) throw ParityError("C_matrix: characteristic " + m.str() + " is even");
  const CVector& v = ctx.gradient(m);
  const int g = ctx.genus();
  CMatrix c(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) c(i, j) = 2.0 * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return c;
}

inline CMatrix C_matrix(const F2Vector& eps, const F2Vector& delta, const PeriodMatrix& tau, const ThetaOptions& opts = {}) {
  const Characteristic m(eps, delta);
  if (!m.is_odd()) throw ParityError("C_matrix: characteristic " + m.str() + " is even");
  const CVector v = theta_gradient(m, tau, opts).value;
  const int g = tau.genus();
  CMatrix c(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) c(i, j) = 2.0 * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return c;
}

inline CMatrix A_matrix(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const auto& je = ctx.jet(eps);
  const auto& jd = ctx.jet(delta);
  return jd.hessian_z * je.value - je.hessian_z * jd.value;
}

inline CMatrix A_matrix(const F2Vector& eps, const F2Vector& delta, const PeriodMatrix& tau, const ThetaOptions& opts = {}) {
  return A_matrix(ThetaContext(tau, opts), eps, delta);
}

/// 4 pi i Theta[delta]^2 d(Theta[eps]/Theta[delta]) = 4 pi i (Theta[delta] d Theta[eps] - Theta[eps] d Theta[delta]).
inline CMatrix quotient_form(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const Complex te = ctx.jet(eps).value, td = ctx.jet(delta).value;
  return (ctx.d_matrix(eps) * td - ctx.d_matrix(delta) * te) * (4.0 * kPi * kI);
}

struct ConversionReport {
  /// C_{eps,delta} = 1/2 sum_alpha (-1)^{alpha.delta} A_{eps+alpha, alpha}, over odd [eps, delta].
  double c_from_a = 0.0;
  /// A_{eps+alpha, alpha} = 2^{1-g} sum_{[eps,delta] odd} (-1)^{alpha.delta} C_{eps,delta}, over all eps, alpha.
  double a_from_c = 0.0;
  int identities = 0;
  double worst() const { return std::max(c_from_a, a_from_c); }
};

/// Maximal relative residuals of both conversion identities at tau.
inline ConversionReport conversion_identities_check(const ThetaContext& ctx) {
  const int g = ctx.genus();
  if (g > 3) throw SizeLimitError("conversion_identities_check: g must be at most 3");
  const auto vecs = all_f2_vectors(g);
  ConversionReport rep;
  for (const auto& e : vecs)
    for (const auto& d : vecs) {
      if (dot(e, d) == 0) continue;
      CMatrix rhs(g, g);
      for (const auto& a : vecs) rhs += A_matrix(ctx, e + a, a) * Complex(0.5 * sign_power(dot(a, d)));
      rep.c_from_a = std::max(rep.c_from_a, compare(C_matrix(ctx, e, d), rhs).relative());
      ++rep.identities;
    }
  const double w = std::ldexp(1.0, 1 - g);
  for (const auto& e : vecs)
    for (const auto& a : vecs) {
      CMatrix rhs(g, g);
      for (const auto& d : vecs)
        if (dot(e, d) == 1) rhs += C_matrix(ctx, e, d) * Complex(w * sign_power(dot(a, d)));
      rep.a_from_c = std::max(rep.a_from_c, compare(A_matrix(ctx, e + a, a), rhs).relative());
      ++rep.identities;
    }
  return rep;
}

// Decomposability -----------------------------------------------------------------

/// (N+1) x 2^g: row 0 the second order constants, row 1 + p the derivatives
/// d Theta[sigma] / d tau_ij for the p-th symmetric pair.
inline CMatrix M_matrix(const ThetaContext& ctx) {
  const int g = ctx.genus();
  if (g > 4) throw SizeLimitError("M_matrix: g must be at most 4");
  const auto pairs = sym_pairs(g);
  const auto& jets = ctx.jets();
  CMatrix m(static_cast<int>(pairs.size()) + 1, static_cast<int>(jets.size()));
  for (std::size_t c = 0; c < jets.size(); ++c) {
    m(0, static_cast<int>(c)) = jets[c].value;
    for (std::size_t r = 0; r < pairs.size(); ++r)
      m(static_cast<int>(r) + 1, static_cast<int>(c)) = jets[c].tau_derivatives(pairs[r].first, pairs[r].second);
  }
  return m;
}

/// Unordered pairs alpha < beta (canonical index order) labelling the columns of bold_A_matrix.
inline std::vector<std::pair<F2Vector, F2Vector>> bold_A_columns(int g) {
  const auto vecs = all_f2_vectors(g);
  std::vector<std::pair<F2Vector, F2Vector>> out;
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = a + 1; b < vecs.size(); ++b) out.emplace_back(vecs[a], vecs[b]);
  return out;
}

/// N x 2^g(2^g - 1)/2 matrix whose columns are the flattened A_{alpha,beta}.
inline CMatrix bold_A_matrix(const ThetaContext& ctx) {
  const int g = ctx.genus();
  if (g > 3) throw SizeLimitError("bold_A_matrix: g must be at most 3");
  const auto cols = bold_A_columns(g);
  CMatrix out(sym_dim(g), static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const CVector v = flatten(A_matrix(ctx, cols[c].first, cols[c].second));
    for (std::size_t r = 0; r < v.size(); ++r) out(static_cast<int>(r), static_cast<int>(c)) = v[r];
  }
  return out;
}

/// #odd x N matrix; row m is (C_ii, 2 C_ij for i < j) so that row . q = tr(B_q C_m)
/// for the symmetric matrix B_q with entries q.
inline CMatrix bold_C_matrix(const ThetaContext& ctx) {
  const int g = ctx.genus();
  const auto odd = enumerate_characteristics(g, ParityFilter::odd);
  const auto pairs = sym_pairs(g);
  CMatrix out(static_cast<int>(odd.size()), static_cast<int>(pairs.size()));
  for (std::size_t r = 0; r < odd.size(); ++r) {
    const CMatrix c = C_matrix(ctx, odd[r].eps(), odd[r].delta());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      out(static_cast<int>(r), static_cast<int>(p)) = c(i, j) * (i == j ? 1.0 : 2.0);
    }
  }
  return out;
}

enum class Verdict { decomposable_suspect, indecomposable };

inline const char* to_string(Verdict v) {
  return v == Verdict::indecomposable ? "indecomposable" : "decomposable_suspect";
}

struct QuadricResult {
  Verdict verdict = Verdict::indecomposable;
  int rank = 0;
  std::vector<double> singular_values;
  /// Symmetric B with tr(B C_m) = 0 for every odd m, scaled so that its largest
  /// entry has modulus 1. Present iff the verdict is decomposable_suspect.
  std::optional<CMatrix> witness;
};

/// The Gauss images of the odd two-torsion points lie on a common quadric iff
/// the stacked C_m have rank < N.
inline QuadricResult quadric_criterion(const ThetaContext& ctx, double rel_tol = 1e-8) {
  const int g = ctx.genus();
  if (g < 2) throw DomainError("quadric_criterion: g must be at least 2");
  const CMatrix c = bold_C_matrix(ctx);
  QuadricResult res;
  res.singular_values = singular_values(c);
  res.rank = numerical_rank(c, rel_tol);
  if (res.rank == sym_dim(g)) return res;
  res.verdict = Verdict::decomposable_suspect;
  const CMatrix ns = null_space(c, rel_tol);
  CVector q(static_cast<std::size_t>(ns.rows()));
  for (int r = 0; r < ns.rows(); ++r) q[static_cast<std::size_t>(r)] = ns(r, 0);
  CMatrix b = unflatten(q, g);
  const double s = max_abs(b);
  Complex phase = 1.0;
  for (const auto& x : b.data())
    if (std::abs(x) == s) {
      phase = x / s;
      break;
    }
  res.witness = b * (1.0 / phase);
  return res;
}

// Wedge forms -------------------------------------------------------------------------

/// F(m_1, ..., m_{g-1}): F_i = (-1)^{i+1} times the minor of the g x (g-1)
/// gradient matrix without row i (1-based i).
inline CVector wedge_F(const ThetaContext& ctx, const std::vector<Characteristic>& ms) {
  const int g = ctx.genus();
  if (g < 2) throw DomainError("wedge_F: g must be at least 2");
  if (static_cast<int>(ms.size()) != g - 1) throw ShapeError("wedge_F: need g - 1 characteristics");
  for (std::size_t a = 0; a < ms.size(); ++a) {
    if (!ms[a].is_odd()) throw DomainError("wedge_F: characteristic " + ms[a].str() + " is even");
    for (std::size_t b = a + 1; b < ms.size(); ++b)
      if (ms[a] == ms[b]) throw DomainError("wedge_F: repeated characteristic " + ms[a].str());
  }
  CMatrix grads(g, g - 1);
  for (int c = 0; c < g - 1; ++c) {
    const CVector& v = ctx.gradient(ms[static_cast<std::size_t>(c)]);
    for (int r = 0; r < g; ++r) grads(r, c) = v[static_cast<std::size_t>(r)];
  }
  std::vector<int> all_cols(static_cast<std::size_t>(g - 1));
  std::iota(all_cols.begin(), all_cols.end(), 0);
  CVector f(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    std::vector<int> rows;
    for (int r = 0; r < g; ++r)
      if (r != i) rows.push_back(r);
    f[static_cast<std::size_t>(i)] = static_cast<double>(sign_power(i)) * det(submatrix(grads, rows, all_cols));
  }
  return f;
}

/// W(M) = pi^{-2g+2} F F^t.
inline CMatrix wedge_form_W(const ThetaContext& ctx, const std::vector<Characteristic>& ms) {
  const int g = ctx.genus();
  const CVector f = wedge_F(ctx, ms);
  const double s = std::pow(kPi, -2.0 * g + 2.0);
  CMatrix w(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) w(i, j) = s * f[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(j)];
  return w;
}

// Pairing ---------------------------------------------------------------------------------

/// B(tau)_{ij} of the pairing {f, h} for f = a^n, h = b^n with scalar theta
/// values a, b and first derivative matrices P = d a, Q = d b, using
/// |d^I_J| a^n = n!/(n-k)! a^{n-k} |P^I_J| (k = |I|).
/// n = g - 1 gives the forms of the pairing; other n evaluate the same
/// bilinear expression for the powers a^n, b^n.
inline CMatrix freitag_pairing(Complex a, const CMatrix& p, Complex b, const CMatrix& q, int n) {
  const int g = p.rows();
  if (g < 1 || !p.is_square() || q.rows() != g || !q.is_square()) throw ShapeError("freitag_pairing: bad shapes");
  auto falling = [](int top, int k) {
    double r = 1.0;
    for (int t = 0; t < k; ++t) r *= top - t;
    return r;
  };
  auto power = [](Complex x, int e) { return e >= 0 ? std::pow(x, e) : Complex(0.0); };
  CMatrix out(g, g);
  for (int i = 1; i <= g; ++i)
    for (int j = 1; j <= g; ++j) {
      std::vector<int> gi, gj;
      for (int x = 1; x <= g; ++x) {
        if (x != i) gi.push_back(x);
        if (x != j) gj.push_back(x);
      }
      Complex total = 0.0;
      for (int k = 0; k <= g - 1; ++k) {
        // |d^I_J| a^n needs k <= n, |d^{I^c}_{J^c}| b^n needs g - 1 - k <= n
        if (k > n || g - 1 - k > n) continue;
        const double coef = sign_power(k) / std::tgamma(g) * std::tgamma(k + 1) * std::tgamma(g - k);  // (-1)^k / binom(g-1,k)
        const Complex fa = falling(n, k) * power(a, n - k);
        const Complex hb = falling(n, g - 1 - k) * power(b, n - (g - 1 - k));
        for (const auto& ii : ordered_subsets(gi, k)) {
          const auto ic = complement_in(gi, ii);
          const int si = subset_sign(g, i, ii);
          for (const auto& jj : ordered_subsets(gj, k)) {
            const auto jc = complement_in(gj, jj);
            const int sj = subset_sign(g, j, jj);
            total += static_cast<double>(si * sj) * coef * fa * minor_det(p, ii, jj) * hb * minor_det(q, ic, jc);
          }
        }
      }
      out(i - 1, j - 1) = static_cast<double>(sign_power(i + j)) * total;
    }
  return out;
}

/// B_{eps,delta}: the pairing {Theta[eps]^{g-1}, Theta[delta]^{g-1}}.
inline CMatrix freitag_pairing(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const int g = ctx.genus();
  return freitag_pairing(ctx.jet(eps).value, ctx.d_matrix(eps), ctx.jet(delta).value, ctx.d_matrix(delta), g - 1);
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

/// adj(A/2) against ((4 pi i)^{g-1}/(g-1)!) B; maximal entry residual
/// relative to the larger side.
inline Residual adjugate_theorem_check(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const int g = ctx.genus();
  if (g < 2) throw DomainError("adjugate_theorem_check: g must be at least 2");
  if (eps == delta) throw DomainError("adjugate_theorem_check: eps must differ from delta");
  const CMatrix lhs = adjugate(A_matrix(ctx, eps, delta) * Complex(0.5));
  const CMatrix rhs = freitag_pairing(ctx, eps, delta) * (std::pow(4.0 * kPi * kI, g - 1) / factorial(g - 1));
  return compare(lhs, rhs);
}

/// (pi^2/2^{g-2})^{g-1} sum over sets {alpha_1, ..., alpha_{g-1}} of distinct
/// alpha with [eps+delta, alpha] odd of (-1)^{delta.(alpha_1+...)} W.
inline CMatrix adjugate_W_sum(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const int g = ctx.genus();
  const F2Vector ed = eps + delta;
  std::vector<F2Vector> admissible;
  for (const auto& a : all_f2_vectors(g))
    if (dot(ed, a) == 1) admissible.push_back(a);
  CMatrix sum(g, g);
  std::vector<int> ground(admissible.size());
  std::iota(ground.begin(), ground.end(), 0);
  for (const auto& pick : ordered_subsets(ground, g - 1)) {
    std::vector<Characteristic> ms;
    F2Vector total(g);
    for (int k : pick) {
      ms.emplace_back(ed, admissible[static_cast<std::size_t>(k)]);
      total = total + admissible[static_cast<std::size_t>(k)];
    }
    sum += wedge_form_W(ctx, ms) * Complex(sign_power(dot(delta, total)));
  }
  return sum * Complex(std::pow(kPi * kPi / std::ldexp(1.0, g - 2), g - 1));
}

inline Residual adjugate_W_identity_check(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  const int g = ctx.genus();
  if (g < 2 || g > 3) throw DomainError("adjugate_W_identity_check: g must be 2 or 3");
  if (eps == delta) throw DomainError("adjugate_W_identity_check: eps must differ from delta");
  return compare(adjugate(A_matrix(ctx, eps, delta)), adjugate_W_sum(ctx, eps, delta));
}

struct DetWeightReport {
  /// max over taus of |det A(tau)| / (max entry of A)^g.
  double max_relative_det = 0.0;
  bool nonvanishing = false;
  /// max over (tau, gamma) of | |det A(gamma tau)| - |det(C tau + D)|^{g+2} |det A(tau)| | / larger side.
  double weight_residual = 0.0;
};

inline Complex det_A(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  return det(A_matrix(ctx, eps, delta));
}

inline DetWeightReport det_A_weight_check(const F2Vector& eps, const F2Vector& delta, const std::vector<PeriodMatrix>& taus,
                                          const std::vector<SymplecticElement>& gammas, const ThetaOptions& opts = {},
                                          double nonvanishing_threshold = 1e-6) {
  if (eps == delta) throw DomainError("det_A_weight_check: eps must differ from delta");
  DetWeightReport rep;
  for (const auto& gamma : gammas)
    if (!membership(gamma, SubgroupTag::theta_star24())) throw DomainError("det_A_weight_check: gamma not in Gamma*(2,4)");
  for (const auto& tau : taus) {
    const ThetaContext ctx(tau, opts);
    const CMatrix a = A_matrix(ctx, eps, delta);
    const int g = tau.genus();
    const double scale = std::pow(max_abs(a), g);
    const double d = std::abs(det(a));
    if (scale > 0.0) rep.max_relative_det = std::max(rep.max_relative_det, d / scale);
    for (const auto& gamma : gammas) {
      const double moved = std::abs(det_A(ThetaContext(act(gamma, tau), opts), eps, delta));
      const double expected = std::pow(std::abs(automorphy_determinant(gamma, tau)), g + 2) * d;
      const double big = std::max(moved, expected);
      if (big > 0.0) rep.weight_residual = std::max(rep.weight_residual, std::abs(moved - expected) / big);
    }
  }
  rep.nonvanishing = rep.max_relative_det > nonvanishing_threshold;
  return rep;
}

/// Coefficients of omega = tr(adj(A) d tau-check) in the basis d tau-check_ij,
/// i <= j: adj(A)_ii and 2 adj(A)_ij (the two symmetric entries collapse onto
/// one basis element).
inline CVector omega_coefficients(const ThetaContext& ctx, const F2Vector& eps, const F2Vector& delta) {
  if (eps == delta) throw DomainError("omega_coefficients: eps must differ from delta");
  const CMatrix adj = adjugate(A_matrix(ctx, eps, delta));
  CVector out;
  for (const auto& [i, j] : sym_pairs(ctx.genus())) out.push_back(adj(i, j) * (i == j ? 1.0 : 2.0));
  return out;
}

/// Same expansion for tr(W dtau-check).
inline CVector trace_coefficients(const CMatrix& m) {
  CVector out;
  for (const auto& [i, j] : sym_pairs(m.rows())) out.push_back(m(i, j) * (i == j ? 1.0 : 2.0));
  return out;
}


// Fourier coefficients of the pairing ------------------------------------------------

/// All principal minors nonnegative (exact).
inline bool is_positive_semidefinite(const IntMatrix& t) {
  const int g = t.rows();
  if (!t.is_square()) throw ShapeError("is_positive_semidefinite: matrix is not square");
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << g); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < g; ++i)
      if (mask >> i & 1U) idx.push_back(i);
    if (det(submatrix(t, idx, idx)) < 0) return false;
  }
  return true;
}

template <class Scalar>
using FourierCoefficients = std::map<IntMatrix, Scalar>;

template <class Scalar>
struct FourierSummand {
  IntMatrix t1, t2;
  Scalar value;
};

template <class Scalar>
struct FourierPairingResult {
  Scalar value{};
  std::vector<FourierSummand<Scalar>> summands;
};

/// Coefficient (g, g) of the pairing {f, h} at T:
///   sum_{k=1}^{g} (-1)^k / binom(g-1, k-1) sum_{I, J in P_{k-1}(X_{g-1}), T1 + T2 = T}
///       s(I) s(J) |T1^I_J| |T2^{I^c}_{J^c}| a_f(T1) a_h(T2).
/// T1 runs over the support of f; splittings with T1 or T2 not positive
/// semidefinite are skipped. Exact when Scalar is exact.
template <class Scalar>
FourierPairingResult<Scalar> fourier_coefficient_pairing(const IntMatrix& t, const FourierCoefficients<Scalar>& f,
                                                         const FourierCoefficients<Scalar>& h) {
  if (!t.is_square() || t != t.transpose()) throw ShapeError("fourier_coefficient_pairing: T must be symmetric");
  const int g = t.rows();
  if (g < 1 || g > 9) throw SizeLimitError("fourier_coefficient_pairing: g must lie in [1, 9]");
  std::vector<int> ground(static_cast<std::size_t>(g - 1));
  std::iota(ground.begin(), ground.end(), 1);
  FourierPairingResult<Scalar> res;
  res.value = Scalar(0);
  for (const auto& [t1, a1] : f) {
    if (t1.rows() != g || t1.cols() != g) throw ShapeError("fourier_coefficient_pairing: coefficient index of wrong size");
    const IntMatrix t2 = t - t1;
    if (!is_positive_semidefinite(t1) || !is_positive_semidefinite(t2)) continue;
    const auto it = h.find(t2);
    if (it == h.end()) continue;
    Scalar inner(0);
    for (int k = 1; k <= g; ++k) {
      // binom(g-1, k-1) as an integer
      std::int64_t binom = 1;
      for (int u = 0; u < k - 1; ++u) binom = binom * (g - 1 - u) / (u + 1);
      Scalar part(0);
      for (const auto& ii : ordered_subsets(ground, k - 1)) {
        const auto ic = complement_in(ground, ii);
        const int si = subset_sign(g, g, ii);
        for (const auto& jj : ordered_subsets(ground, k - 1)) {
          const std::int64_t m1 = minor_det(t1, ii, jj);
          if (m1 == 0) continue;
          const std::int64_t m2 = minor_det(t2, ic, complement_in(ground, jj));
          if (m2 == 0) continue;
          part += Scalar(si * subset_sign(g, g, jj) * m1 * m2);
        }
      }
      const Scalar term = part / Scalar(binom);
      if (k % 2 == 0) inner += term;
      else inner -= term;
    }
    const Scalar v = inner * a1 * it->second;
    res.value += v;
    res.summands.push_back({t1, t2, v});
  }
  return res;
}

}  // namespace thetaforms
