#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thetaforms/forms.hpp"
#include "thetaforms/symplectic.hpp"
#include "thetaforms/theta.hpp"

namespace thetaforms {

inline constexpr const char* kVersion = "1.0.0";

/// One line of a report. pass is residual <= tolerance.
struct CheckResult {
  std::string check;
  std::string inputs_digest;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double elapsed = 0.0;
};

struct SuiteConfig {
  int g = 2;
  std::vector<PeriodMatrix> taus;
  /// Base tolerance; each check compares against tol times its suite factor.
  double tol = 1e-12;
  std::uint64_t seed = 0;
  /// Group elements per tau and subgroup (transformation, det_weight).
  int group_samples = 3;
  int threads = 1;
  ThetaOptions theta;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"heat",    "bilinear",  "addition",   "conversion", "transformation",
                                              "adjoint", "adjoint_W", "det_weight", "binet",      "pairing_parity"};
  return names;
}

inline bool is_suite(const std::string& name) {
  for (const auto& n : suite_names())
    if (n == name) return true;
  return false;
}

/// Suites that never evaluate a theta series.
inline bool suite_needs_tau(const std::string& name) { return name != "binet"; }

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string canonical(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string canonical(const CMatrix& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) s += canonical(m(i, j).real()) + "," + canonical(m(i, j).imag()) + ";";
  return s + "]";
}

inline std::string canonical(const PeriodMatrix& tau) { return canonical(tau.matrix()); }

inline std::string canonical(const SymplecticElement& x) {
  std::string s = "{";
  for (auto v : x.full().data()) s += std::to_string(v) + ",";
  return s + "}";
}

namespace detail {

class SuiteRecorder {
 public:
  SuiteRecorder(std::string suite, double tol) : suite_(std::move(suite)), tol_(tol) {}

  /// Times fn, which returns the relative residual, and appends a result.
  void run(const std::string& check, const std::string& inputs, double factor, const std::function<double()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    const double r = fn();
    CheckResult c;
    c.check = suite_ + ":" + check;
    c.inputs_digest = fnv1a_hex(suite_ + "|" + check + "|" + inputs);
    c.residual = r;
    c.tolerance = tol_ * factor;
    c.pass = r <= c.tolerance;
    c.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(c));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::string suite_;
  double tol_;
  std::vector<CheckResult> results_;
};

inline CMatrix random_complex_matrix(int r, int c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

inline CVector random_z(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  CVector z(static_cast<std::size_t>(g));
  for (auto& x : z) x = Complex(u(rng), 0.6 * u(rng));
  return z;
}

inline std::vector<std::pair<F2Vector, F2Vector>> distinct_pairs(int g) {
  std::vector<std::pair<F2Vector, F2Vector>> out;
  const auto vecs = all_f2_vectors(g);
  for (const auto& a : vecs)
    for (const auto& b : vecs)
      if (!(a == b)) out.emplace_back(a, b);
  return out;
}

inline void require_genus(const SuiteConfig& cfg, int lo, int hi, const char* suite) {
  if (cfg.g < lo || cfg.g > hi)
    throw DomainError(std::string(suite) + ": g must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (const auto& t : cfg.taus)
    if (t.genus() != cfg.g) throw ShapeError(std::string(suite) + ": tau genus differs from g");
}

inline std::string tau_tag(std::size_t t) { return "tau" + std::to_string(t); }

}  // namespace detail

/// First sampled element of the subgroup (words of length 3, seeds derived
/// from `seed`) that keeps the smallest eigenvalue of Im(gamma tau) above
/// min_y for every tau; the series at gamma tau then stays cheap.
inline SymplecticElement sample_moving_element(const SubgroupTag& tag, int g, const std::vector<PeriodMatrix>& taus,
                                               std::uint64_t seed, double min_y = 0.15) {
  for (std::uint64_t attempt = 0; attempt < 256; ++attempt) {
    const auto gamma = sample_subgroup(tag, g, 3, seed * 256 + attempt);
    bool ok = true;
    for (const auto& t : taus) {
      try {
        ok = ok && act(gamma, t).y_min() >= min_y;
      } catch (const ConditioningError&) {
        ok = false;
      }
    }
    if (ok) return gamma;
  }
  throw TruncationError("sample_moving_element: no sampled element keeps Im(gamma tau) away from the boundary");
}

namespace detail {

}  // namespace detail

/// Residual threshold of a suite as a multiple of the base tolerance.
inline double suite_tolerance_factor(const std::string& suite) {
  if (suite == "binet") return 1.0;
  if (suite == "transformation") return 1e4;
  if (suite == "adjoint" || suite == "adjoint_W") return 1e5;
  if (suite == "det_weight") return 1e6;
  return 1e3;
}

inline std::vector<CheckResult> run_binet_suite(const SuiteConfig& cfg) {
  detail::SuiteRecorder rec("binet", cfg.tol);
  std::mt19937_64 rng(cfg.seed);
  const std::string in = "seed=" + std::to_string(cfg.seed);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix m = detail::random_complex_matrix(n, n, rng);
    rec.run("adjugate n=" + std::to_string(n), in, 1.0, [&] {
      const Complex d = det(m);
      const CMatrix lhs = m * adjugate(m);
      const CMatrix rhs = CMatrix::identity(n) * d;
      return compare(lhs, rhs).relative();
    });
  }
  for (int k = 1; k <= 4; ++k)
    for (int n = k; n <= 5; ++n) {
      const CMatrix a = detail::random_complex_matrix(k, n, rng);
      const CMatrix b = detail::random_complex_matrix(n, k, rng);
      rec.run("cauchy_binet " + std::to_string(k) + "x" + std::to_string(n), in, 1.0, [&] {
        const double scale = std::max(1.0, std::abs(det(a * b)));
        return binet_check(a, b) / scale;
      });
    }
  for (int n = 2; n <= 5; ++n) {
    const CMatrix m = detail::random_complex_matrix(n, n, rng);
    rec.run("laplace_block n=" + std::to_string(n), in, 1.0, [&] {
      double worst = 0.0;
      const double scale = std::max(1.0, std::abs(det(m)));
      for (int k = 1; k < n; ++k)
        for (const auto& cols : ordered_subsets(n, k)) worst = std::max(worst, laplace_block_expansion_check(m, cols) / scale);
      return worst;
    });
  }
  rec.run("subset_sign n<=5", in, 1.0, [&] {
    int mismatches = 0;
    for (int n = 1; n <= 5; ++n)
      for (int k = 0; k <= n; ++k)
        for (const auto& i : ordered_subsets(n, k))
          for (const auto& j : ordered_subsets(n, k))
            if (subset_sign(n + 1, n + 1, i.elements()) * subset_sign(n + 1, n + 1, j.elements()) !=
                sign_power(i.index_sum() + j.index_sum()))
              ++mismatches;
    return static_cast<double>(mismatches);
  });
  {
    const CMatrix a = detail::random_complex_matrix(3, 4, rng), b = detail::random_complex_matrix(4, 3, rng);
    rec.run("column_row_expansion", in, 1.0, [&] {
      CMatrix sum(3, 3);
      for (int k = 0; k < 4; ++k) {
        CMatrix col(3, 1), row(1, 3);
        for (int i = 0; i < 3; ++i) col(i, 0) = a(i, k);
        for (int j = 0; j < 3; ++j) row(0, j) = b(k, j);
        sum += col * row;
      }
      return compare(sum, a * b).relative();
    });
  }
  return rec.take();
}

/// Runs a named identity suite at every tau of the configuration.
inline std::vector<CheckResult> run_suite(const std::string& suite, const SuiteConfig& cfg) {
  using detail::tau_tag;
  if (!is_suite(suite)) throw DomainError("unknown suite: " + suite);
  if (suite == "binet") return run_binet_suite(cfg);
  if (cfg.taus.empty()) throw DomainError(suite + ": no period matrices configured");
  const double factor = suite_tolerance_factor(suite);
  detail::SuiteRecorder rec(suite, cfg.tol);
  const int g = cfg.g;

  if (suite == "heat") {
    detail::require_genus(cfg, 1, 4, "heat");
    for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
      std::mt19937_64 rng(cfg.seed + 1000 * t);
      const CVector z = detail::random_z(g, rng);
      std::string in = canonical(cfg.taus[t]);
      for (const auto& x : z) in += canonical(x.real()) + "," + canonical(x.imag()) + ";";
      for (const auto& m : enumerate_characteristics(g))
        rec.run(tau_tag(t) + " " + m.str(), in, factor,
                [&] { return heat_equation_check(m, cfg.taus[t], cfg.theta, z).relative(); });
    }
  } else if (suite == "bilinear") {
    detail::require_genus(cfg, 1, 3, "bilinear");
    for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
      std::mt19937_64 rng(cfg.seed + 1000 * t);
      const CVector z = detail::random_z(g, rng);
      std::string in = canonical(cfg.taus[t]);
      for (const auto& x : z) in += canonical(x.real()) + "," + canonical(x.imag()) + ";";
      for (const auto& m : enumerate_characteristics(g))
        rec.run(tau_tag(t) + " " + m.str(), in, factor,
                [&] { return riemann_bilinear_check(m.eps(), m.delta(), cfg.taus[t], z, cfg.theta).relative(); });
    }
  } else if (suite == "addition") {
    detail::require_genus(cfg, 1, 3, "addition");
    const auto vecs = all_f2_vectors(g);
    for (std::size_t t = 0; t < cfg.taus.size(); ++t)
      for (const auto& a : vecs)
        for (const auto& e : vecs)
          rec.run(tau_tag(t) + " alpha=" + a.str() + " eps=" + e.str(), canonical(cfg.taus[t]), factor,
                  [&] { return addition_relation_check(a, e, cfg.taus[t], cfg.theta).relative(); });
  } else if (suite == "conversion") {
    detail::require_genus(cfg, 1, 3, "conversion");
    for (std::size_t t = 0; t < cfg.taus.size(); ++t)
      rec.run(tau_tag(t), canonical(cfg.taus[t]), factor, [&] {
        const ThetaContext ctx(cfg.taus[t], cfg.theta, cfg.threads);
        return conversion_identities_check(ctx).worst();
      });
  } else if (suite == "transformation") {
    detail::require_genus(cfg, 1, 3, "transformation");
    const double mod_f = factor, rho_f = 10.0 * factor;
    for (std::size_t t = 0; t < cfg.taus.size(); ++t)
      for (int k = 0; k < cfg.group_samples; ++k) {
        const std::uint64_t s = cfg.seed + 7919 * t + static_cast<std::uint64_t>(k);
        const auto& tau = cfg.taus[t];
        const auto g2 = sample_moving_element(SubgroupTag::principal(2), g, {tau}, s);
        for (const auto& m : enumerate_characteristics(g, ParityFilter::even)) {
          const std::string in = canonical(tau) + canonical(g2) + m.str();
          std::optional<TransformationReport> rep;
          auto eval = [&] {
            if (!rep) rep = transformation_check(g2, tau, TransformationKind::characteristic_weight_half, m, cfg.theta);
            return *rep;
          };
          const std::string tag = tau_tag(t) + " gamma" + std::to_string(k) + " " + m.str();
          rec.run("weight_half_modulus " + tag, in, mod_f, [&] { return eval().modulus_residual; });
          rec.run("rho4 " + tag, in, rho_f, [&] { return eval().root_of_unity_residual; });
        }
        const auto g24 = sample_moving_element(SubgroupTag::theta(2), g, {tau}, s);
        rec.run("second_order_sign " + tau_tag(t) + " gamma" + std::to_string(k), canonical(tau) + canonical(g24), mod_f, [&] {
          const auto r = transformation_check(g24, tau, TransformationKind::second_order, std::nullopt, cfg.theta);
          return std::max({r.modulus_residual, r.root_of_unity_residual, r.spread});
        });
        const auto gs = sample_moving_element(SubgroupTag::theta_star24(), g, {tau}, s);
        rec.run("second_order_square " + tau_tag(t) + " gamma" + std::to_string(k), canonical(tau) + canonical(gs), mod_f, [&] {
          const auto r = transformation_check(gs, tau, TransformationKind::second_order_squared, std::nullopt, cfg.theta);
          return std::max({r.modulus_residual, r.root_of_unity_residual, r.spread});
        });
      }
  } else if (suite == "adjoint" || suite == "adjoint_W" || suite == "pairing_parity") {
    detail::require_genus(cfg, 2, suite == "adjoint_W" ? 3 : 4, suite.c_str());
    for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
      const ThetaContext ctx(cfg.taus[t], cfg.theta, cfg.threads);
      for (const auto& [e, d] : detail::distinct_pairs(g)) {
        const std::string tag = tau_tag(t) + " eps=" + e.str() + " delta=" + d.str();
        const std::string in = canonical(cfg.taus[t]) + e.str() + d.str();
        if (suite == "adjoint") {
          rec.run(tag, in, factor, [&] { return adjugate_theorem_check(ctx, e, d).relative(); });
        } else if (suite == "adjoint_W") {
          rec.run(tag, in, factor, [&] { return adjugate_W_identity_check(ctx, e, d).relative(); });
        } else {
          rec.run(tag, in, factor, [&] {
            const CMatrix ed = freitag_pairing(ctx, e, d);
            const CMatrix de = freitag_pairing(ctx, d, e);
            return compare(de, ed * Complex(static_cast<double>(sign_power(g + 1)))).relative();
          });
        }
      }
    }
  } else if (suite == "det_weight") {
    detail::require_genus(cfg, 1, 3, "det_weight");
    std::vector<SymplecticElement> gammas;
    for (int k = 0; k < cfg.group_samples; ++k)
      gammas.push_back(sample_moving_element(SubgroupTag::theta_star24(), g, cfg.taus, cfg.seed + static_cast<std::uint64_t>(k)));
    std::string in;
    for (const auto& t : cfg.taus) in += canonical(t);
    for (const auto& x : gammas) in += canonical(x);
    const auto vecs = all_f2_vectors(g);
    const F2Vector e = vecs.front(), d = vecs.back();
    std::optional<DetWeightReport> rep;
    auto eval = [&] {
      if (!rep) rep = det_A_weight_check(e, d, cfg.taus, gammas, cfg.theta);
      return *rep;
    };
    const std::string tag = "eps=" + e.str() + " delta=" + d.str();
    // residual < 1 iff max |det A| / |A|^g exceeds 1e-6 somewhere
    rec.run("nonvanishing " + tag, in, 1.0 / cfg.tol, [&] {
      const double r = eval().max_relative_det;
      return r > 0.0 ? 1e-6 / r : std::numeric_limits<double>::infinity();
    });
    rec.run("weight " + tag, in, factor, [&] { return eval().weight_residual; });
  }
  return rec.take();
}

}  // namespace thetaforms
