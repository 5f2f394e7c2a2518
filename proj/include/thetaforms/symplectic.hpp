#pragma once

// The integer symplectic group Sp(2g, Z), its action on the Siegel
// upper half-space and the congruence subgroups
//   Gamma_g(n)      = { gamma = 1 mod n }
//   Gamma_g(n, 2n)  = { gamma in Gamma_g(n) : diag(A^t B) = diag(C^t D) = 0 mod 2n }
//   Gamma_g^*(2, 4) = { gamma in Gamma_g(2, 4) : Tr(A - 1) = 0 mod 4 }.

#include <cstdint>
#include <numeric>
#include <random>
#include <string>

#include "thetaforms/errors.hpp"
#include "thetaforms/f2char.hpp"
#include "thetaforms/linalg.hpp"
#include "thetaforms/period_matrix.hpp"

namespace thetaforms {

/// Exact rational number with a positive, reduced denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw DomainError("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t k = std::gcd(num, den);
    if (k > 1) {
      num /= k;
      den /= k;
    }
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

class SymplecticElement {
 public:
  SymplecticElement() = default;
  SymplecticElement(IntMatrix a, IntMatrix b, IntMatrix c, IntMatrix d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const int g = a_.rows();
    for (const IntMatrix* m : {&a_, &b_, &c_, &d_})
      if (m->rows() != g || m->cols() != g) throw ShapeError("symplectic blocks must all be g x g");
  }

  static SymplecticElement identity(int g) {
    return {IntMatrix::identity(g), IntMatrix(g, g), IntMatrix(g, g), IntMatrix::identity(g)};
  }

  static SymplecticElement from_full(const IntMatrix& m) {
    if (!m.is_square() || m.rows() % 2 != 0) throw ShapeError("symplectic matrix must be 2g x 2g");
    const int g = m.rows() / 2;
    std::vector<int> lo(static_cast<std::size_t>(g)), hi(static_cast<std::size_t>(g));
    std::iota(lo.begin(), lo.end(), 0);
    std::iota(hi.begin(), hi.end(), g);
    return {submatrix(m, lo, lo), submatrix(m, lo, hi), submatrix(m, hi, lo), submatrix(m, hi, hi)};
  }

  int genus() const noexcept { return a_.rows(); }
  const IntMatrix& A() const noexcept { return a_; }
  const IntMatrix& B() const noexcept { return b_; }
  const IntMatrix& C() const noexcept { return c_; }
  const IntMatrix& D() const noexcept { return d_; }

  IntMatrix full() const {
    const int g = genus();
    IntMatrix m(2 * g, 2 * g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        m(i, j) = a_(i, j);
        m(i, g + j) = b_(i, j);
        m(g + i, j) = c_(i, j);
        m(g + i, g + j) = d_(i, j);
      }
    return m;
  }

  /// A^t C and B^t D symmetric, A^t D - C^t B = 1 (exact).
  bool is_symplectic() const {
    const int g = genus();
    const IntMatrix at = a_.transpose(), ct = c_.transpose(), bt = b_.transpose();
    const IntMatrix ac = at * c_, bd = bt * d_;
    return ac == ac.transpose() && bd == bd.transpose() && (at * d_ - ct * b_) == IntMatrix::identity(g);
  }

  friend SymplecticElement operator*(const SymplecticElement& x, const SymplecticElement& y) {
    return from_full(x.full() * y.full());
  }
  friend bool operator==(const SymplecticElement&, const SymplecticElement&) = default;

 private:
  IntMatrix a_, b_, c_, d_;
};

// Standard generators -------------------------------------------------------

/// (1, S; 0, 1), tau -> tau + S. S must be integer symmetric.
inline SymplecticElement translation(const IntMatrix& s) {
  if (s != s.transpose()) throw DomainError("translation requires a symmetric matrix");
  const int g = s.rows();
  return {IntMatrix::identity(g), s, IntMatrix(g, g), IntMatrix::identity(g)};
}

/// (1, 0; S, 1).
inline SymplecticElement lower_shear(const IntMatrix& s) {
  if (s != s.transpose()) throw DomainError("lower shear requires a symmetric matrix");
  const int g = s.rows();
  return {IntMatrix::identity(g), IntMatrix(g, g), s, IntMatrix::identity(g)};
}

/// (0, -1; 1, 0).
inline SymplecticElement inversion(int g) {
  return {IntMatrix(g, g), -IntMatrix::identity(g), IntMatrix::identity(g), IntMatrix(g, g)};
}

/// (U, 0; 0, U^{-t}) for U in GL(g, Z).
inline SymplecticElement gl_conjugation(const IntMatrix& u) {
  const std::int64_t d = det(u);
  if (d != 1 && d != -1) throw DomainError("gl_conjugation requires a unimodular matrix");
  IntMatrix inv = adjugate(u);
  inv *= d;  // adj(U) / det(U) with det = +-1
  const int g = u.rows();
  return {u, IntMatrix(g, g), IntMatrix(g, g), inv.transpose()};
}

// Subgroups -----------------------------------------------------------------

struct SubgroupTag {
  enum class Kind { full, principal, theta, theta_star24 };
  Kind kind = Kind::full;
  int level = 1;  // n for Gamma_g(n) and Gamma_g(n, 2n)

  static SubgroupTag full() { return {Kind::full, 1}; }
  static SubgroupTag principal(int n) { return checked({Kind::principal, n}); }
  static SubgroupTag theta(int n) { return checked({Kind::theta, n}); }
  static SubgroupTag theta_star24() { return {Kind::theta_star24, 2}; }

  std::string name() const {
    switch (kind) {
      case Kind::full: return "Gamma_g";
      case Kind::principal: return "Gamma_g(" + std::to_string(level) + ")";
      case Kind::theta: return "Gamma_g(" + std::to_string(level) + "," + std::to_string(2 * level) + ")";
      case Kind::theta_star24: return "Gamma_g*(2,4)";
    }
    return "?";
  }

 private:
  static SubgroupTag checked(SubgroupTag t) {
    if (t.level < 1) throw DomainError("subgroup level must be >= 1");
    return t;
  }
};

namespace detail {

inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

inline bool congruent_to_identity(const SymplecticElement& x, std::int64_t n) {
  const IntMatrix m = x.full();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (mod_floor(m(i, j) - (i == j ? 1 : 0), n) != 0) return false;
  return true;
}

inline bool diagonal_condition(const SymplecticElement& x, std::int64_t modulus) {
  const IntMatrix ab = x.A().transpose() * x.B();
  const IntMatrix cd = x.C().transpose() * x.D();
  for (int i = 0; i < x.genus(); ++i)
    if (mod_floor(ab(i, i), modulus) != 0 || mod_floor(cd(i, i), modulus) != 0) return false;
  return true;
}

}  // namespace detail

inline bool membership(const SymplecticElement& x, const SubgroupTag& tag) {
  if (!x.is_symplectic()) return false;
  switch (tag.kind) {
    case SubgroupTag::Kind::full: return true;
    case SubgroupTag::Kind::principal: return detail::congruent_to_identity(x, tag.level);
    case SubgroupTag::Kind::theta:
      return detail::congruent_to_identity(x, tag.level) && detail::diagonal_condition(x, 2 * tag.level);
    case SubgroupTag::Kind::theta_star24: {
      if (!(detail::congruent_to_identity(x, 2) && detail::diagonal_condition(x, 4))) return false;
      std::int64_t tr = 0;
      for (int i = 0; i < x.genus(); ++i) tr += x.A()(i, i) - 1;
      return detail::mod_floor(tr, 4) == 0;
    }
  }
  return false;
}

/// gamma . tau = (A tau + B)(C tau + D)^{-1}. Throws ConditioningError when
/// cond(C tau + D) exceeds cond_limit.
inline PeriodMatrix act(const SymplecticElement& x, const PeriodMatrix& tau, double cond_limit = 1e12) {
  if (x.genus() != tau.genus()) throw ShapeError("act: genus mismatch");
  const CMatrix a = x.A().cast<Complex>(), b = x.B().cast<Complex>();
  const CMatrix c = x.C().cast<Complex>(), d = x.D().cast<Complex>();
  const CMatrix num = a * tau.matrix() + b;
  const CMatrix den = c * tau.matrix() + d;
  if (condition_number(den) > cond_limit) throw ConditioningError("act: C tau + D is ill-conditioned");
  // X Y^{-1} = (Y^{-t} X^t)^t
  CMatrix out = solve(den.transpose(), num.transpose()).transpose();
  const int g = out.rows();
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return PeriodMatrix(std::move(out));
}

/// det(C tau + D).
inline Complex automorphy_determinant(const SymplecticElement& x, const PeriodMatrix& tau) {
  return det(x.C().cast<Complex>() * tau.matrix() + x.D().cast<Complex>());
}

/// phi_m(gamma) = -(1/8)(e^t B^t D e + d^t A^t C d - 2 e^t B^t C d)
///                + (1/4) diag(A^t B)^t (D e - C d), for gamma in Gamma_g(2).
inline Rational phi_m(const SymplecticElement& x, const Characteristic& m) {
  if (!membership(x, SubgroupTag::principal(2))) throw DomainError("phi_m requires gamma in Gamma_g(2)");
  const int g = x.genus();
  if (m.genus() != g) throw ShapeError("phi_m: genus mismatch");
  IntMatrix e(g, 1), d(g, 1);
  for (int i = 0; i < g; ++i) {
    e(i, 0) = m.eps()[i];
    d(i, 0) = m.delta()[i];
  }
  const IntMatrix et = e.transpose(), dt = d.transpose();
  const IntMatrix bt = x.B().transpose(), at = x.A().transpose();
  const std::int64_t quad = (et * bt * x.D() * e)(0, 0) + (dt * at * x.C() * d)(0, 0) -
                            2 * (et * bt * x.C() * d)(0, 0);
  const IntMatrix ab = at * x.B();
  const IntMatrix lin = x.D() * e - x.C() * d;
  std::int64_t diag_term = 0;
  for (int i = 0; i < g; ++i) diag_term += ab(i, i) * lin(i, 0);
  // -(quad)/8 + diag_term/4 = (-quad + 2 diag_term)/8
  return Rational(-quad + 2 * diag_term, 8);
}

/// gamma~ = (A, 2B; C/2, D), satisfying 2(gamma . tau) = gamma~ . (2 tau).
inline SymplecticElement double_cover_element(const SymplecticElement& x) {
  const int g = x.genus();
  IntMatrix c2(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (x.C()(i, j) % 2 != 0) throw DomainError("double_cover_element requires C = 0 mod 2");
      c2(i, j) = x.C()(i, j) / 2;
    }
  SymplecticElement y(x.A(), x.B() * std::int64_t{2}, std::move(c2), x.D());
  if (!y.is_symplectic()) throw DomainError("double_cover_element: input is not symplectic");
  return y;
}

/// Deterministic pseudo-random word in generators lying in the subgroup:
/// translations (1, nS; 0, 1), shears (1, 0; nS, 1) and conjugations by
/// U = 1 + n E_ij or sign flips (level <= 2), with diag(S) even for theta
/// groups. The generator set is a pragmatic choice; it is not claimed to
/// generate the whole subgroup. Words are filtered through membership() and
/// fall back to a translation element if the retry budget runs out.
inline SymplecticElement sample_subgroup(const SubgroupTag& tag, int g, int word_length, std::uint64_t seed) {
  if (g < 1) throw DomainError("sample_subgroup: g must be positive");
  if (word_length < 0) throw DomainError("sample_subgroup: negative word length");
  std::mt19937_64 rng(seed);
  const std::int64_t n = tag.kind == SubgroupTag::Kind::full ? 1 : tag.level;
  const bool theta_like = tag.kind == SubgroupTag::Kind::theta || tag.kind == SubgroupTag::Kind::theta_star24;
  std::uniform_int_distribution<int> small(-1, 1);

  auto random_symmetric = [&]() {
    IntMatrix s(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) s(i, j) = s(j, i) = small(rng);
    for (int i = 0; i < g; ++i) s(i, i) = small(rng) * (theta_like ? 2 : 1);
    return s * n;
  };
  auto random_generator = [&]() -> SymplecticElement {
    const int choice = std::uniform_int_distribution<int>(0, tag.kind == SubgroupTag::Kind::full ? 3 : 2)(rng);
    switch (choice) {
      case 0: return translation(random_symmetric());
      case 1: return lower_shear(random_symmetric());
      case 2: {
        IntMatrix u = IntMatrix::identity(g);
        const bool flip = n <= 2 && (g == 1 || std::uniform_int_distribution<int>(0, 1)(rng) == 0);
        if (flip) {
          const int k = std::uniform_int_distribution<int>(0, g - 1)(rng);
          u(k, k) = -1;
        } else if (g > 1) {
          const int i = std::uniform_int_distribution<int>(0, g - 1)(rng);
          int j = std::uniform_int_distribution<int>(0, g - 2)(rng);
          if (j >= i) ++j;
          u(i, j) = n * (std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1);
        }
        return gl_conjugation(u);
      }
      default: return inversion(g);
    }
  };

  constexpr int kRetries = 64;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    SymplecticElement w = SymplecticElement::identity(g);
    for (int step = 0; step < word_length; ++step) w = w * random_generator();
    if (membership(w, tag)) return w;
  }
  // (1, 2n S'; 0, 1) with even diagonal lies in every supported subgroup.
  IntMatrix s(g, g);
  for (int i = 0; i < g; ++i) s(i, i) = 4 * n;
  return translation(s);
}

}  // namespace thetaforms
