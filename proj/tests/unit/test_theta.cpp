#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include "thetaforms/theta.hpp"

using namespace thetaforms;

namespace {

PeriodMatrix scalar_tau(Complex t) { return PeriodMatrix(CMatrix{{t}}); }

CVector random_z(int g, std::uint64_t seed, double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  CVector z;
  for (int i = 0; i < g; ++i) z.emplace_back(u(rng), u(rng));
  return z;
}

}  // namespace

TEST(Theta, OddConstantsVanish) {
  for (int g = 1; g <= 3; ++g) {
    const auto tau = sample_period_matrix(g, std::uint64_t{10});
    for (const auto& m : enumerate_characteristics(g, ParityFilter::odd)) {
      const auto e = theta(m, tau);
      EXPECT_LT(std::abs(e.value), 1e-13) << m.str();
      EXPECT_LE(e.trunc_bound, 1e-12);
    }
  }
}

TEST(Theta, ClassicalValueAtI) {
  const double expected = std::pow(kPi, 0.25) / boost::math::tgamma(0.75);
  const auto e = theta(Characteristic::parse("0", "0"), scalar_tau(Complex(0, 1)));
  EXPECT_NEAR(e.value.real(), expected, 1e-13);
  EXPECT_NEAR(e.value.imag(), 0.0, 1e-13);
  EXPECT_NEAR(expected, 1.0864348112, 1e-10);
}

TEST(Theta, ProductSplitting) {
  std::mt19937_64 rng(21);
  const auto t1 = sample_period_matrix(1, rng), t2 = sample_period_matrix(1, rng);
  const auto tau = PeriodMatrix::block_diagonal(t1, t2);
  const CVector z = random_z(2, 3);
  for (const auto& m1 : enumerate_characteristics(1))
    for (const auto& m2 : enumerate_characteristics(1)) {
      const Complex lhs = theta(direct_sum(m1, m2), tau, z).value;
      const Complex rhs = theta(m1, t1, {z[0]}).value * theta(m2, t2, {z[1]}).value;
      EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Theta, GradientSplitsOnProductLocus) {
  std::mt19937_64 rng(22);
  const auto t1 = sample_period_matrix(1, rng), t2 = sample_period_matrix(1, rng);
  const auto tau = PeriodMatrix::block_diagonal(t1, t2);
  const auto m1 = Characteristic::parse("1", "1");
  for (const auto& m2 : enumerate_characteristics(1, ParityFilter::even)) {
    const CVector v = theta_gradient(direct_sum(m1, m2), tau).value;
    const Complex expected = theta_gradient(m1, t1).value[0] * theta(m2, t2).value;
    EXPECT_LT(std::abs(v[0] - expected), 1e-12 * std::abs(expected));
    EXPECT_LT(std::abs(v[1]), 1e-12);
  }
}

TEST(Theta, GradientParityGuard) {
  const auto tau = sample_period_matrix(2, std::uint64_t{5});
  const auto even = Characteristic::parse("10", "01");
  EXPECT_THROW(theta_gradient(even, tau), ParityError);
  const CVector v = theta_gradient(even, tau, {}, true).value;
  EXPECT_LT(max_abs(v), 1e-12);
}

TEST(Theta, HessianOfOddVanishesAtZero) {
  const auto tau = sample_period_matrix(2, std::uint64_t{6});
  for (const auto& m : enumerate_characteristics(2, ParityFilter::odd)) {
    const auto h = theta_hessian_z(m, tau);
    EXPECT_LT(max_abs(h.value), 1e-11);
    EXPECT_TRUE(is_symmetric(h.value));
  }
}

TEST(Theta, ParityInZ) {
  const auto tau = sample_period_matrix(3, std::uint64_t{7});
  const CVector z = random_z(3, 8);
  CVector mz;
  for (const auto& x : z) mz.push_back(-x);
  for (const auto& m : enumerate_characteristics(3)) {
    const Complex a = theta(m, tau, mz).value;
    const Complex b = static_cast<double>(m.is_odd() ? -1 : 1) * theta(m, tau, z).value;
    EXPECT_LT(std::abs(a - b), 1e-11 * std::max(1.0, std::abs(b)));
  }
}

TEST(Theta, DoublingRadiusStaysWithinBound) {
  for (int g = 1; g <= 3; ++g) {
    const auto tau = sample_period_matrix(g, static_cast<std::uint64_t>(30 + g));
    const CVector z = random_z(g, static_cast<std::uint64_t>(40 + g));
    for (const auto& m : enumerate_characteristics(g)) {
      const ThetaJet base = theta_jet(m, tau, z, 2);
      ThetaOptions wide;
      wide.radius_override = 2.0 * base.radius;
      const ThetaJet big = theta_jet(m, tau, z, 2, wide);
      EXPECT_LE(std::abs(big.value - base.value), base.bounds[0] + 1e-14 * std::abs(big.value) + 1e-15);
      for (int i = 0; i < g; ++i) {
        EXPECT_LE(std::abs(big.gradient[static_cast<std::size_t>(i)] - base.gradient[static_cast<std::size_t>(i)]),
                  base.bounds[1] + 1e-13 * std::max(1.0, max_abs(big.gradient)));
        for (int j = 0; j < g; ++j)
          EXPECT_LE(std::abs(big.hessian(i, j) - base.hessian(i, j)), base.bounds[2] + 1e-13 * std::max(1.0, max_abs(big.hessian)));
      }
    }
  }
}

TEST(Theta, BoundShrinksWithRadius) {
  const auto tau = sample_period_matrix(2, std::uint64_t{9});
  ThetaOptions small, large;
  small.radius_override = 3.0;
  large.radius_override = 5.0;
  const auto m = Characteristic::parse("00", "00");
  EXPECT_GT(theta(m, tau, {}, small).trunc_bound, theta(m, tau, {}, large).trunc_bound);
  EXPECT_LE(theta(m, tau).trunc_bound, 1e-12);
}

TEST(Theta, TruncationCapRaises) {
  const auto tau = scalar_tau(Complex(0.0, 1e-5));
  EXPECT_THROW(theta(Characteristic::parse("0", "0"), tau), TruncationError);
}

TEST(Theta, RejectsBadInput) {
  const auto tau = sample_period_matrix(2, std::uint64_t{1});
  EXPECT_THROW(theta(Characteristic::parse("0", "0"), tau), ShapeError);
  EXPECT_THROW(theta(Characteristic::parse("00", "00"), tau, {Complex(std::nan(""), 0.0), 0.0}), DomainError);
  ThetaOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(theta(Characteristic::parse("00", "00"), tau, {}, bad), DomainError);
}

TEST(Theta, HeatEquationAllCharacteristics) {
  for (int g = 1; g <= 3; ++g) {
    const auto tau = sample_period_matrix(g, static_cast<std::uint64_t>(50 + g));
    for (const auto& m : enumerate_characteristics(g)) {
      const Residual r = heat_equation_check(m, tau);
      EXPECT_LT(r.residual, 1e-10 * std::max(1.0, r.scale)) << m.str();
    }
  }
}

TEST(Theta, TauDerivativesFollowHeatEquation) {
  const auto tau = sample_period_matrix(2, std::uint64_t{60});
  const auto m = Characteristic::parse("01", "00");
  const CMatrix hess = theta_hessian_z(m, tau).value;
  const CMatrix dt = theta_tau_derivatives(m, tau).value;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_LT(std::abs(hess(i, j) - 2.0 * kPi * kI * (i == j ? 2.0 : 1.0) * dt(i, j)), 1e-12 * max_abs(hess));
}

TEST(SecondOrder, MatchesThetaAtDoubledArguments) {
  const auto tau = scalar_tau(Complex(0.0, 1.0));
  const auto c = second_order_constants(tau);
  ASSERT_EQ(c.values.size(), 2u);
  const auto t2 = scalar_tau(Complex(0.0, 2.0));
  EXPECT_LT(std::abs(c.values[0] - theta(Characteristic::parse("0", "0"), t2).value), 1e-15);
  EXPECT_LT(std::abs(c.values[1] - theta(Characteristic::parse("1", "0"), t2).value), 1e-15);
}

TEST(SecondOrder, TranslationByFourIsInvariant) {
  const auto tau = sample_period_matrix(2, std::uint64_t{61});
  const IntMatrix b{{1, -1}, {-1, 2}};
  const auto moved = act(translation(b * std::int64_t{4}), tau);
  const auto a = second_order_constants(tau), c = second_order_constants(moved);
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_LT(std::abs(a.values[k] - c.values[k]), 1e-11);
}

TEST(SecondOrder, JetAgreesWithValueAndHessian) {
  const auto tau = sample_period_matrix(2, std::uint64_t{62});
  for (const auto& jet : second_order_jets(tau)) {
    EXPECT_LT(std::abs(jet.value - second_order_theta(jet.sigma, tau).value), 1e-14);
    const CMatrix dt = jet.tau_derivatives;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        EXPECT_LT(std::abs(jet.hessian_z(i, j) - 4.0 * kPi * kI * (i == j ? 2.0 : 1.0) * dt(i, j)), 1e-11 * max_abs(jet.hessian_z));
  }
}

TEST(SecondOrder, TauDerivativeMatrixShapeAndProductZeros) {
  std::mt19937_64 rng(63);
  const auto tau = sample_product_period_matrix(1, 1, rng);
  const CMatrix d = second_order_tau_derivatives(tau);
  EXPECT_EQ(d.rows(), 3);
  EXPECT_EQ(d.cols(), 4);
  // row (0,1) mixes the two blocks and vanishes on the product locus
  for (int c = 0; c < 4; ++c) EXPECT_LT(std::abs(d(1, c)), 1e-12);
}

TEST(SecondOrder, ParallelBatchIsBitIdentical) {
  const auto tau = sample_period_matrix(3, std::uint64_t{64});
  const auto a = second_order_jets(tau, {}, 1);
  const auto b = second_order_jets(tau, {}, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].value, b[k].value);
    EXPECT_TRUE(a[k].hessian_z == b[k].hessian_z);
  }
}

TEST(Relations, BilinearAtZeroGenusOne) {
  for (int s = 0; s < 5; ++s) {
    const auto tau = sample_period_matrix(1, static_cast<std::uint64_t>(70 + s));
    for (const auto& m : enumerate_characteristics(1)) {
      const Residual r = riemann_bilinear_check(m.eps(), m.delta(), tau);
      EXPECT_LT(r.residual, 1e-10 * std::max(1.0, r.scale)) << m.str();
    }
  }
}

TEST(Relations, BilinearWithZGenusTwo) {
  const auto tau = sample_period_matrix(2, std::uint64_t{75});
  const CVector z = random_z(2, 76);
  for (const auto& m : enumerate_characteristics(2)) {
    const Residual r = riemann_bilinear_check(m.eps(), m.delta(), tau, z);
    EXPECT_LT(r.relative(), 1e-9) << m.str();
  }
}

TEST(Relations, Addition) {
  const auto tau = sample_period_matrix(2, std::uint64_t{77});
  for (const auto& a : all_f2_vectors(2))
    for (const auto& e : all_f2_vectors(2)) EXPECT_LT(addition_relation_check(a, e, tau).relative(), 1e-10);
}

TEST(Transformation, IdentityGivesUnitRatios) {
  const auto tau = sample_period_matrix(2, std::uint64_t{80});
  const auto id = SymplecticElement::identity(2);
  const auto r = transformation_check(id, tau, TransformationKind::second_order_squared);
  for (const auto& x : r.ratios) EXPECT_LT(std::abs(x - 1.0), 1e-13);
  const auto w = transformation_check(id, tau, TransformationKind::characteristic_weight_half, Characteristic::parse("00", "01"));
  EXPECT_LT(std::abs(w.ratios[0] - 1.0), 1e-13);
}

TEST(Transformation, DeepTranslation) {
  const auto tau = sample_period_matrix(2, std::uint64_t{81});
  const IntMatrix b{{2, 1}, {1, 0}};
  const auto r = transformation_check(translation(b * std::int64_t{4}), tau, TransformationKind::second_order_squared);
  for (const auto& x : r.ratios) EXPECT_LT(std::abs(x - 1.0), 1e-11);
}

TEST(Transformation, RandomPrincipalElements) {
  for (int s = 0; s < 5; ++s) {
    const auto tau = sample_period_matrix(2, static_cast<std::uint64_t>(90 + s));
    const auto gamma = sample_subgroup(SubgroupTag::principal(2), 2, 3, static_cast<std::uint64_t>(s));
    for (const auto& m : enumerate_characteristics(2, ParityFilter::even)) {
      const auto r = transformation_check(gamma, tau, TransformationKind::characteristic_weight_half, m);
      EXPECT_LT(r.modulus_residual, 1e-8);
      EXPECT_LT(r.root_of_unity_residual, 1e-7);
    }
  }
}

TEST(Transformation, SecondOrderSignIsSigmaIndependent) {
  for (int s = 0; s < 5; ++s) {
    const auto tau = sample_period_matrix(2, static_cast<std::uint64_t>(95 + s));
    const auto gamma = sample_subgroup(SubgroupTag::theta(2), 2, 3, static_cast<std::uint64_t>(s));
    const auto r = transformation_check(gamma, tau, TransformationKind::second_order);
    EXPECT_LT(r.spread, 1e-8);
    EXPECT_LT(r.root_of_unity_residual, 1e-8);
  }
}

TEST(Transformation, SubgroupPreconditions) {
  const auto tau = sample_period_matrix(2, std::uint64_t{99});
  EXPECT_THROW(transformation_check(inversion(2), tau, TransformationKind::second_order), DomainError);
  const IntMatrix u{{-1, 0}, {0, 1}};
  EXPECT_THROW(transformation_check(gl_conjugation(u), tau, TransformationKind::second_order_squared), DomainError);
  EXPECT_THROW(transformation_check(SymplecticElement::identity(2), tau, TransformationKind::characteristic_weight_half,
                                    Characteristic::parse("11", "10")),
               ParityError);
}
