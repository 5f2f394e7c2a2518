#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "thetaforms/forms.hpp"

using namespace thetaforms;

namespace {

PeriodMatrix product_tau(std::uint64_t seed, int g1 = 1, int g2 = 1) {
  std::mt19937_64 rng(seed);
  return sample_product_period_matrix(g1, g2, rng);
}

F2Vector vec(const char* s) { return F2Vector::parse(s); }

}  // namespace

TEST(SymPair, BijectionWithPositions) {
  for (int g = 1; g <= 5; ++g) {
    const auto pairs = sym_pairs(g);
    ASSERT_EQ(static_cast<int>(pairs.size()), g * (g + 1) / 2);
    for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
      const auto idx = SymPairIndex::at(p, g);
      EXPECT_EQ(idx.i - 1, pairs[static_cast<std::size_t>(p)].first);
      EXPECT_EQ(idx.j - 1, pairs[static_cast<std::size_t>(p)].second);
      EXPECT_EQ(idx.position(g), p);
    }
  }
}

TEST(SymPair, FlattenRoundTrip) {
  const CMatrix m{{1.0, 2.0, 3.0}, {2.0, 4.0, 5.0}, {3.0, 5.0, 6.0}};
  const CVector v = flatten(m);
  EXPECT_EQ(v, (CVector{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}));
  EXPECT_TRUE(unflatten(v, 3) == m);
}

TEST(CMatrix, RankAtMostOne) {
  const ThetaContext ctx(sample_period_matrix(3, std::uint64_t{1}));
  for (const auto& m : enumerate_characteristics(3, ParityFilter::odd)) {
    const CMatrix c = C_matrix(ctx, m.eps(), m.delta());
    EXPECT_LE(numerical_rank(c), 1);
    EXPECT_TRUE(is_symmetric(c, 1e-15));
  }
}

TEST(CMatrix, EvenRejected) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{1}));
  EXPECT_THROW(C_matrix(ctx, vec("00"), vec("00")), ParityError);
}

TEST(CMatrix, GenusOneIsTwiceSquaredGradient) {
  const PeriodMatrix tau(CMatrix{{Complex(0, 1)}});
  const Complex v = theta_gradient(Characteristic::parse("1", "1"), tau).value[0];
  const CMatrix c = C_matrix(vec("1"), vec("1"), tau);
  EXPECT_LT(std::abs(c(0, 0) - 2.0 * v * v), 1e-12);
}

TEST(AMatrix, Antisymmetry) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{2}));
  for (const auto& a : all_f2_vectors(2)) {
    EXPECT_EQ(max_abs(A_matrix(ctx, a, a)), 0.0);
    for (const auto& b : all_f2_vectors(2)) {
      const CMatrix s = A_matrix(ctx, a, b) + A_matrix(ctx, b, a);
      EXPECT_LT(max_abs(s), 1e-12 * std::max(1.0, max_abs(A_matrix(ctx, a, b))));
    }
  }
}

TEST(AMatrix, QuotientForm) {
  for (int g = 2; g <= 3; ++g) {
    const ThetaContext ctx(sample_period_matrix(g, static_cast<std::uint64_t>(3 + g)));
    const auto vecs = all_f2_vectors(g);
    for (const auto& a : vecs)
      for (const auto& b : vecs) {
        const Residual r = compare(A_matrix(ctx, a, b), quotient_form(ctx, a, b) * Complex(-2.0));
        EXPECT_LT(r.relative(), 1e-12);
      }
  }
}

TEST(AMatrix, AdjugateProduct) {
  const ThetaContext ctx(sample_period_matrix(3, std::uint64_t{4}));
  const CMatrix a = A_matrix(ctx, vec("010"), vec("110"));
  const CMatrix lhs = adjugate(a) * a;
  const CMatrix rhs = CMatrix::identity(3) * det(a);
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * max_abs(rhs));
}

TEST(Conversion, AllGenera) {
  for (int g = 1; g <= 3; ++g) {
    const ThetaContext ctx(sample_period_matrix(g, static_cast<std::uint64_t>(10 + g)));
    const auto rep = conversion_identities_check(ctx);
    EXPECT_LT(rep.c_from_a, 1e-10) << "g=" << g;
    EXPECT_LT(rep.a_from_c, 1e-10) << "g=" << g;
    EXPECT_EQ(rep.identities, static_cast<int>(count_odd_characteristics(g)) + (1 << (2 * g)));
  }
}

TEST(Conversion, ProductLocus) {
  const auto rep = conversion_identities_check(ThetaContext(product_tau(5)));
  EXPECT_LT(rep.worst(), 1e-10);
}

TEST(MMatrix, GenericRankIsMaximal) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{20}));
  const CMatrix m = M_matrix(ctx);
  EXPECT_EQ(m.rows(), 4);
  EXPECT_EQ(m.cols(), 4);
  EXPECT_EQ(numerical_rank(m), 4);
}

TEST(MMatrix, DiagonalTauLosesRank) {
  const PeriodMatrix tau(CMatrix{{Complex(0, 1), 0.0}, {0.0, Complex(0, 2)}});
  EXPECT_LE(numerical_rank(M_matrix(ThetaContext(tau))), 3);
}

TEST(MMatrix, GenusOne) {
  const CMatrix m = M_matrix(ThetaContext(sample_period_matrix(1, std::uint64_t{21})));
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m.cols(), 2);
  EXPECT_EQ(numerical_rank(m), 2);
}

TEST(BoldA, RankEquivalenceWithM) {
  std::vector<PeriodMatrix> samples{sample_period_matrix(2, std::uint64_t{22}), product_tau(23),
                                    sample_period_matrix(3, std::uint64_t{24}), product_tau(25, 1, 2)};
  for (const auto& tau : samples) {
    const ThetaContext ctx(tau);
    const int n = sym_dim(tau.genus());
    const bool a_deficient = numerical_rank(bold_A_matrix(ctx)) < n;
    const bool m_deficient = numerical_rank(M_matrix(ctx)) < n + 1;
    EXPECT_EQ(a_deficient, m_deficient);
  }
  EXPECT_EQ(numerical_rank(bold_A_matrix(ThetaContext(sample_period_matrix(2, std::uint64_t{22})))), 3);
  EXPECT_LT(numerical_rank(bold_A_matrix(ThetaContext(product_tau(23)))), 3);
}

TEST(BoldA, ColumnsArePairMinorsOfM) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{26}));
  const CMatrix m = M_matrix(ctx);
  const CMatrix a = bold_A_matrix(ctx);
  const auto cols = bold_A_columns(2);
  const auto pairs = sym_pairs(2);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const int ca = static_cast<int>(cols[c].first.index()), cb = static_cast<int>(cols[c].second.index());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int r = static_cast<int>(p) + 1;
      const Complex minor = m(0, ca) * m(r, cb) - m(0, cb) * m(r, ca);
      // A_{ab,ij} = 8 pi i (1 + delta_ij)/2 (Theta_a dTheta_b/dtau_ij - Theta_b dTheta_a/dtau_ij)
      const Complex expected = 8.0 * kPi * kI * (pairs[p].first == pairs[p].second ? 1.0 : 0.5) * minor;
      EXPECT_LT(std::abs(a(static_cast<int>(p), static_cast<int>(c)) - expected), 1e-12 * max_abs(a));
    }
  }
}

TEST(Quadric, ProductPointGivesOffDiagonalWitness) {
  const auto res = quadric_criterion(ThetaContext(product_tau(30)));
  ASSERT_EQ(res.verdict, Verdict::decomposable_suspect);
  ASSERT_TRUE(res.witness.has_value());
  const CMatrix& b = *res.witness;
  EXPECT_LT(std::abs(b(0, 0)), 1e-8);
  EXPECT_LT(std::abs(b(1, 1)), 1e-8);
  EXPECT_NEAR(std::abs(b(0, 1)), 1.0, 1e-12);
}

TEST(Quadric, GenericPointIsIndecomposable) {
  for (int g = 2; g <= 3; ++g) {
    const auto res = quadric_criterion(ThetaContext(sample_period_matrix(g, static_cast<std::uint64_t>(31 + g))));
    EXPECT_EQ(res.verdict, Verdict::indecomposable);
    EXPECT_EQ(res.rank, sym_dim(g));
    EXPECT_FALSE(res.witness.has_value());
  }
}

TEST(Quadric, WitnessAnnihilatesEveryC) {
  const ThetaContext ctx(product_tau(34, 1, 2));
  const auto res = quadric_criterion(ctx);
  ASSERT_TRUE(res.witness.has_value());
  for (const auto& m : enumerate_characteristics(3, ParityFilter::odd)) {
    const CMatrix bc = *res.witness * C_matrix(ctx, m.eps(), m.delta());
    Complex tr = 0.0;
    for (int i = 0; i < 3; ++i) tr += bc(i, i);
    EXPECT_LT(std::abs(tr), 1e-8 * max_abs(C_matrix(ctx, m.eps(), m.delta())));
  }
}

TEST(Quadric, VerdictInvariantUnderModularGroup) {
  for (int s = 0; s < 4; ++s) {
    const auto gamma = sample_subgroup(SubgroupTag::full(), 2, 2, static_cast<std::uint64_t>(s));
    const auto generic = sample_period_matrix(2, static_cast<std::uint64_t>(40 + s));
    const auto prod = product_tau(static_cast<std::uint64_t>(50 + s));
    const auto moved_generic = act(gamma, generic);
    const auto moved_prod = act(gamma, prod);
    if (moved_generic.y_min() < 0.2 || moved_prod.y_min() < 0.2) continue;
    EXPECT_EQ(quadric_criterion(ThetaContext(moved_generic)).verdict, quadric_criterion(ThetaContext(generic)).verdict);
    EXPECT_EQ(quadric_criterion(ThetaContext(moved_prod)).verdict, Verdict::decomposable_suspect);
  }
}

TEST(Wedge, GenusTwoRotation) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{60}));
  const auto m = Characteristic::parse("11", "10");
  const CVector f = wedge_F(ctx, {m});
  const CVector& v = ctx.gradient(m);
  EXPECT_EQ(f[0], v[1]);
  EXPECT_EQ(f[1], -v[0]);
  EXPECT_EQ(numerical_rank(wedge_form_W(ctx, {m})), 1);
}

TEST(Wedge, PermutationInvariantAndValidated) {
  const ThetaContext ctx(sample_period_matrix(3, std::uint64_t{61}));
  const auto a = Characteristic::parse("100", "100"), b = Characteristic::parse("010", "110");
  const CMatrix w1 = wedge_form_W(ctx, {a, b}), w2 = wedge_form_W(ctx, {b, a});
  EXPECT_LT(max_abs_diff(w1, w2), 1e-14 * max_abs(w1));
  const CVector f1 = wedge_F(ctx, {a, b}), f2 = wedge_F(ctx, {b, a});
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(f1[static_cast<std::size_t>(i)] + f2[static_cast<std::size_t>(i)]), 1e-14 * max_abs(f1));
  EXPECT_THROW(wedge_form_W(ctx, {a, a}), DomainError);
  EXPECT_THROW(wedge_form_W(ctx, {a, Characteristic::parse("000", "000")}), DomainError);
}

TEST(Wedge, DependentGradientsVanish) {
  // on the product locus H_1 x H_2, odd m1 (+) even m2 gradients all point along e_1
  const ThetaContext ctx(product_tau(62, 1, 2));
  const auto a = direct_sum(Characteristic::parse("1", "1"), Characteristic::parse("00", "00"));
  const auto b = direct_sum(Characteristic::parse("1", "1"), Characteristic::parse("01", "00"));
  EXPECT_LT(max_abs(wedge_form_W(ctx, {a, b})), 1e-12);
}

TEST(Pairing, ParityUnderSwap) {
  for (int g = 2; g <= 3; ++g) {
    const ThetaContext ctx(sample_period_matrix(g, static_cast<std::uint64_t>(70 + g)));
    const auto vecs = all_f2_vectors(g);
    const CMatrix b1 = freitag_pairing(ctx, vecs[1], vecs[2]);
    const CMatrix b2 = freitag_pairing(ctx, vecs[2], vecs[1]);
    const CMatrix expected = b1 * Complex(static_cast<double>(sign_power(g + 1)));
    EXPECT_LT(max_abs_diff(b2, expected), 1e-12 * max_abs(b1)) << "g=" << g;
  }
}

TEST(Pairing, ScalarCaseGenusTwo) {
  // g = 2: B_22 = f d_11 h - h d_11 f with f = Theta[eps], h = Theta[delta]
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{74}));
  const auto e = vec("01"), d = vec("11");
  const CMatrix b = freitag_pairing(ctx, e, d);
  const Complex f = ctx.jet(e).value, h = ctx.jet(d).value;
  const Complex expected = f * ctx.d_matrix(d)(0, 0) - h * ctx.d_matrix(e)(0, 0);
  EXPECT_LT(std::abs(b(1, 1) - expected), 1e-13 * std::abs(expected));
}

TEST(Adjugate, TheoremGenusTwoAndThree) {
  for (int g = 2; g <= 3; ++g) {
    const ThetaContext ctx(sample_period_matrix(g, static_cast<std::uint64_t>(80 + g)));
    const auto vecs = all_f2_vectors(g);
    for (std::size_t a = 0; a < vecs.size(); ++a)
      for (std::size_t b = 0; b < vecs.size(); ++b) {
        if (a == b) continue;
        EXPECT_LT(adjugate_theorem_check(ctx, vecs[a], vecs[b]).relative(), 1e-9) << "g=" << g;
      }
  }
}

TEST(Adjugate, ResidualTracksTruncationTolerance) {
  // Small Im(tau) so that truncation is visible. Against a tightly evaluated
  // pairing the residual falls at least tenfold per factor 1e2 in tol; with
  // both sides from one context it stays at rounding level.
  const double y = 0.03;
  const PeriodMatrix tau(CMatrix{{Complex(0.13, y), Complex(0.21, 0.2 * y)}, {Complex(0.21, 0.2 * y), Complex(-0.17, 1.3 * y)}});
  ThetaOptions tight;
  tight.tol = 1e-15;
  const ThetaContext ref(tau, tight);
  const auto vecs = all_f2_vectors(2);
  std::vector<double> residuals;
  for (double tol : {1e-2, 1e-4, 1e-6}) {
    ThetaOptions opts;
    opts.tol = tol;
    const ThetaContext ctx(tau, opts);
    double worst = 0.0;
    for (const auto& a : vecs)
      for (const auto& b : vecs) {
        if (a == b) continue;
        const CMatrix lhs = adjugate(A_matrix(ctx, a, b) * Complex(0.5));
        worst = std::max(worst, compare(lhs, freitag_pairing(ref, a, b) * (4.0 * kPi * kI)).relative());
        EXPECT_LT(adjugate_theorem_check(ctx, a, b).relative(), 1e-13);
      }
    EXPECT_LT(worst, tol);
    residuals.push_back(worst);
  }
  EXPECT_GT(residuals[0], 1e-12);
  for (std::size_t k = 1; k < residuals.size(); ++k) EXPECT_LE(residuals[k], residuals[k - 1] / 10.0);
}

TEST(Adjugate, TheoremOnProductLocus) {
  const ThetaContext ctx(product_tau(85));
  EXPECT_LT(adjugate_theorem_check(ctx, vec("00"), vec("10")).relative(), 1e-9);
}

TEST(Adjugate, WSumIdentity) {
  for (int g = 2; g <= 3; ++g) {
    const ThetaContext ctx(sample_period_matrix(g, static_cast<std::uint64_t>(90 + g)));
    const auto vecs = all_f2_vectors(g);
    for (std::size_t a = 0; a < vecs.size(); ++a)
      for (std::size_t b = a + 1; b < vecs.size(); ++b)
        EXPECT_LT(adjugate_W_identity_check(ctx, vecs[a], vecs[b]).relative(), 1e-9) << "g=" << g;
  }
}

TEST(Adjugate, WSumTermCount) {
  for (int g = 2; g <= 4; ++g) {
    const auto vecs = all_f2_vectors(g);
    const F2Vector ed = vecs[1];
    int admissible = 0;
    for (const auto& a : vecs) admissible += dot(ed, a);
    EXPECT_EQ(admissible, 1 << (g - 1));
  }
}

TEST(DetA, WeightAndNonvanishing) {
  std::vector<PeriodMatrix> taus;
  for (int s = 0; s < 3; ++s) taus.push_back(sample_period_matrix(2, static_cast<std::uint64_t>(100 + s)));
  std::vector<SymplecticElement> gammas{SymplecticElement::identity(2)};
  for (int s = 0; s < 3; ++s) gammas.push_back(sample_subgroup(SubgroupTag::theta_star24(), 2, 2, static_cast<std::uint64_t>(s)));
  const auto rep = det_A_weight_check(vec("00"), vec("01"), taus, gammas);
  EXPECT_TRUE(rep.nonvanishing);
  EXPECT_LT(rep.weight_residual, 1e-7);
}

TEST(DetA, IdentityAndTranslationExact) {
  const auto tau = sample_period_matrix(2, std::uint64_t{110});
  const IntMatrix b{{2, 1}, {1, 2}};
  const auto rep = det_A_weight_check(vec("10"), vec("11"), {tau},
                                      {SymplecticElement::identity(2), translation(b * std::int64_t{4})});
  EXPECT_LT(rep.weight_residual, 1e-11);
}

TEST(DetA, RejectsGammaOutsideSubgroup) {
  EXPECT_THROW(det_A_weight_check(vec("10"), vec("11"), {sample_period_matrix(2, std::uint64_t{1})}, {inversion(2)}),
               DomainError);
}

TEST(Omega, LayoutAndNonvanishing) {
  const ThetaContext ctx(sample_period_matrix(2, std::uint64_t{120}));
  const auto e = vec("01"), d = vec("10");
  const CVector w = omega_coefficients(ctx, e, d);
  const CMatrix adj = adjugate(A_matrix(ctx, e, d));
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0], adj(0, 0));
  EXPECT_EQ(w[1], 2.0 * adj(0, 1));
  EXPECT_EQ(w[2], adj(1, 1));
  EXPECT_GT(max_abs(w), 1e-6);
  EXPECT_THROW(omega_coefficients(ctx, e, e), DomainError);
}

TEST(Omega, WedgeTraceGenusThree) {
  const ThetaContext ctx(sample_period_matrix(3, std::uint64_t{121}));
  const auto a = Characteristic::parse("100", "100"), b = Characteristic::parse("011", "010");
  EXPECT_GT(max_abs(trace_coefficients(wedge_form_W(ctx, {a, b}))), 1e-8);
}

TEST(Fourier, GenusOneReducesToConvolution) {
  using Q = boost::multiprecision::cpp_rational;
  FourierCoefficients<Q> f{{IntMatrix{{0}}, Q(1)}, {IntMatrix{{2}}, Q(3)}, {IntMatrix{{4}}, Q(5)}};
  FourierCoefficients<Q> h{{IntMatrix{{0}}, Q(2)}, {IntMatrix{{2}}, Q(7)}};
  const auto r = fourier_coefficient_pairing(IntMatrix{{4}}, f, h);
  // -(a_f(0) a_h(4) + a_f(2) a_h(2) + a_f(4) a_h(0)) with a_h(4) = 0
  EXPECT_EQ(r.value, Q(-(3 * 7 + 5 * 2)));
  EXPECT_EQ(r.summands.size(), 2u);
}

TEST(Fourier, OnlyTrivialSplittingsForRankOneBoundary) {
  using Q = boost::multiprecision::cpp_rational;
  // T = diag(2, 0): every PSD splitting has T1 in {0, T} among even candidates
  const IntMatrix t{{2, 0}, {0, 0}};
  FourierCoefficients<Q> f;
  for (int a = -2; a <= 4; a += 2)
    for (int c = -2; c <= 2; c += 2)
      for (int b = -2; b <= 2; ++b) f[IntMatrix{{a, b}, {b, c}}] = Q(1);
  const auto r = fourier_coefficient_pairing(t, f, f);
  ASSERT_EQ(r.summands.size(), 2u);
  for (const auto& s : r.summands) EXPECT_TRUE(s.t1 == IntMatrix(2, 2) || s.t1 == t);
}

TEST(Fourier, NonSymmetricRejected) {
  FourierCoefficients<double> f;
  EXPECT_THROW(fourier_coefficient_pairing(IntMatrix{{0, 1}, {0, 0}}, f, f), ShapeError);
}

TEST(Fourier, PositiveSemidefiniteTest) {
  EXPECT_TRUE(is_positive_semidefinite(IntMatrix{{2, 1}, {1, 2}}));
  EXPECT_TRUE(is_positive_semidefinite(IntMatrix{{0, 0}, {0, 0}}));
  EXPECT_FALSE(is_positive_semidefinite(IntMatrix{{0, 1}, {1, 0}}));
  EXPECT_FALSE(is_positive_semidefinite(IntMatrix{{2, 3}, {3, 2}}));
}
