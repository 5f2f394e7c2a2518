#include <gtest/gtest.h>

#include <algorithm>

#include "thetaforms/f2char.hpp"
#include "thetaforms/period_matrix.hpp"

using namespace thetaforms;

TEST(Enumerate, OddGenusTwo) { EXPECT_EQ(enumerate_characteristics(2, ParityFilter::odd).size(), 6u); }

TEST(Enumerate, EvenGenusOneInOrder) {
  const auto e = enumerate_characteristics(1, ParityFilter::even);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], Characteristic::parse("0", "0"));
  EXPECT_EQ(e[1], Characteristic::parse("0", "1"));
  EXPECT_EQ(e[2], Characteristic::parse("1", "0"));
}

TEST(Enumerate, GenusThreeSplit) {
  const auto all = enumerate_characteristics(3);
  EXPECT_EQ(all.size(), 64u);
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto& m) { return m.is_even(); }), 36);
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto& m) { return m.is_odd(); }), 28);
}

TEST(Enumerate, OutOfRange) {
  EXPECT_THROW(enumerate_characteristics(0), SizeLimitError);
  EXPECT_THROW(enumerate_characteristics(13), SizeLimitError);
}

TEST(Enumerate, CanonicalIndexIsPosition) {
  const auto all = enumerate_characteristics(3);
  for (std::size_t k = 0; k < all.size(); ++k) EXPECT_EQ(all[k].index(), k);
}

TEST(Parity, Examples) {
  EXPECT_EQ(characteristic_parity(Characteristic::parse("00", "00")), Parity::even);
  EXPECT_EQ(characteristic_parity(Characteristic::parse("1", "1")), Parity::odd);
  EXPECT_EQ(characteristic_parity(Characteristic::parse("11", "10")), Parity::odd);
}

TEST(Parity, CountsForAllGenera) {
  for (int g = 1; g <= 6; ++g) {
    const auto even = count_even_characteristics(g), odd = count_odd_characteristics(g);
    EXPECT_EQ(even + odd, std::uint64_t{1} << (2 * g));
    EXPECT_EQ(even - odd, std::uint64_t{1} << g);
    EXPECT_EQ(enumerate_characteristics(g, ParityFilter::even).size(), even);
    EXPECT_EQ(enumerate_characteristics(g, ParityFilter::odd).size(), odd);
  }
}

TEST(Parity, InvariantUnderCoordinatePermutation) {
  for (const auto& m : enumerate_characteristics(3)) {
    std::vector<int> perm{0, 1, 2};
    do {
      std::vector<std::uint8_t> e, d;
      for (int p : perm) {
        e.push_back(static_cast<std::uint8_t>(m.eps()[p]));
        d.push_back(static_cast<std::uint8_t>(m.delta()[p]));
      }
      EXPECT_EQ(Characteristic(F2Vector(e), F2Vector(d)).parity(), m.parity());
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(F2Vector, ArithmeticModTwo) {
  const auto a = F2Vector::parse("0110"), b = F2Vector::parse("1100");
  EXPECT_EQ((a + b).str(), "1010");
  EXPECT_EQ(dot(a, b), 1);
  EXPECT_TRUE((a + a).is_zero());
  EXPECT_THROW(F2Vector::parse("012"), ParseError);
  EXPECT_THROW(a + F2Vector::parse("1"), ShapeError);
}

TEST(F2Vector, IndexRoundTrip) {
  for (std::uint64_t i = 0; i < 16; ++i) EXPECT_EQ(F2Vector::from_index(i, 4).index(), i);
  EXPECT_EQ(F2Vector::from_index(1, 3).str(), "001");
}

TEST(Characteristic, DirectSumParityAdds) {
  for (const auto& a : enumerate_characteristics(1))
    for (const auto& b : enumerate_characteristics(2)) {
      const auto s = direct_sum(a, b);
      EXPECT_EQ(s.genus(), 3);
      EXPECT_EQ(s.is_odd(), a.is_odd() != b.is_odd());
    }
}

TEST(TwoTorsion, LatticeMembershipAndInjectivity) {
  const PeriodMatrix tau = sample_period_matrix(2, std::uint64_t{4});
  const RMatrix& yi = tau.im_inverse();
  std::vector<CVector> points;
  for (const auto& m : enumerate_characteristics(2)) {
    const auto x = two_torsion_point(m, tau.matrix());
    // 2x = delta + eps tau: recover eps from Im, then delta from Re
    std::vector<double> e(2);
    for (int i = 0; i < 2; ++i) {
      double s = 0.0;
      for (int j = 0; j < 2; ++j) s += 2.0 * x.coords[static_cast<std::size_t>(j)].imag() * yi(j, i);
      e[static_cast<std::size_t>(i)] = s;
      EXPECT_NEAR(s, std::round(s), 1e-12);
      EXPECT_NEAR(s, m.eps()[i], 1e-12);
    }
    for (int i = 0; i < 2; ++i) {
      double re = 2.0 * x.coords[static_cast<std::size_t>(i)].real();
      for (int j = 0; j < 2; ++j) re -= e[static_cast<std::size_t>(j)] * tau(j, i).real();
      EXPECT_NEAR(re, m.delta()[i], 1e-12);
    }
    points.push_back(x.coords);
  }
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      EXPECT_GT(std::max(std::abs(points[a][0] - points[b][0]), std::abs(points[a][1] - points[b][1])), 1e-3);
}
