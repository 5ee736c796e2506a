#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "worm/numerics.hpp"
#include "worm/sampling.hpp"

using namespace worm;

TEST(FlatG, VanishesLeftOfZero) {
  EXPECT_EQ(flat_g(-3.0), 0.0);
  EXPECT_EQ(flat_g(0.0), 0.0);
}

TEST(FlatG, MatchesExp) {
  EXPECT_NEAR(flat_g(1.0), 0.36787944117144233, 1e-16);
  // long double oracle for exp(-1/0.07)
  const long double ref = std::exp(-1.0L / 0.07L);
  EXPECT_NEAR(flat_g(0.07), static_cast<double>(ref), 1e-20);
  EXPECT_NEAR(flat_g(0.07), 6.24874950946309e-7, 1e-20);
}

TEST(FlatG, FlatToEveryOrder) {
  for (int k = 1; k <= 8; ++k) {
    EXPECT_LT(flat_g(1e-2) / std::pow(1e-2, k), 1e-10) << "k=" << k;
  }
}

TEST(FlatG, DerivativesMatchDifferences) {
  for (double x : {0.05, 0.1, 0.3, 1.0, 2.5}) {
    const double h = 1e-5 * x;
    const double fd1 = (flat_g(x + h) - flat_g(x - h)) / (2 * h);
    const double fd2 = (flat_g_deriv(x + h) - flat_g_deriv(x - h)) / (2 * h);
    EXPECT_NEAR(flat_g_deriv(x), fd1, 1e-7 * std::abs(fd1) + 1e-300);
    EXPECT_NEAR(flat_g_second(x), fd2, 1e-6 * std::abs(fd2) + 1e-300);
  }
}

TEST(UnitStep, EndpointsAndMidpoint) {
  EXPECT_EQ(unit_step(-0.1, 1.0), 0.0);
  EXPECT_EQ(unit_step(0.0, 1.0), 0.0);
  EXPECT_EQ(unit_step(1.0, 1.0), 1.0);
  EXPECT_EQ(unit_step(1.5, 1.0), 1.0);
  EXPECT_NEAR(unit_step(0.5, 1.0), 0.5, 1e-15);
}

TEST(UnitStep, MonotoneAndSymmetric) {
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double u = 0.3 * i / 1000.0;
    const double v = unit_step(u, 0.3);
    EXPECT_GE(v, prev);
    EXPECT_NEAR(v + unit_step(0.3 - u, 0.3), 1.0, 1e-14);
    prev = v;
  }
}

TEST(Quadrature, SimpsonPolynomialAndTranscendental) {
  const auto r = adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(r.value, 4.0, 1e-12);
  const auto s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi, 1e-11);
  EXPECT_NEAR(s.value, 2.0, 1e-10);
}

TEST(Quadrature, SimpsonExhaustedDepthThrows) {
  EXPECT_THROW(adaptive_simpson([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0,
                                1e-15, 4),
               QuadratureError);
}

TEST(Quadrature, GaussLegendreExactForDegree15) {
  const auto f = [](double x) { return std::pow(x, 15) - 3 * x * x; };
  EXPECT_NEAR(gauss_legendre8(f, -1.0, 2.0), (std::pow(2.0, 16) - 1.0) / 16.0 - 9.0, 1e-9);
}

TEST(Quadrature, CumulativeMatchesAntiderivative) {
  CumulativeIntegral ci([](double x) { return std::cos(x); }, 0.0, 3.0, 64, 1e-12);
  for (double x : {0.0, 0.01, 0.7, 1.234, 2.999, 3.0}) {
    EXPECT_NEAR(ci(x), std::sin(x), 1e-11) << x;
  }
  EXPECT_NEAR(ci.total(), std::sin(3.0), 1e-11);
}

TEST(Roots, BisectionFindsCosineZero) {
  const double r = bisect_root([](double x) { return std::cos(x); }, 1.0, 2.0);
  EXPECT_NEAR(r, kHalfPi, 1e-12);
}

TEST(Roots, DoublingBracketsSignChange) {
  const auto f = [](double x) { return 10.0 - x; };
  const Bracket b = bracket_by_doubling(f, 0.0, 0.5, 100.0);
  EXPECT_LE(b.lo, 10.0);
  EXPECT_GE(b.hi, 10.0);
}

TEST(Minimize, GoldenSectionParabola) {
  const auto r = golden_section_min([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -1, 2);
  EXPECT_NEAR(r.x, 0.3, 1e-6);
  EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(Sampling, HaltonIsReproducibleAndInUnitCube) {
  const Halton a(7), b(7), c(8);
  bool differs = false;
  for (std::size_t i = 0; i < 1000; ++i) {
    for (unsigned d = 0; d < Halton::kMaxDim; ++d) {
      const double v = a(i, d);
      ASSERT_GE(v, 0.0);
      ASSERT_LT(v, 1.0);
      ASSERT_EQ(v, b(i, d));
      differs = differs || v != c(i, d);
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Sampling, ParallelArgminReturnsLowestIndex) {
  std::vector<double> v(10007);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& x : v) x = u(rng);
  v[4000] = v[9000] = -1.0;
  const ArgMin m = parallel_argmin(v.size(), [&](std::size_t i) { return v[i]; });
  EXPECT_EQ(m.value, -1.0);
  EXPECT_EQ(m.index, 4000u);
  const ArgMax M = parallel_argmax(v.size(), [&](std::size_t i) { return -v[i]; });
  EXPECT_EQ(M.index, 4000u);
}

TEST(Sampling, NanCountsAsWorst) {
  const ArgMin m = parallel_argmin(5, [](std::size_t i) { return i == 3 ? NAN : 1.0; });
  EXPECT_EQ(m.index, 3u);
}
