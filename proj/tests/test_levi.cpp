#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "worm/levi.hpp"

using namespace worm;

namespace {

const cplx I(0.0, 1.0);

struct Fixture {
  ProfileS p = build_profile();
  SmoothedProfile sp = build_smoothed(p, 5e-5);
  RotationParams rp = RotationParams::make(0.1, sp.eta(), 1e-5, 1e-7);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

// Boundary point of the rotating disc over ln|z|^2 = lz at disc angle theta.
PointCW disc_point(const RotationParams& rp, const SmoothedProfile& sp, double lz,
                   double theta, double phase = 0.0) {
  const cplx z = std::exp(0.5 * lz) * std::exp(I * phase);
  const double g = rotation_angle(rp, z);
  const cplx x = 1.0 + std::sqrt(sp.eval(g)) * std::exp(I * theta);
  return {z, x * std::exp(I * g) - I * rp.delta_tilde};
}

// Boundary point of H_t: Re X = t, Im X = y.
PointCW halfplane_point(const RotationParams& rp, double lz, double y, double t) {
  const cplx z = std::exp(0.5 * lz);
  const double g = rotation_angle(rp, z);
  return {z, cplx(t, y) * std::exp(I * g) - I * rp.delta_tilde};
}

}  // namespace

TEST(LeviHalfPlane, ClosedFormExample) {
  const RotationParams rp = RotationParams::make(0.1, 0.0, 0.1, 0.01);
  const PointCW pt = halfplane_point(rp, kHalfPi, 0.3, 0.01);
  EXPECT_NEAR(halfplane_margin(rp, pt), 0.0, 1e-15);
  const double expect = 0.81 * 0.01 / (4.0 * std::exp(kHalfPi));
  EXPECT_NEAR(levi_halfplane(rp, pt), expect, 1e-15);
  EXPECT_NEAR(expect, 4.2095614211029e-4, 1e-15);
}

TEST(LeviHalfPlane, ZeroAtZeroOffsetPositiveOtherwise) {
  const RotationParams r0 = RotationParams::make(0.1, 0.0, 0.1, 0.0);
  EXPECT_NEAR(levi_halfplane(r0, halfplane_point(r0, 1.0, 0.4, 0.0)), 0.0, 1e-16);
  const RotationParams r1 = r0.with_t(1e-3);
  for (double lz : {-0.9, 0.5, 2.0, 4.0}) {
    EXPECT_GT(levi_halfplane(r1, halfplane_point(r1, lz, -0.7, 1e-3)), 0.0);
  }
}

TEST(LeviHalfPlane, LinearInOffset) {
  const RotationParams a = RotationParams::make(0.1, 0.0, 0.05, 0.01);
  const RotationParams b = a.with_t(0.02);
  for (double lz : {-0.5, 1.0, 3.5}) {
    const double va = levi_halfplane(a, halfplane_point(a, lz, 0.2, 0.01));
    const double vb = levi_halfplane(b, halfplane_point(b, lz, 0.2, 0.02));
    EXPECT_NEAR(va / vb, 0.5, 1e-12);
  }
}

TEST(LeviDisc, FlatZoneClosedForm) {
  const auto& f = fx();
  const double eta = f.sp.eta();
  for (double th : {0.0, 0.7, 2.0, 3.0}) {
    const PointCW pt = disc_point(f.rp, f.sp, 1.0, th);
    const double v = levi_disc_normalized(f.rp, f.sp, pt);
    EXPECT_NEAR(v, (1 + eta) * 2.0 * (1.0 + std::sqrt(1 + eta) * std::cos(th)), 1e-12) << th;
    const double z2 = std::norm(pt.z);
    const double d1 = 1.0 - f.rp.delta;
    EXPECT_NEAR(levi_disc(f.rp, f.sp, pt), v * d1 * d1 / z2, 1e-12);
  }
  // innermost point: negative, which is why the half-plane cut is needed
  EXPECT_LT(levi_disc_normalized(f.rp, f.sp, disc_point(f.rp, f.sp, 1.0, kPi)), 0.0);
  EXPECT_LT(halfplane_margin(f.rp.with_t(0.0), disc_point(f.rp, f.sp, 1.0, kPi)), 0.0);
}

TEST(LeviDisc, DecomposeAngles) {
  const auto& f = fx();
  for (double lz : {0.5, 3.2, 4.0}) {
    const DiscDecomposition a = levi_disc_decompose(f.rp, f.sp, disc_point(f.rp, f.sp, lz, 0.0));
    EXPECT_NEAR(a.theta, 0.0, 1e-9);
    const DiscDecomposition b =
        levi_disc_decompose(f.rp, f.sp, disc_point(f.rp, f.sp, lz, kHalfPi));
    EXPECT_NEAR(b.theta, kHalfPi, 1e-9);
  }
}

TEST(LeviDisc, DecomposeRoundTripAndCases) {
  const auto& f = fx();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lz(-0.9, kPi + 0.9), th(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const PointCW pt = disc_point(f.rp, f.sp, lz(rng), th(rng));
    const DiscDecomposition d = levi_disc_decompose(f.rp, f.sp, pt);
    const double g = rotation_angle(f.rp, pt.z);
    const cplx x = (pt.w + I * f.rp.delta_tilde) * std::exp(-I * g);
    const cplx back = 1.0 + std::sqrt(d.s_val) * std::exp(I * d.theta);
    ASSERT_NEAR(std::abs(back - x), 0.0, 1e-10);
    ASSERT_EQ(d.case_tag, d.s_val > 1.0 ? LeviCase::disc_gt1 : LeviCase::disc_le1);
  }
}

TEST(LeviDisc, DecomposeRejectsInteriorPoints) {
  const auto& f = fx();
  EXPECT_THROW(levi_disc_decompose(f.rp, f.sp, {std::exp(0.5), 0.3}), ParameterError);
}

TEST(LeviDisc, CaseBoundsOnSamples) {
  const auto& f = fx();
  const RotationParams r0 = f.rp.with_t(0.0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lz(-0.95, kPi + 0.95), th(-kPi, kPi);
  int le1 = 0, gt1 = 0;
  for (int i = 0; i < 20000; ++i) {
    const PointCW pt = disc_point(f.rp, f.sp, lz(rng), th(rng));
    if (halfplane_margin(r0, pt) <= 0.0) continue;
    const DiscDecomposition d = levi_disc_decompose(f.rp, f.sp, pt);
    const double v = levi_disc_normalized(f.rp, f.sp, pt);
    if (d.s_val <= 1.0) {
      const double c = std::cos(d.theta) + std::sqrt(d.s_val);
      const double bound = d.s_val * (1.0 - d.s_val + c * c);
      ASSERT_GE(bound, -1e-12);
      ASSERT_GE(v, bound - 1e-9);
      ++le1;
    } else {
      const double g = rotation_angle(f.rp, pt.z);
      const double r = std::abs(pt.w + I * f.rp.delta_tilde);
      ASSERT_LT(r, 50.0);
      ASSERT_GT(v, 2.0 * std::abs(f.sp.deriv(g)) * (50.0 - r) - 1e-9);
      ++gt1;
    }
  }
  EXPECT_GT(le1, 100);
  EXPECT_GT(gt1, 100);
}

TEST(LeviFD, QuadraticBaseline) {
  // f = |z|^2 + |w|^2, direction (-conj w, conj z): L = |w|^2 + |z|^2
  const auto f = [](const PointCW& q) { return std::norm(q.z) + std::norm(q.w); };
  const PointCW pt{cplx(0.4, -1.2), cplx(0.9, 0.3)};
  const double expect = std::norm(pt.z) + std::norm(pt.w);
  EXPECT_NEAR(levi_finite_difference(f, pt, 1e-2), expect, 1e-10);
}

TEST(LeviFD, HalfPlaneMatchesClosedForm) {
  const auto& f = fx();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lz(-0.9, kPi + 0.9), y(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const PointCW pt = halfplane_point(f.rp, lz(rng), y(rng), f.rp.t);
    const double fd = levi_fd_check(DefiningFunction::halfplane, f.rp, f.sp, pt, 1e-4);
    ASSERT_NEAR(fd, levi_halfplane(f.rp, pt), 1e-5);
  }
}

TEST(LeviFD, DiscMatchesClosedFormInFlatZone) {
  const auto& f = fx();
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> lz(0.2, kPi - 0.2), th(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const PointCW pt = disc_point(f.rp, f.sp, lz(rng), th(rng));
    const double fd = levi_fd_check(DefiningFunction::disc, f.rp, f.sp, pt, 1e-4);
    ASSERT_NEAR(fd, levi_disc(f.rp, f.sp, pt), 1e-4);
  }
}

TEST(LeviFD, RichardsonNotWorseOnSmoothPoints) {
  const auto& f = fx();
  const PointCW pt = disc_point(f.rp, f.sp, 3.3, 0.4);
  const double exact = levi_disc(f.rp, f.sp, pt);
  const double plain = levi_fd_check(DefiningFunction::disc, f.rp, f.sp, pt, 1e-3);
  const double rich = levi_fd_check(DefiningFunction::disc, f.rp, f.sp, pt, 1e-3, true);
  EXPECT_LE(std::abs(rich - exact), std::abs(plain - exact) + 1e-8);
}

TEST(LeviFD, StepOutOfRangeThrows) {
  const auto& f = fx();
  const PointCW pt = disc_point(f.rp, f.sp, 1.0, 0.0);
  EXPECT_THROW(levi_fd_check(DefiningFunction::disc, f.rp, f.sp, pt, 1e-8), ParameterError);
}
