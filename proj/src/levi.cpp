#include "worm/levi.hpp"

#include <array>

namespace worm {

std::string_view to_string(LeviCase c) {
  switch (c) {
    case LeviCase::disc_le1:
      return "disc_le1";
    case LeviCase::disc_gt1:
      return "disc_gt1";
    case LeviCase::halfplane:
      return "halfplane";
  }
  return "unknown";
}

namespace {

cplx rotated(const RotationParams& rp, const PointCW& pt, double gamma) {
  return (pt.w + cplx(0.0, rp.delta_tilde)) *
         cplx(std::cos(gamma), -std::sin(gamma));
}

}  // namespace

double levi_halfplane(const RotationParams& rp, const PointCW& pt) {
  const double gamma = rotation_angle(rp, pt.z);
  const double k = 1.0 - rp.delta;
  return k * k * rotated_real_part(rp, pt, gamma) / (4.0 * std::norm(pt.z));
}

double levi_disc_normalized(const RotationParams& rp, const SmoothedProfile& sp,
                            const PointCW& pt) {
  const double gamma = rotation_angle(rp, pt.z);
  const cplx x = rotated(rp, pt, gamma);
  const double s0 = sp.eval(gamma);
  const double s1 = sp.deriv(gamma);
  const double s2 = sp.second(gamma);
  // Re(i X) = -Im X
  return s0 * (-s2 + 2.0 * x.real()) + 2.0 * s1 * x.imag() + s1 * s1;
}

double levi_disc(const RotationParams& rp, const SmoothedProfile& sp,
                 const PointCW& pt) {
  const double k = 1.0 - rp.delta;
  return k * k * levi_disc_normalized(rp, sp, pt) / std::norm(pt.z);
}

DiscDecomposition levi_disc_decompose(const RotationParams& rp,
                                      const SmoothedProfile& sp,
                                      const PointCW& pt) {
  if (!(std::abs(rho_delta_eta_eval(rp, sp, pt)) <= kBoundaryTolerance)) {
    throw ParameterError("levi_disc_decompose: not a boundary point");
  }
  const double gamma = rotation_angle(rp, pt.z);
  const cplx offset = rotated(rp, pt, gamma) - 1.0;
  DiscDecomposition d;
  d.s_val = sp.eval(gamma);
  d.theta = std::arg(offset);
  d.case_tag = d.s_val <= 1.0 ? LeviCase::disc_le1 : LeviCase::disc_gt1;
  return d;
}

double levi_finite_difference(const std::function<double(const PointCW&)>& f,
                              const PointCW& pt, double h) {
  const auto at = [&](const std::array<double, 4>& x) {
    return f(PointCW{cplx(x[0], x[1]), cplx(x[2], x[3])});
  };
  const std::array<double, 4> x0 = {pt.z.real(), pt.z.imag(), pt.w.real(),
                                    pt.w.imag()};
  const double f0 = at(x0);

  std::array<double, 4> grad{};
  double hess[4][4] = {};
  for (int i = 0; i < 4; ++i) {
    auto xp = x0;
    auto xm = x0;
    xp[i] += h;
    xm[i] -= h;
    const double fp = at(xp);
    const double fm = at(xm);
    grad[i] = (fp - fm) / (2.0 * h);
    hess[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      auto pp = x0, pm = x0, mp = x0, mm = x0;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess[i][j] = hess[j][i] = (at(pp) - at(pm) - at(mp) + at(mm)) / (4.0 * h * h);
    }
  }

  const cplx f_z(0.5 * grad[0], -0.5 * grad[1]);
  const cplx f_w(0.5 * grad[2], -0.5 * grad[3]);
  const std::array<cplx, 2> v = {-f_w, f_z};
  // d^2 f / dz_j dzbar_k from the real Hessian; coordinate j uses real
  // indices (2j, 2j + 1).
  const auto mixed = [&](int j, int k) {
    const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
    return 0.25 * cplx(hess[xj][xk] + hess[yj][yk], hess[xj][yk] - hess[yj][xk]);
  };
  cplx sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) sum += mixed(j, k) * v[j] * std::conj(v[k]);
  }
  return sum.real();
}

double levi_fd_check(DefiningFunction which, const RotationParams& rp,
                     const SmoothedProfile& sp, const PointCW& pt, double h,
                     bool richardson) {
  if (!(h >= 1e-6 && h <= 1e-3)) {
    throw ParameterError("levi_fd_check: h must lie in [1e-6, 1e-3]");
  }
  if (pt.z == cplx(0.0, 0.0)) throw OffChartError();
  std::function<double(const PointCW&)> f;
  if (which == DefiningFunction::halfplane) {
    f = [&](const PointCW& q) { return -halfplane_margin(rp, q); };
  } else {
    f = [&](const PointCW& q) { return rho_delta_eta_eval(rp, sp, q); };
  }
  const double coarse = levi_finite_difference(f, pt, h);
  if (!richardson) return coarse;
  const double fine = levi_finite_difference(f, pt, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace worm
