#include "worm/geometry.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace worm {

double distance(const PointCW& p, const PointCW& q) {
  return std::sqrt(std::norm(p.z - q.z) + std::norm(p.w - q.w));
}

double delta_tilde_of(double delta) {
  return std::sin(delta * kPi / (2.0 * (1.0 - delta)));
}

RotationParams RotationParams::make(double epsilon, double eta, double delta,
                                    double t) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("RotationParams: delta must lie in (0, 1)");
  }
  if (!(t >= 0.0 && t < 1.0)) {
    throw ParameterError("RotationParams: t must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw ParameterError("RotationParams: epsilon must be > 0");
  }
  return {epsilon, eta, delta, t, delta_tilde_of(delta)};
}

RotationParams RotationParams::with_t(double new_t) const {
  return make(epsilon, eta, delta, new_t);
}

namespace {

double log_abs2(cplx z) {
  const double n = std::norm(z);
  if (n == 0.0) throw OffChartError();
  return std::log(n);
}

cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

double rho_eval(const ProfileS& p, const PointCW& pt) {
  const double s = log_abs2(pt.z);
  return std::norm(pt.w - unit(s)) - p.eval(s);
}

double rotation_angle(const RotationParams& rp, cplx z) {
  return rp.delta * kHalfPi + (1.0 - rp.delta) * log_abs2(z);
}

double rotated_real_part(const RotationParams& rp, const PointCW& pt, double gamma) {
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  // Im(w) + delta_tilde as an unevaluated sum (two-sum).
  const double b = pt.w.imag() + rp.delta_tilde;
  const double bv = b - pt.w.imag();
  const double b_err = (pt.w.imag() - (b - bv)) + (rp.delta_tilde - bv);
  // Error-free products via fma.
  const double p1 = pt.w.real() * c;
  const double e1 = std::fma(pt.w.real(), c, -p1);
  const double p2 = b * s;
  const double e2 = std::fma(b, s, -p2);
  const double sum = p1 + p2;
  const double sv = sum - p1;
  const double e3 = (p1 - (sum - sv)) + (p2 - sv);
  return sum + (e1 + e2 + e3 + b_err * s);
}

double halfplane_margin(const RotationParams& rp, const PointCW& pt) {
  return rotated_real_part(rp, pt, rotation_angle(rp, pt.z)) - rp.t;
}

double rho_delta_eta_eval(const RotationParams& rp, const SmoothedProfile& sp,
                          const PointCW& pt) {
  const double g = rotation_angle(rp, pt.z);
  const cplx shifted = pt.w + cplx(0.0, rp.delta_tilde);
  return std::norm(shifted - unit(g)) - sp.eval(g);
}

bool in_domain_D(const RotationParams& rp, const SmoothedProfile& sp,
                 const PointCW& pt) {
  if (pt.z == cplx(0.0, 0.0)) return false;
  return rho_delta_eta_eval(rp, sp, pt) < 0.0 && halfplane_margin(rp, pt) > 0.0;
}

// ---------------------------------------------------------------------------

namespace {

struct ArcObjective {
  double abs_z;
  cplx w;

  double operator()(double z_radius, double cos_s, double sin_s,
                    double disc_radius) const {
    const double dz = abs_z - z_radius;
    const double dw = std::max(0.0, std::abs(w - cplx(cos_s, sin_s)) - disc_radius);
    return std::sqrt(dz * dz + dw * dw);
  }
};

double arc_value(const ProfileS& p, const ArcObjective& f, double s) {
  return f(std::exp(0.5 * s), std::cos(s), std::sin(s), p.sqrt_eval(s));
}

}  // namespace

double distance_to_omega_at(const ProfileS& p, const PointCW& pt, double s) {
  return arc_value(p, ArcObjective{std::abs(pt.z), pt.w}, s);
}

double distance_to_omega(const ProfileS& p, const PointCW& pt,
                         const DistanceOptions& opts) {
  const double lo = -p.beta();
  const double hi = kPi + p.beta();
  double seed = 0.5 * (lo + hi);
  if (pt.z != cplx(0.0, 0.0)) {
    const double s0 = std::log(std::norm(pt.z));
    if (s0 >= lo && s0 <= hi && rho_eval(p, pt) <= 0.0) return 0.0;
    seed = std::clamp(s0, lo, hi);
  }
  const ArcObjective f{std::abs(pt.z), pt.w};

  std::vector<double> local;
  const ArcSamples* arc = &p.arc_samples();
  ArcSamples own;
  if (opts.grid != arc->s.size()) {
    const std::size_t n = std::max<std::size_t>(opts.grid, 3);
    own.s.resize(n);
    own.z_radius.resize(n);
    own.cos_s.resize(n);
    own.sin_s.resize(n);
    own.disc_radius.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      own.s[i] = s;
      own.z_radius[i] = std::exp(0.5 * s);
      own.cos_s[i] = std::cos(s);
      own.sin_s[i] = std::sin(s);
      own.disc_radius[i] = p.sqrt_eval(s);
    }
    arc = &own;
  }
  const std::size_t n = arc->s.size();
  local.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    local[i] = f(arc->z_radius[i], arc->cos_s[i], arc->sin_s[i], arc->disc_radius[i]);
  }

  // Candidate local minima of the sampled objective, best first.
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || local[i] <= local[i - 1];
    const bool right_ok = i + 1 == n || local[i] <= local[i + 1];
    if (left_ok && right_ok) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) {
    return local[a] < local[b] || (local[a] == local[b] && a < b);
  });
  if (minima.size() > opts.refine_candidates) minima.resize(opts.refine_candidates);

  double best = arc_value(p, f, seed);
  for (const std::size_t i : minima) {
    best = std::min(best, local[i]);
    const double a = arc->s[i == 0 ? 0 : i - 1];
    const double b = arc->s[i + 1 == n ? n - 1 : i + 1];
    const MinimizeResult r = golden_section_min(
        [&](double s) { return arc_value(p, f, s); }, a, b, opts.refine_tol);
    best = std::min(best, r.value);
  }
  return best;
}

bool omega_neighborhood_contains(const ProfileS& p, double r,
                                 const PointCW& pt) {
  if (!(r > 0.0)) throw ParameterError("neighbourhood radius must be > 0");
  return distance_to_omega(p, pt) < r;
}

double Gradient4::norm() const {
  return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
}

Gradient4 rho_gradient(const ProfileS& p, const PointCW& pt) {
  const double n = std::norm(pt.z);
  if (n == 0.0) throw OffChartError();
  const double s = std::log(n);
  const cplx centre = unit(s);
  const cplx off = pt.w - centre;
  // d rho / d s with s = ln|z|^2; ds/dx = 2x/|z|^2, ds/dy = 2y/|z|^2.
  const double drho_ds = -2.0 * (std::conj(centre) * pt.w).imag() - p.deriv(s);
  Gradient4 g{};
  g.d[0] = drho_ds * 2.0 * pt.z.real() / n;
  g.d[1] = drho_ds * 2.0 * pt.z.imag() / n;
  g.d[2] = 2.0 * off.real();
  g.d[3] = 2.0 * off.imag();
  return g;
}

}  // namespace worm
