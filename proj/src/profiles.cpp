#include "worm/profiles.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace worm {

double smooth_step_eval(double gamma, double x) {
  if (!(gamma > 0.0)) throw ParameterError("smooth_step: gamma must be > 0");
  return unit_step(x - (kPi + 0.25 * gamma), 0.5 * gamma);
}

double smooth_step_deriv(double gamma, double x) {
  if (!(gamma > 0.0)) throw ParameterError("smooth_step: gamma must be > 0");
  return unit_step_deriv(x - (kPi + 0.25 * gamma), 0.5 * gamma);
}

double alpha_upper_bound() { return 1.0 / (4.0 * kPi); }

AlphaSelection select_alpha(std::size_t grid_points) {
  if (grid_points < 3) throw ParameterError("select_alpha: grid too small");
  if (grid_points % 2 == 0) ++grid_points;
  const double alpha = kDefaultAlpha;
  if (!(alpha < alpha_upper_bound())) {
    throw ParameterError("select_alpha: alpha violates alpha < 1/(4 pi)");
  }
  AlphaSelection sel;
  sel.alpha = alpha;
  sel.grid_points = grid_points;
  sel.cubic_margin = sel.sine_margin = sel.tangent_margin =
      std::numeric_limits<double>::infinity();
  const auto half = static_cast<std::ptrdiff_t>(grid_points / 2);
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    if (i == 0) continue;
    const double x = alpha * static_cast<double>(i) / static_cast<double>(half);
    const double ax = std::abs(x);
    sel.cubic_margin = std::min(
        sel.cubic_margin, 1.0 - std::abs(std::sin(x) - x) / (ax * ax * ax));
    sel.sine_margin = std::min(sel.sine_margin, std::abs(std::sin(x)) / ax - 0.75);
    sel.tangent_margin =
        std::min(sel.tangent_margin, 2.0 - std::abs(std::tan(x)) / ax);
  }
  if (!(sel.cubic_margin > 0.0 && sel.sine_margin > 0.0 &&
        sel.tangent_margin > 0.0)) {
    throw ParameterError("select_alpha: small-angle inequalities fail");
  }
  return sel;
}

// ---------------------------------------------------------------------------
// ProfileS

namespace {

// The round-off branch F(x) = (cos t - g(t))^2, t = x - pi, and derivatives.
struct RoundOff {
  double f, f1, f2;
};

RoundOff round_off(double x) {
  const double t = x - kPi;
  const double h = std::cos(t) - flat_g(t);
  const double h1 = -std::sin(t) - flat_g_deriv(t);
  const double h2 = -std::cos(t) - flat_g_second(t);
  return {h * h, 2.0 * h * h1, 2.0 * (h1 * h1 + h * h2)};
}

}  // namespace

struct ProfileS::Tables {
  double alpha = 0.0;
  double beta = 0.0;
  double c = 0.0;
  double width = 0.0;
  double x_join = 0.0;  // pi + alpha
  double x_end = 0.0;   // pi + alpha + width
  CumulativeIntegral j0;  // \int_0^u k
  CumulativeIntegral j1;  // \int_0^u v k(v) dv
  double s_end = 0.0;
  double ds_end = 0.0;
  ArcSamples arc;

  double curvature_excess(double u) const {
    return unit_step(u, width) * (round_off(x_join + u).f2 + c);
  }

  // All of the following take a folded argument xf >= pi/2.
  double value(double xf) const {
    if (xf < kPi) return 1.0;
    if (xf <= x_join) return round_off(xf).f;
    if (xf < x_end) {
      const double u = xf - x_join;
      return round_off(xf).f - (u * j0(u) - j1(u));
    }
    const double d = xf - x_end;
    return s_end + ds_end * d - 0.5 * c * d * d;
  }
  double slope(double xf) const {
    if (xf < kPi) return 0.0;
    if (xf <= x_join) return round_off(xf).f1;
    if (xf < x_end) return round_off(xf).f1 - j0(xf - x_join);
    return ds_end - c * (xf - x_end);
  }
  double curvature(double xf) const {
    if (xf < kPi) return 0.0;
    if (xf <= x_join) return round_off(xf).f2;
    if (xf < x_end) return round_off(xf).f2 - curvature_excess(xf - x_join);
    return -c;
  }
};

double ProfileS::alpha() const { return t_->alpha; }
double ProfileS::beta() const { return t_->beta; }
double ProfileS::extension_c() const { return t_->c; }
double ProfileS::blend_width() const { return t_->width; }

double ProfileS::eval(double x) const { return t_->value(fold_half_pi(x)); }

double ProfileS::deriv(double x) const {
  const double d = t_->slope(fold_half_pi(x));
  return x < kHalfPi ? -d : d;
}

double ProfileS::second(double x) const {
  return t_->curvature(fold_half_pi(x));
}

double ProfileS::sqrt_eval(double x) const {
  const double xf = fold_half_pi(x);
  if (xf < kPi) return 1.0;
  if (xf <= t_->x_join) {
    const double t = xf - kPi;
    return std::cos(t) - flat_g(t);
  }
  return std::sqrt(std::max(t_->value(xf), 0.0));
}

const ArcSamples& ProfileS::arc_samples() const { return t_->arc; }

ProfileS build_profile(double alpha, double extension_c, double blend_width) {
  if (!(alpha > 0.0 && alpha < alpha_upper_bound())) {
    throw ParameterError("build_profile: alpha must lie in (0, 1/(4 pi))");
  }
  if (!(extension_c > 0.0)) {
    throw ParameterError("build_profile: extension_c must be > 0");
  }
  if (blend_width <= 0.0) blend_width = 0.5 * alpha;
  if (blend_width > 0.5 * alpha) {
    throw ParameterError("build_profile: blend_width must be <= alpha/2");
  }

  auto t = std::make_shared<ProfileS::Tables>();
  t->alpha = alpha;
  t->c = extension_c;
  t->width = blend_width;
  t->x_join = kPi + alpha;
  t->x_end = kPi + alpha + blend_width;
  const ProfileS::Tables* raw = t.get();
  t->j0 = CumulativeIntegral(
      [raw](double u) { return raw->curvature_excess(u); }, 0.0, blend_width,
      256, 1e-14);
  t->j1 = CumulativeIntegral(
      [raw](double u) { return u * raw->curvature_excess(u); }, 0.0,
      blend_width, 256, 1e-16);
  const RoundOff end = round_off(t->x_end);
  t->s_end = end.f - (blend_width * t->j0.total() - t->j1.total());
  t->ds_end = end.f1 - t->j0.total();

  const auto s_of = [raw](double x) { return raw->value(x); };
  const double limit = kPi + kHalfPi;
  if (!(s_of(limit) < 0.0)) {
    throw ParameterError(
        "build_profile: extension too shallow; increase extension_c");
  }
  const Bracket br = bracket_by_doubling(s_of, t->x_join, 1e-2, limit);
  t->beta = bisect_root(s_of, br.lo, br.hi, 1e-15) - kPi;
  if (!(t->beta > alpha && t->beta < kHalfPi)) {
    throw ParameterError(
        "build_profile: extension too shallow; increase extension_c");
  }

  ArcSamples& arc = t->arc;
  const std::size_t n = kArcSampleCount;
  arc.s.resize(n);
  arc.z_radius.resize(n);
  arc.cos_s.resize(n);
  arc.sin_s.resize(n);
  arc.disc_radius.resize(n);
  const double lo = -t->beta;
  const double span = kPi + 2.0 * t->beta;
  ProfileS probe(t);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
    arc.s[i] = s;
    arc.z_radius[i] = std::exp(0.5 * s);
    arc.cos_s[i] = std::cos(s);
    arc.sin_s[i] = std::sin(s);
    arc.disc_radius[i] = probe.sqrt_eval(s);
  }

  ProfileS profile(std::move(t));
  const ProfileChecks checks = check_profile(profile);
  if (!checks.ok()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "build_profile: invariant check failed (concavity max "
        << checks.concavity_max << " at x = " << checks.concavity_argmax
        << ", root residual " << checks.root_residual << ", slope "
        << checks.slope_at_root << ")";
    throw ParameterError(msg.str());
  }
  return profile;
}

bool ProfileChecks::ok() const {
  return concavity_max <= 1e-6 && root_residual <= 1e-12 &&
         slope_at_root < 0.0 && junction_slope_jump <= 1e-10 &&
         junction_curvature <= 10.0 && max_value <= 1.0;
}

ProfileChecks check_profile(const ProfileS& p, double h) {
  ProfileChecks c;
  const double lo = -p.beta() - 1.0;
  const double hi = kPi + p.beta() + 1.0;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = p.eval(lo + h * static_cast<double>(i));
  c.concavity_max = -std::numeric_limits<double>::infinity();
  c.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) c.max_value = std::max(c.max_value, v[i]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dd = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
    if (dd > c.concavity_max) {
      c.concavity_max = dd;
      c.concavity_argmax = lo + h * static_cast<double>(i);
    }
  }
  c.root_residual = std::abs(p.eval(kPi + p.beta()));
  c.slope_at_root = p.deriv(kPi + p.beta());
  constexpr double kSide = 1e-12;
  for (const double j : {0.0, kPi}) {
    c.junction_slope_jump = std::max(
        c.junction_slope_jump, std::abs(p.deriv(j + kSide) - p.deriv(j - kSide)));
    c.junction_curvature =
        std::max({c.junction_curvature, std::abs(p.second(j + kSide)),
                  std::abs(p.second(j - kSide))});
  }
  return c;
}

double epsilon0(const ProfileS& p) {
  return 0.9 * std::min(1.0 - p.sqrt_eval(kPi + p.alpha()), flat_g(p.alpha()));
}

// ---------------------------------------------------------------------------
// SmoothedProfile

struct SmoothedProfile::Tables {
  explicit Tables(ProfileS b) : base(std::move(b)) {}
  ProfileS base;
  double eta = 0.0;
  double gamma = 0.0;
  double tol = 0.0;
  double lo = 0.0;  // pi + gamma/4
  double hi = 0.0;  // pi + 3 gamma/4
  CumulativeIntegral ramp;  // \int_lo^x S' Phi
  double shift = 0.0;       // S_eta - S past hi
  double x_eta = 0.0;
  double beta_eta = 0.0;

  double step(double xf) const { return unit_step(xf - lo, 0.5 * gamma); }
  double step_deriv(double xf) const {
    return unit_step_deriv(xf - lo, 0.5 * gamma);
  }
  double value(double xf) const {
    if (xf <= lo) return 1.0 + eta;
    if (xf < hi) return 1.0 + eta + ramp(xf);
    return base.eval(xf) + shift;
  }
  double slope(double xf) const {
    if (xf <= lo) return 0.0;
    if (xf < hi) return base.deriv(xf) * step(xf);
    return base.deriv(xf);
  }
  double curvature(double xf) const {
    if (xf <= lo) return 0.0;
    if (xf < hi) {
      return base.second(xf) * step(xf) + base.deriv(xf) * step_deriv(xf);
    }
    return base.second(xf);
  }
};

double SmoothedProfile::eta() const { return t_->eta; }
double SmoothedProfile::gamma() const { return t_->gamma; }
double SmoothedProfile::x_eta() const { return t_->x_eta; }
double SmoothedProfile::beta_eta() const { return t_->beta_eta; }
double SmoothedProfile::quadrature_tol() const { return t_->tol; }
const ProfileS& SmoothedProfile::base() const { return t_->base; }

double SmoothedProfile::eval(double x) const {
  return t_->value(fold_half_pi(x));
}

double SmoothedProfile::deriv(double x) const {
  const double d = t_->slope(fold_half_pi(x));
  return x < kHalfPi ? -d : d;
}

double SmoothedProfile::second(double x) const {
  return t_->curvature(fold_half_pi(x));
}

SmoothedProfile construct_smoothed(const ProfileS& p, double eta, double gamma,
                                   double quadrature_tol) {
  if (!(eta > 0.0 && eta < 0.5)) {
    throw ParameterError("construct_smoothed: eta must lie in (0, 1/2)");
  }
  if (!(gamma > 0.0 && gamma < p.alpha())) {
    throw ParameterError("construct_smoothed: gamma must lie in (0, alpha)");
  }
  auto t = std::make_shared<SmoothedProfile::Tables>(p);
  t->eta = eta;
  t->gamma = gamma;
  t->tol = quadrature_tol;
  t->lo = kPi + 0.25 * gamma;
  t->hi = kPi + 0.75 * gamma;
  const SmoothedProfile::Tables* raw = t.get();
  t->ramp = CumulativeIntegral(
      [raw](double x) { return raw->base.deriv(x) * raw->step(x); }, t->lo,
      t->hi, 256, quadrature_tol);
  t->shift = 1.0 + eta + t->ramp.total() - p.eval(t->hi);

  const auto above_one = [raw](double x) { return raw->value(x) - 1.0; };
  const double limit = kPi + kHalfPi + 1.0;
  const Bracket bx = bracket_by_doubling(above_one, kPi, 1e-4, limit);
  t->x_eta = bisect_root(above_one, bx.lo, bx.hi, 1e-15);
  const auto value = [raw](double x) { return raw->value(x); };
  const Bracket bb = bracket_by_doubling(value, t->x_eta, 1e-3, limit);
  t->beta_eta = bisect_root(value, bb.lo, bb.hi, 1e-15) - kPi;
  return SmoothedProfile(std::move(t));
}

bool SmoothedChecks::ok() const { return failure().empty(); }

std::string SmoothedChecks::failure() const {
  if (!(sandwich_margin >= 0.0)) return "sandwich S + eta/2 <= S_eta <= S + 3 eta/2";
  if (!(flat_defect <= 1e-15)) return "S_eta == 1 + eta near [0, pi]";
  if (!(factor100_margin >= -1e-12)) return "factor-100 property";
  if (!(concavity_max <= 1e-6)) return "concavity";
  if (!(x_eta_residual <= 1e-10)) return "S_eta(x_eta) = 1";
  if (!(beta_eta_residual <= 1e-10 && slope_at_beta_eta < 0.0)) {
    return "S_eta(pi + beta_eta) = 0 with nonzero slope";
  }
  if (!(max_value_excess <= 1e-15)) return "S_eta <= 1 + eta";
  return {};
}

SmoothedChecks check_smoothed(const SmoothedProfile& sp,
                              std::size_t grid_points) {
  SmoothedChecks c;
  c.grid_points = grid_points;
  const ProfileS& p = sp.base();
  const double eta = sp.eta();
  const auto n = std::max<std::size_t>(grid_points, 2);
  const auto node = [n](double a, double b, std::size_t i) {
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  c.sandwich_margin = std::numeric_limits<double>::infinity();
  c.max_value_excess = -std::numeric_limits<double>::infinity();
  {
    const double a = -sp.beta_eta() - 1.0;
    const double b = kPi + sp.beta_eta() + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = node(a, b, i);
      const double s = p.eval(x);
      const double se = sp.eval(x);
      const double m = std::min(se - s - 0.5 * eta, s + 1.5 * eta - se);
      if (m < c.sandwich_margin) {
        c.sandwich_margin = m;
        c.sandwich_argmin = x;
      }
      c.max_value_excess = std::max(c.max_value_excess, se - (1.0 + eta));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    c.flat_defect = std::max(c.flat_defect,
                             std::abs(sp.eval(node(0.0, kPi, i)) - (1.0 + eta)));
  }
  c.factor100_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = node(kHalfPi, sp.x_eta(), i);
    const double m = -sp.second(x) - 100.0 * std::abs(sp.deriv(x));
    if (m < c.factor100_margin) {
      c.factor100_margin = m;
      c.factor100_argmin = x;
    }
  }
  {
    constexpr double h = 1e-3;
    const double a = -p.beta() - 1.0;
    const double b = kPi + p.beta() + 1.0;
    const auto m = static_cast<std::size_t>(std::ceil((b - a) / h)) + 1;
    double prev2 = sp.eval(a);
    double prev1 = sp.eval(a + h);
    c.concavity_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i < m; ++i) {
      const double cur = sp.eval(a + h * static_cast<double>(i));
      c.concavity_max = std::max(c.concavity_max, (cur - 2.0 * prev1 + prev2) / (h * h));
      prev2 = prev1;
      prev1 = cur;
    }
  }
  c.x_eta_residual = std::abs(sp.eval(sp.x_eta()) - 1.0);
  c.beta_eta_residual = std::abs(sp.eval(kPi + sp.beta_eta()));
  c.slope_at_beta_eta = sp.deriv(kPi + sp.beta_eta());
  return c;
}

SmoothedProfile build_smoothed_with_gamma(const ProfileS& p, double eta,
                                          double gamma,
                                          std::size_t grid_points) {
  SmoothedProfile sp = construct_smoothed(p, eta, gamma);
  const SmoothedChecks c = check_smoothed(sp, grid_points);
  if (!c.ok()) {
    throw ParameterError("build_smoothed: invariant failed: " + c.failure());
  }
  return sp;
}

SmoothedProfile build_smoothed(const ProfileS& p, double eta,
                               std::size_t grid_points) {
  if (!(eta > 0.0 && eta < 0.5)) {
    throw ParameterError("build_smoothed: eta must lie in (0, 1/2)");
  }
  std::string last_failure;
  for (double gamma = 0.5 * p.alpha(); gamma >= kGammaFloor; gamma *= 0.5) {
    SmoothedProfile sp = construct_smoothed(p, eta, gamma);
    const SmoothedChecks c = check_smoothed(sp, grid_points);
    if (c.ok()) return sp;
    last_failure = c.failure();
  }
  if (last_failure == "factor-100 property") {
    throw ParameterError("eta too large for factor-100 property");
  }
  throw ParameterError("build_smoothed: gamma search exhausted (" +
                       last_failure + ")");
}

}  // namespace worm
