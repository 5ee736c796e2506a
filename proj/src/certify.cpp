#include "worm/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace worm {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

cplx unit(double a) { return {std::cos(a), std::sin(a)}; }

json point_json(const PointCW& pt) {
  return {{"z_re", pt.z.real()}, {"z_im", pt.z.imag()},
          {"w_re", pt.w.real()}, {"w_im", pt.w.imag()}};
}

double lin(double lo, double hi, std::size_t i, std::size_t n) {
  if (n <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// a = t pi / (2 (1 - t)), the rotation of the shifted disc centre.
double tilt(double t) { return t * kPi / (2.0 * (1.0 - t)); }

}  // namespace

json params_json(const RotationParams& rp) {
  return {{"epsilon", rp.epsilon}, {"eta", rp.eta}, {"delta", rp.delta},
          {"t", rp.t}, {"delta_tilde", rp.delta_tilde}};
}

// ---------------------------------------------------------------------------
// Profile invariants

namespace {

struct SlackSet {
  double min = kInf;
  std::string argmin;
  json all = json::object();
  void add(const std::string& name, double slack) {
    all[name] = slack;
    if (slack < min) {
      min = slack;
      argmin = name;
    }
  }
};

}  // namespace

CertReport certify_profile(const ProfileS& p, double h) {
  const Stopwatch clock;
  const ProfileChecks c = check_profile(p, h);
  SlackSet slack;
  slack.add("concavity", 1e-6 - c.concavity_max);
  slack.add("root_residual", 1e-12 - c.root_residual);
  slack.add("slope_at_root", -c.slope_at_root);
  slack.add("junction_slope_jump", 1e-10 - c.junction_slope_jump);
  slack.add("junction_curvature", 10.0 - c.junction_curvature);
  slack.add("max_value", 1.0 - c.max_value);
  CertReport r;
  r.check_name = "profile_invariants";
  r.params = {{"alpha", p.alpha()}, {"beta", p.beta()},
              {"extension_c", p.extension_c()}, {"blend_width", p.blend_width()}};
  r.grid = {{"x", {{"spacing", h}, {"lo", -p.beta() - 1.0}, {"hi", kPi + p.beta() + 1.0}}}};
  r.min_margin = slack.min;
  r.argmin = {{"condition", slack.argmin}, {"concavity_argmax", c.concavity_argmax}};
  // Equality is allowed in the non-strict conditions.
  r.tolerance = -std::numeric_limits<double>::denorm_min();
  r.details = {{"slacks", slack.all}, {"epsilon0", epsilon0(p)}};
  r.finalize();
  r.pass = r.pass && c.ok();
  r.wall_time_s = clock.seconds();
  return r;
}

CertReport certify_smoothed(const SmoothedProfile& sp, std::size_t grid_points) {
  const Stopwatch clock;
  const SmoothedChecks c = check_smoothed(sp, grid_points);
  SlackSet slack;
  slack.add("sandwich", c.sandwich_margin);
  slack.add("flat_zone", 1e-15 - c.flat_defect);
  slack.add("factor100", c.factor100_margin + 1e-12);
  slack.add("concavity", 1e-6 - c.concavity_max);
  slack.add("x_eta_residual", 1e-10 - c.x_eta_residual);
  slack.add("beta_eta_residual", 1e-10 - c.beta_eta_residual);
  slack.add("slope_at_beta_eta", -c.slope_at_beta_eta);
  slack.add("max_value", 1e-15 - c.max_value_excess);
  CertReport r;
  r.check_name = "smoothed_profile_invariants";
  r.params = {{"eta", sp.eta()}, {"gamma", sp.gamma()}, {"x_eta", sp.x_eta()},
              {"beta_eta", sp.beta_eta()}};
  r.grid = {{"points", grid_points}};
  r.min_margin = slack.min;
  r.argmin = {{"condition", slack.argmin},
              {"sandwich_argmin", c.sandwich_argmin},
              {"factor100_argmin", c.factor100_argmin}};
  r.tolerance = -std::numeric_limits<double>::denorm_min();
  r.details = {{"slacks", slack.all}, {"factor100_margin", c.factor100_margin}};
  if (!c.ok()) r.details["failure"] = c.failure();
  r.finalize();
  r.pass = r.pass && c.ok();
  r.wall_time_s = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Witness suite

double x_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 2.0)) {
    throw ParameterError("x_epsilon: eps must lie in (0, 2)");
  }
  const double x = kPi + 1.0 / std::log(2.0 / eps);
  const double residual = std::abs(g_eval(x - kPi) - 0.5 * eps) / (0.5 * eps);
  if (!(residual <= 1e-12)) throw Error("x_epsilon: g(x - pi) != eps / 2");
  return x;
}

PointCW witness_point(double eps) {
  const double x = x_epsilon(eps);
  return {cplx(std::exp(kPi / 4.0), 0.0), cplx(0.0, std::sin(x))};
}

WitnessConstants lipschitz_constants(const ProfileS& p, double lip_radius,
                                     std::size_t sample_n, std::uint64_t seed) {
  if (!(lip_radius > 0.0)) throw ParameterError("lip_radius must be > 0");
  if (!(std::exp(-0.5 * p.beta()) - lip_radius > 0.0)) {
    throw ParameterError("lip_radius too large");
  }
  const Halton h(seed);
  const double lo = -p.beta();
  const double span = kPi + 2.0 * p.beta();
  // Superset of the closed tube: |z| within r of e^{s/2}, w within
  // sqrt(S(s)) + r of e^{is}, for some arc parameter s.
  const auto sample = [&](std::size_t i) {
    const double s = lo + span * h(i, 0);
    const double abs_z = std::exp(0.5 * s) + lip_radius * (2.0 * h(i, 1) - 1.0);
    const double radius = (p.sqrt_eval(s) + lip_radius) * std::sqrt(h(i, 2));
    const cplx w = unit(s) + radius * unit(kTwoPi * h(i, 3));
    return PointCW{cplx(abs_z, 0.0), w};
  };
  const ArgMin worst = parallel_argmax(
      sample_n, [&](std::size_t i) { return rho_gradient(p, sample(i)).norm(); });

  WitnessConstants wc;
  wc.lip_radius = lip_radius;
  wc.max_sampled_gradient = worst.value;
  wc.lip_L = 1.05 * worst.value;
  wc.samples = sample_n;
  return wc;
}

CertReport certify_annuli(const ProfileS& p, double eps, std::size_t phi_grid,
                          std::size_t bottom_grid) {
  const Stopwatch clock;
  const double eps0 = epsilon0(p);
  if (!(eps > 0.0 && eps < eps0)) {
    throw ParameterError("certify_annuli: eps must lie in (0, eps_0)");
  }
  const double x_eps = x_epsilon(eps);
  CertReport r;
  r.check_name = "annuli";
  r.params = {{"eps", eps}, {"x_eps", x_eps}, {"eps0", eps0}};
  r.grid = {{"phi", {{"count", phi_grid}, {"lo", kPi}, {"hi", x_eps}}},
            {"bottom_log_abs_z2", {{"count", bottom_grid}, {"lo", 0.0}, {"hi", kPi}}}};

  // Distances are invariant under rotations of z, so each circle is
  // represented by its point on the positive real axis.
  const std::size_t n_circles = 2 * phi_grid;
  const ArgMin circle = parallel_argmin(n_circles, [&](std::size_t k) {
    const double phi = lin(kPi, x_eps, k / 2, phi_grid);
    const double log_r2 = k % 2 == 0 ? phi : kPi - phi;
    const PointCW pt{cplx(std::exp(0.5 * log_r2), 0.0), cplx(0.0, std::sin(phi))};
    return eps - distance_to_omega(p, pt);
  });
  const ArgMax bottom = parallel_argmax(bottom_grid, [&](std::size_t k) {
    const double log_r2 = lin(0.0, kPi, k, bottom_grid);
    return distance_to_omega(p, PointCW{cplx(std::exp(0.5 * log_r2), 0.0), 0.0});
  });

  // The bottom annulus has to sit on the boundary; 1e-12 absorbs the
  // rounding of |e^{is}|^2 - 1.
  constexpr double kBottomTol = 1e-12;
  const double bottom_margin = kBottomTol - bottom.value;
  const double phi_at = lin(kPi, x_eps, circle.index / 2, phi_grid);
  if (circle.value <= bottom_margin) {
    r.min_margin = circle.value;
    r.argmin = {{"family", "circle"}, {"phi", phi_at},
                {"log_abs_z2", circle.index % 2 == 0 ? phi_at : kPi - phi_at}};
  } else {
    r.min_margin = bottom_margin;
    r.argmin = {{"family", "bottom"},
                {"log_abs_z2", lin(0.0, kPi, bottom.index, bottom_grid)}};
  }
  r.tolerance = 0.0;
  r.details = {{"circle_min_margin", circle.value},
               {"bottom_max_distance", bottom.value},
               {"bottom_tolerance", kBottomTol}};
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

std::vector<double> default_eps_list() {
  return {1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
}

WitnessTable witness_table(const ProfileS& p, const WitnessConstants& wc,
                           const std::vector<double>& eps_list) {
  const double eps0 = epsilon0(p);
  for (const double s : wc.s_list) {
    if (!(s >= 1.0)) throw ParameterError("witness_table: every s must be >= 1");
  }
  WitnessTable table;
  table.s_list = wc.s_list;
  for (const double eps : eps_list) {
    if (!(eps > 0.0 && eps < eps0)) {
      throw ParameterError("witness_table: eps must lie in (0, eps_0)");
    }
    WitnessRow row;
    row.eps = eps;
    row.x_minus_pi = x_epsilon(eps) - kPi;
    if (!(row.x_minus_pi < p.alpha())) {
      throw ParameterError("witness_table: x_eps - pi must be < alpha");
    }
    row.g_relative_residual =
        std::abs(g_eval(row.x_minus_pi) - 0.5 * eps) / (0.5 * eps);
    const PointCW pe = witness_point(eps);
    row.rho = rho_eval(p, pe);
    row.distance = distance_to_omega(p, pe);
    row.distance_bound = std::min(wc.lip_radius, row.x_minus_pi / wc.lip_L);
    for (const double s : wc.s_list) {
      row.ratios.push_back(std::pow(row.x_minus_pi, s) / eps);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CertReport certify_witness(const WitnessTable& table, const WitnessConstants& wc) {
  const Stopwatch clock;
  CertReport r;
  r.check_name = "witness";
  r.params = {{"lip_radius", wc.lip_radius}, {"lip_L", wc.lip_L},
              {"s_list", table.s_list}};
  json eps = json::array();
  for (const auto& row : table.rows) eps.push_back(row.eps);
  r.grid = {{"eps", eps}};

  // Each condition contributes a margin that is positive iff it holds.
  r.min_margin = kInf;
  const auto consider = [&](double m, const std::string& what, double at) {
    if (m < r.min_margin) {
      r.min_margin = m;
      r.argmin = {{"condition", what}, {"eps", at}};
    }
  };
  json rows = json::array();
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    consider(1e-12 - row.g_relative_residual, "g_residual", row.eps);
    consider(row.rho - row.x_minus_pi, "rho_lower_bound", row.eps);
    consider(row.distance - row.distance_bound, "distance_lower_bound", row.eps);
    if (k > 0) {
      const auto& prev = table.rows[k - 1];
      for (std::size_t j = 0; j < row.ratios.size(); ++j) {
        // Strict growth as eps decreases through the list.
        const double sign = row.eps < prev.eps ? 1.0 : -1.0;
        consider(sign * (row.ratios[j] / prev.ratios[j] - 1.0),
                 "ratio_growth_s" + std::to_string(table.s_list[j]), row.eps);
      }
    }
    rows.push_back({{"eps", row.eps}, {"x_minus_pi", row.x_minus_pi},
                    {"g_relative_residual", row.g_relative_residual},
                    {"rho", row.rho}, {"distance", row.distance},
                    {"distance_bound", row.distance_bound}, {"ratios", row.ratios}});
  }
  if (table.rows.empty()) r.min_margin = -kInf;
  r.tolerance = 0.0;
  r.details = {{"rows", rows}};
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Crucial estimate

double crucial_estimate_value(const ProfileS& p, double delta, double psi) {
  const double a = delta * (kHalfPi - psi);
  const double dt = std::sin(tilt(delta));
  const double tail = std::sin(psi + a) * dt;
  const double t = std::max(0.0, fold_half_pi(psi) - kPi);
  if (t <= p.alpha()) {
    // sqrt(S) = cos t - g(t) here; cos a - cos t in product form.
    const double diff = -2.0 * std::sin(0.5 * (a + t)) * std::sin(0.5 * (a - t));
    return diff + g_eval(t) + tail;
  }
  return std::cos(a) - p.sqrt_eval(psi) + tail;
}

CertReport certify_crucial_estimate(const ProfileS& p, double delta_max,
                                    std::size_t n_delta, std::size_t n_psi) {
  const Stopwatch clock;
  if (!(delta_max > 0.0 && delta_max < 1.0)) {
    throw ParameterError("certify_crucial_estimate: delta_max must lie in (0, 1)");
  }
  if (n_delta == 0 || n_psi < 2) {
    throw ParameterError("certify_crucial_estimate: empty grid");
  }
  const double lo = -p.beta();
  const double hi = kPi + p.beta();
  const auto delta_at = [&](std::size_t i) {
    return delta_max * static_cast<double>(i + 1) / static_cast<double>(n_delta);
  };
  const ArgMin m = parallel_argmin(n_delta * n_psi, [&](std::size_t k) {
    return crucial_estimate_value(p, delta_at(k / n_psi), lin(lo, hi, k % n_psi, n_psi));
  });
  CertReport r;
  r.check_name = "crucial_estimate";
  r.params = {{"delta_max", delta_max}, {"beta", p.beta()}};
  r.grid = {{"delta", {{"count", n_delta}, {"lo", delta_at(0)}, {"hi", delta_max}}},
            {"psi", {{"count", n_psi}, {"lo", lo}, {"hi", hi}}}};
  r.min_margin = m.value;
  r.argmin = {{"delta", delta_at(m.index / n_psi)},
              {"psi", lin(lo, hi, m.index % n_psi, n_psi)}};
  r.tolerance = 0.0;
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

double find_d1(const ProfileS& p, std::size_t n_delta, std::size_t n_psi) {
  const auto ok = [&](int k) {
    return certify_crucial_estimate(p, 1e-3 * k, n_delta, n_psi).pass;
  };
  int lo = 1;
  int hi = 249;
  if (ok(hi)) return 1e-3 * hi;
  if (!ok(lo)) {
    if (!certify_crucial_estimate(p, 1e-4, n_delta, n_psi).pass) {
      throw Error("find_d1: crucial estimate fails at delta_max = 1e-4");
    }
    return 1e-4;
  }
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return 1e-3 * lo;
}

double m_function(double t, double y) {
  const double a = tilt(t);
  // cos ty - cos y and sin A + sin B - sin(A + B) in product form.
  const double cos_part = 2.0 * std::sin(0.5 * (1.0 + t) * y) * std::sin(0.5 * (1.0 - t) * y);
  const double sa = std::sin(t * y);
  const double sb = std::sin((1.0 - t) * y);
  const double ha = std::sin(0.5 * t * y);
  const double hb = std::sin(0.5 * (1.0 - t) * y);
  const double sin_part = 2.0 * sa * hb * hb + 2.0 * sb * ha * ha;
  return std::cos(a) * cos_part + std::sin(a) * sin_part;
}

double phi_function(double t, double x) { return x + tilt(t); }

CertReport m_phi_identity_check(const ProfileS& p, double d1, std::size_t n) {
  const Stopwatch clock;
  if (!(d1 > 0.0 && d1 < 1.0)) throw ParameterError("m_phi_identity_check: d1 in (0, 1)");
  if (n == 0) throw ParameterError("m_phi_identity_check: empty grid");
  // Interior points of (0, d1) x (-alpha/2, 0).
  const double half_alpha = 0.5 * p.alpha();
  const auto delta_at = [&](std::size_t i) {
    return d1 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  };
  const auto psi_at = [&](std::size_t j) {
    return -half_alpha + half_alpha * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  };
  const std::size_t total = n * n;
  const ArgMax disc = parallel_argmax(total, [&](std::size_t k) {
    const double d = delta_at(k / n);
    const double psi = psi_at(k % n);
    const double lhs = g_eval(-psi) + m_function(d, phi_function(d, psi));
    return std::abs(lhs - crucial_estimate_value(p, d, psi));
  });
  const ArgMin mmin = parallel_argmin(total, [&](std::size_t k) {
    const double d = delta_at(k / n);
    return m_function(d, phi_function(d, psi_at(k % n)));
  });
  double m_at_zero = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m_at_zero = std::max(m_at_zero, std::abs(m_function(delta_at(i), 0.0)));
  }

  constexpr double kIdentityTol = 1e-12;
  CertReport r;
  r.check_name = "m_phi_identity";
  r.params = {{"d1", d1}, {"alpha", p.alpha()}};
  r.grid = {{"delta", {{"count", n}, {"lo", delta_at(0)}, {"hi", delta_at(n - 1)}}},
            {"psi", {{"count", n}, {"lo", psi_at(0)}, {"hi", psi_at(n - 1)}}}};
  const double id_margin = kIdentityTol - disc.value;
  const double zero_margin = m_at_zero == 0.0 ? kInf : -m_at_zero;
  r.min_margin = std::min({id_margin, mmin.value, zero_margin});
  const std::size_t at = id_margin <= mmin.value ? disc.index : mmin.index;
  r.argmin = {{"delta", delta_at(at / n)}, {"psi", psi_at(at % n)},
              {"condition", id_margin <= mmin.value ? "identity" : "m_nonnegative"}};
  // M >= 0 admits equality.
  r.tolerance = -std::numeric_limits<double>::denorm_min();
  r.details = {{"max_discrepancy", disc.value}, {"identity_tolerance", kIdentityTol},
               {"min_m", mmin.value}, {"max_abs_m_at_zero", m_at_zero}};
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Containments

PointCW omega_closure_sample(const ProfileS& p, const Halton& h, std::size_t i) {
  const double s = -p.beta() + (kPi + 2.0 * p.beta()) * h(i, 0);
  const double frac = i % 2 == 0 ? 1.0 : std::sqrt(h(i, 1));
  const cplx w = unit(s) + frac * p.sqrt_eval(s) * unit(kTwoPi * h(i, 2));
  return {std::exp(0.5 * s) * unit(kTwoPi * h(i, 3)), w};
}

PointCW d_boundary_sample(const RotationParams& rp, const SmoothedProfile& sp,
                          double s, double theta, double phase) {
  const double log_r2 = (s - rp.delta * kHalfPi) / (1.0 - rp.delta);
  const double root = std::sqrt(std::max(0.0, sp.eval(s)));
  const cplx big_w = unit(s) * (1.0 + root * unit(theta));
  return {std::exp(0.5 * log_r2) * unit(phase), big_w - cplx(0.0, rp.delta_tilde)};
}

namespace {

PointCW d_boundary_halton(const RotationParams& rp, const SmoothedProfile& sp,
                          const Halton& h, std::size_t i) {
  const double s = -sp.beta_eta() + (kPi + 2.0 * sp.beta_eta()) * h(i, 0);
  return d_boundary_sample(rp, sp, s, kTwoPi * h(i, 1), kTwoPi * h(i, 2));
}

}  // namespace

CertReport certify_containments(const ProfileS& p, const SmoothedProfile& sp,
                                const RotationParams& rp,
                                const ContainmentOptions& opts) {
  const Stopwatch clock;
  const Halton h(opts.seed);
  CertReport r;
  r.check_name = "containments";
  r.params = params_json(rp);
  r.grid = {{"samples_per_side", opts.sample_n}, {"seed", opts.seed},
            {"distance_grid", opts.distance_grid},
            {"closure_s", {{"lo", -p.beta()}, {"hi", kPi + p.beta()}}},
            {"d_boundary_s", {{"lo", -sp.beta_eta()}, {"hi", kPi + sp.beta_eta()}}}};
  r.min_margin = kInf;
  r.tolerance = 0.0;

  if (opts.side_a) {
    const ArgMin a = parallel_argmin(opts.sample_n, [&](std::size_t i) {
      return -rho_delta_eta_eval(rp, sp, omega_closure_sample(p, h, i));
    });
    r.details["side_a_min_margin"] = a.value;
    if (a.value < r.min_margin) {
      r.min_margin = a.value;
      r.argmin = point_json(omega_closure_sample(p, h, a.index));
      r.argmin["side"] = "closure_in_D";
    }
  }
  if (opts.side_b) {
    DistanceOptions dopt;
    dopt.grid = opts.distance_grid;
    // Only an upper bound on the distance is needed, and the objective is
    // exact at every arc parameter tried.
    const ArgMin b = parallel_argmin(opts.sample_n, [&](std::size_t i) {
      const PointCW pt = d_boundary_halton(rp, sp, h, i);
      const double s0 = std::log(std::norm(pt.z));
      if (s0 > -p.beta() && s0 < kPi + p.beta() &&
          rp.epsilon - distance_to_omega_at(p, pt, s0) > 0.5 * rp.epsilon) {
        return rp.epsilon - distance_to_omega_at(p, pt, s0);
      }
      return rp.epsilon - distance_to_omega(p, pt, dopt);
    });
    r.details["side_b_min_margin"] = b.value;
    if (b.value < r.min_margin) {
      r.min_margin = b.value;
      r.argmin = point_json(d_boundary_halton(rp, sp, h, b.index));
      r.argmin["side"] = "D_boundary_in_tube";
    }
  }
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

namespace {

// Log-scale bisection for the largest admissible value in [lo, hi].
double log_bisect(double lo, double hi, const std::function<bool(double)>& ok,
                  const std::string& what) {
  if (ok(hi)) return hi;
  if (!ok(lo)) throw Error(what + ": empty admissible range");
  while (hi / lo > 1.02) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double find_eta1(const ProfileS& p, double eps, const ContainmentOptions& opts) {
  ContainmentOptions o = opts;
  o.side_a = false;
  o.side_b = true;
  return log_bisect(1e-8, 0.49, [&](double eta) {
    try {
      const SmoothedProfile sp = build_smoothed(p, eta);
      const RotationParams rp = RotationParams::make(eps, eta, kEta1ProbeDelta, 0.0);
      return certify_containments(p, sp, rp, o).pass;
    } catch (const ParameterError&) {
      return false;
    }
  }, "find_eta1 (build_smoothed and tube containment)");
}

double find_d2(const ProfileS& p, const SmoothedProfile& sp, double eps,
               const ContainmentOptions& opts) {
  return log_bisect(1e-12, 0.25, [&](double delta) {
    const RotationParams rp = RotationParams::make(eps, sp.eta(), delta, 0.0);
    return certify_containments(p, sp, rp, opts).pass;
  }, "find_d2 (containment, both sides)");
}

namespace {

ArgMin min_halfplane_margin(const ProfileS& p, const RotationParams& rp,
                            std::size_t n, std::uint64_t seed) {
  const Halton h(seed);
  return parallel_argmin(n, [&](std::size_t i) {
    return halfplane_margin(rp, omega_closure_sample(p, h, i));
  });
}

}  // namespace

double find_t_delta(const ProfileS& p, const SmoothedProfile&,
                    const RotationParams& rp, std::size_t sample_n,
                    std::uint64_t seed) {
  const ArgMin m = min_halfplane_margin(p, rp.with_t(0.0), sample_n, seed);
  if (!(m.value > 0.0)) {
    throw Error("find_t_delta: closure not inside the t = 0 half-plane");
  }
  return 0.5 * m.value;
}

CertReport certify_t_delta(const ProfileS& p, const SmoothedProfile&,
                           const RotationParams& rp, std::size_t sample_n,
                           std::uint64_t seed) {
  const Stopwatch clock;
  const ArgMin m = min_halfplane_margin(p, rp, sample_n, seed);
  CertReport r;
  r.check_name = "closure_in_halfplane";
  r.params = params_json(rp);
  r.grid = {{"samples", sample_n}, {"seed", seed}};
  r.min_margin = m.value;
  r.argmin = point_json(omega_closure_sample(p, Halton(seed), m.index));
  r.tolerance = 0.0;
  r.finalize();
  r.wall_time_s = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Levi suite

bool LeviSuite::pass() const {
  for (const CertReport* r : reports()) {
    if (!r->pass) return false;
  }
  return true;
}

namespace {

struct DiscPoint {
  PointCW pt;
  double s;
  double theta;
};

std::vector<DiscPoint> disc_boundary_points(const RotationParams& rp,
                                            const SmoothedProfile& sp,
                                            std::size_t n, std::uint64_t seed) {
  const Halton h(seed);
  const RotationParams rp0 = rp.with_t(0.0);
  std::vector<DiscPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; out.size() < n; ++i) {
    const double s = -sp.beta_eta() + (kPi + 2.0 * sp.beta_eta()) * h(i, 0);
    const double theta = kTwoPi * h(i, 1);
    const PointCW pt = d_boundary_sample(rp, sp, s, theta, kTwoPi * h(i, 2));
    if (halfplane_margin(rp0, pt) > 0.0) out.push_back({pt, s, theta});
  }
  return out;
}

// Rounding w to doubles leaves it ~ulp(|w|) off bH_t, which is large next to
// a tiny t. Searches nearby doubles in w, and a few ulp-perturbations of |z|
// (each moves gamma slightly), for the representable point closest to the
// boundary.
PointCW halfplane_point(const RotationParams& rp, cplx z0, double y) {
  constexpr int kReach = 32;
  constexpr int kZVariants = 256;
  const auto step = [](double x) { return std::nextafter(x, kInf) - x; };
  const double target = 1e-14 * rp.t;
  PointCW best{};
  double best_r = kInf;
  for (int k = 0; k < kZVariants && best_r > target; ++k) {
    const int shift = k % 2 == 0 ? k / 2 : -(k + 1) / 2;
    const cplx z = z0 * (1.0 + shift * 0x1p-52);
    const double gamma = rotation_angle(rp, z);
    const double c = std::cos(gamma);
    const double s = std::sin(gamma);
    const PointCW pt{z, unit(gamma) * cplx(rp.t, y) - cplx(0.0, rp.delta_tilde)};
    const double ux = step(pt.w.real());
    const double uy = step(pt.w.imag());
    const double r0 = rotated_real_part(rp, pt, gamma) - rp.t;
    for (int i = -kReach; i <= kReach; ++i) {
      const double j = uy * s == 0.0 ? 0.0
                       : std::clamp(std::round(-(r0 + i * ux * c) / (uy * s)),
                                    double(-kReach), double(kReach));
      const PointCW cand{z, cplx(pt.w.real() + i * ux, pt.w.imag() + j * uy)};
      const double r = std::abs(rotated_real_part(rp, cand, gamma) - rp.t);
      if (r < best_r) {
        best = cand;
        best_r = r;
      }
    }
  }
  return best;
}

std::vector<PointCW> halfplane_boundary_points(const RotationParams& rp,
                                               const SmoothedProfile& sp,
                                               std::size_t n, std::uint64_t seed) {
  const Halton h(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<PointCW> out;
  out.reserve(n);
  const double span = kPi + 2.0 * sp.beta_eta();
  for (std::size_t i = 0; out.size() < n; ++i) {
    // Part of bH_t inside the closure of D^(delta,eta).
    const double s = -sp.beta_eta() + span * h(i, 0);
    const double y2 = sp.eval(s) - (1.0 - rp.t) * (1.0 - rp.t);
    if (!(y2 > 0.0)) continue;
    const double y = std::sqrt(y2) * (2.0 * h(i, 1) - 1.0);
    const double log_r2 = (s - rp.delta * kHalfPi) / (1.0 - rp.delta);
    out.push_back(halfplane_point(rp, std::exp(0.5 * log_r2) * unit(kTwoPi * h(i, 2)), y));
  }
  return out;
}

}  // namespace

LeviSuite certify_levi(const ProfileS& p, const SmoothedProfile& sp,
                       const RotationParams& rp, const LeviOptions& opts) {
  LeviSuite suite;
  const json params = params_json(rp);
  const double k2 = (1.0 - rp.delta) * (1.0 - rp.delta);

  // Disc part of the boundary inside H_0.
  Stopwatch clock;
  const std::vector<DiscPoint> disc = disc_boundary_points(rp, sp, opts.disc_n, opts.seed);
  const json disc_grid = {{"samples", opts.disc_n}, {"seed", opts.seed},
                          {"s", {{"lo", -sp.beta_eta()}, {"hi", kPi + sp.beta_eta()}}},
                          {"theta", {{"lo", 0.0}, {"hi", kTwoPi}}}};
  std::vector<double> value(disc.size()), normalized(disc.size());
  std::vector<DiscDecomposition> dec(disc.size());
  parallel_for(disc.size(), [&](std::size_t i) {
    value[i] = levi_disc(rp, sp, disc[i].pt);
    normalized[i] = levi_disc_normalized(rp, sp, disc[i].pt);
    dec[i] = levi_disc_decompose(rp, sp, disc[i].pt);
  });
  const ArgMin dmin = parallel_argmin(disc.size(), [&](std::size_t i) { return value[i]; });
  const double disc_setup = clock.seconds();
  {
    CertReport& r = suite.disc;
    r.check_name = "levi_disc";
    r.params = params;
    r.grid = disc_grid;
    r.min_margin = disc.empty() ? -kInf : dmin.value;
    if (!disc.empty()) {
      r.argmin = point_json(disc[dmin.index].pt);
      r.argmin["s"] = disc[dmin.index].s;
      r.argmin["theta"] = disc[dmin.index].theta;
    }
    r.tolerance = -1e-9;
    std::size_t le1 = 0;
    for (const auto& d : dec) le1 += d.case_tag == LeviCase::disc_le1;
    r.details = {{"case_counts", {{"disc_le1", le1}, {"disc_gt1", disc.size() - le1}}}};
    r.finalize();
    r.wall_time_s = disc_setup;
  }

  // Case S_eta <= 1: theta bound.
  {
    clock = Stopwatch();
    CertReport& r = suite.theta_bound;
    r.check_name = "levi_theta_bound";
    r.params = params;
    r.grid = disc_grid;
    const ArgMin m = parallel_argmin(disc.size(), [&](std::size_t i) {
      if (dec[i].case_tag != LeviCase::disc_le1) return kInf;
      const double sv = dec[i].s_val;
      const double c = std::cos(dec[i].theta) + std::sqrt(sv);
      return normalized[i] - sv * (1.0 - sv + c * c);
    });
    const ArgMin bound = parallel_argmin(disc.size(), [&](std::size_t i) {
      if (dec[i].case_tag != LeviCase::disc_le1) return kInf;
      const double sv = dec[i].s_val;
      const double c = std::cos(dec[i].theta) + std::sqrt(sv);
      return sv * (1.0 - sv + c * c);
    });
    r.min_margin = m.value;
    if (m.value < kInf) r.argmin = {{"s", disc[m.index].s}, {"theta", dec[m.index].theta}};
    r.tolerance = -1e-9;
    r.details = {{"min_bound", bound.value}, {"bound_nonnegative", bound.value >= -1e-12}};
    r.finalize();
    r.pass = r.pass && bound.value >= -1e-12;
    r.wall_time_s = clock.seconds();
  }

  // Case S_eta > 1: the 50 bound.
  {
    clock = Stopwatch();
    CertReport& r = suite.fifty_bound;
    r.check_name = "levi_fifty_bound";
    r.params = params;
    r.grid = disc_grid;
    std::vector<double> abs_w(disc.size());
    parallel_for(disc.size(), [&](std::size_t i) {
      abs_w[i] = std::abs(disc[i].pt.w + cplx(0.0, rp.delta_tilde));
    });
    const ArgMin m = parallel_argmin(disc.size(), [&](std::size_t i) {
      if (dec[i].case_tag != LeviCase::disc_gt1) return kInf;
      const double slope = sp.deriv(rotation_angle(rp, disc[i].pt.z));
      const double bound = 2.0 * std::abs(slope) * (50.0 - abs_w[i]);
      return std::min(normalized[i] - bound, 50.0 - abs_w[i]);
    });
    const ArgMax wmax = parallel_argmax(disc.size(), [&](std::size_t i) {
      return dec[i].case_tag == LeviCase::disc_gt1 ? abs_w[i] : -kInf;
    });
    r.min_margin = m.value;
    if (m.value < kInf) r.argmin = {{"s", disc[m.index].s}, {"theta", dec[m.index].theta}};
    r.tolerance = -1e-9;
    r.details = {{"max_abs_w_shifted", wmax.value}};
    r.finalize();
    r.wall_time_s = clock.seconds();
  }

  // Half-plane part of the boundary inside the closure of D^(delta,eta).
  clock = Stopwatch();
  const std::vector<PointCW> hp =
      halfplane_boundary_points(rp, sp, opts.halfplane_n, opts.seed);
  {
    CertReport& r = suite.halfplane;
    r.check_name = "levi_halfplane";
    r.params = params;
    r.grid = {{"samples", opts.halfplane_n}, {"seed", opts.seed}};
    const ArgMax err = parallel_argmax(hp.size(), [&](std::size_t i) {
      const double expected = k2 * rp.t / (4.0 * std::norm(hp[i].z));
      return std::abs(levi_halfplane(rp, hp[i]) - expected) / expected;
    });
    const ArgMin vmin = parallel_argmin(hp.size(), [&](std::size_t i) {
      return levi_halfplane(rp, hp[i]);
    });
    constexpr double kRelTol = 1e-12;
    r.min_margin = kRelTol - err.value;
    if (!hp.empty()) r.argmin = point_json(hp[err.index]);
    r.tolerance = 0.0;
    r.details = {{"max_relative_error", err.value}, {"relative_tolerance", kRelTol},
                 {"min_value", vmin.value}};
    r.finalize();
    r.pass = r.pass && vmin.value > 0.0;
    r.wall_time_s = clock.seconds();
  }

  // Closed forms against finite differences.
  {
    clock = Stopwatch();
    CertReport& r = suite.fd_defect;
    r.check_name = "levi_fd_defect";
    r.params = params;
    // FD points avoid the two transition bands of S_eta (mollifier ramp and
    // curvature blend), where the step-h truncation error dominates; a
    // sample of band points is reported separately.
    const double margin = 20.0 * opts.fd_h;
    const auto in_band = [&](double s) {
      const double u = fold_half_pi(s) - kPi;
      const double g = sp.gamma();
      const double a = p.alpha();
      return (u > 0.25 * g - margin && u < 0.75 * g + margin) ||
             (u > a - margin && u < a + p.blend_width() + margin);
    };
    std::vector<std::size_t> smooth_idx, band_idx;
    for (std::size_t i = 0; i < disc.size(); ++i) {
      (in_band(disc[i].s) ? band_idx : smooth_idx).push_back(i);
    }
    const std::size_t nd = std::min(opts.fd_n, smooth_idx.size());
    const std::size_t nb = std::min(opts.fd_n / 10, band_idx.size());
    const std::size_t nh = std::min(opts.fd_n, hp.size());
    r.grid = {{"disc_points", nd}, {"halfplane_points", nh}, {"h", opts.fd_h},
              {"richardson", opts.richardson}};
    // Spread the FD points over the whole sample rather than its prefix.
    const auto pick = [](std::size_t j, std::size_t m, std::size_t total) {
      return j * (total / std::max<std::size_t>(m, 1));
    };
    const ArgMax dd = parallel_argmax(nd, [&](std::size_t j) {
      const std::size_t i = smooth_idx[pick(j, nd, smooth_idx.size())];
      const double fd = levi_fd_check(DefiningFunction::disc, rp, sp, disc[i].pt,
                                      opts.fd_h, opts.richardson);
      return std::abs(fd - value[i]);
    });
    const auto band_defect = [&](bool richardson) {
      return parallel_argmax(nb, [&](std::size_t j) {
        const std::size_t i = band_idx[pick(j, nb, band_idx.size())];
        const double fd = levi_fd_check(DefiningFunction::disc, rp, sp, disc[i].pt,
                                        opts.fd_h, richardson);
        return std::abs(fd - value[i]);
      }).value;
    };
    const double band_plain = nb ? band_defect(false) : 0.0;
    const double band_rich = nb ? band_defect(true) : 0.0;
    const ArgMax dh = parallel_argmax(nh, [&](std::size_t j) {
      const PointCW& pt = hp[pick(j, nh, hp.size())];
      const double fd = levi_fd_check(DefiningFunction::halfplane, rp, sp, pt,
                                      opts.fd_h, opts.richardson);
      return std::abs(fd - levi_halfplane(rp, pt));
    });
    constexpr double kDiscTol = 1e-4;
    constexpr double kHalfTol = 1e-5;
    const double md = nd ? kDiscTol - dd.value : kInf;
    const double mh = nh ? kHalfTol - dh.value : kInf;
    r.min_margin = std::min(md, mh);
    if (md <= mh && nd) {
      const auto& d = disc[smooth_idx[pick(dd.index, nd, smooth_idx.size())]];
      r.argmin = {{"family", "disc"}, {"s", d.s}, {"theta", d.theta}};
    } else if (nh) {
      r.argmin = point_json(hp[pick(dh.index, nh, hp.size())]);
      r.argmin["family"] = "halfplane";
    }
    r.tolerance = 0.0;
    r.details = {{"max_disc_defect", nd ? dd.value : 0.0},
                 {"max_halfplane_defect", nh ? dh.value : 0.0},
                 {"disc_tolerance", kDiscTol}, {"halfplane_tolerance", kHalfTol},
                 {"band_diagnostic", {{"points", nb},
                                      {"stencil_margin", margin},
                                      {"max_defect", band_plain},
                                      {"max_defect_richardson", band_rich}}}};
    r.finalize();
    r.wall_time_s = clock.seconds();
  }
  return suite;
}

json selected_json(const SelectedParameters& sel) {
  return {{"tube_eps", sel.tube_eps}, {"d1", sel.d1},       {"eta1", sel.eta1},
          {"eta", sel.eta},           {"d2", sel.d2},       {"delta", sel.delta},
          {"t_delta", sel.t_delta},   {"t", sel.t}};
}

Selection select_parameters(const ProfileS& p, const SelectionOptions& opts) {
  SelectedParameters v;
  v.tube_eps = opts.tube_eps;
  v.d1 = opts.d1 > 0.0 ? opts.d1 : find_d1(p, opts.crucial_n_delta, opts.crucial_n_psi);

  ContainmentOptions finder;
  finder.sample_n = opts.finder_samples;
  finder.seed = opts.seed;
  if (opts.eta > 0.0) {
    v.eta1 = 2.0 * opts.eta;
    v.eta = opts.eta;
  } else {
    v.eta1 = find_eta1(p, opts.tube_eps, finder);
    v.eta = 0.5 * v.eta1;
  }
  SmoothedProfile sp = build_smoothed(p, v.eta);

  v.d2 = find_d2(p, sp, opts.tube_eps, finder);
  v.delta = 0.5 * std::min(v.d1, v.d2);
  const RotationParams rp0 = RotationParams::make(opts.tube_eps, v.eta, v.delta, 0.0);
  v.t_delta = find_t_delta(p, sp, rp0, opts.t_delta_samples, opts.seed);
  v.t = 0.5 * v.t_delta;
  return {v, std::move(sp), rp0.with_t(v.t)};
}

}  // namespace worm
