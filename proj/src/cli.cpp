#include "worm/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "worm/report.hpp"

namespace worm {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string profile = "builtin";
  std::vector<double> eps_list = default_eps_list();
  std::vector<double> s_list = {1.0, 2.0, 4.0};
  double grid_scale = 1.0;
  std::string out_dir = "wormcert-out";
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
  double tube_eps = 0.1;
  double eta = 0.0;
  double delta = 0.0;
  double t = -1.0;
};

std::string num(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(10);
  os << v;
  return os.str();
}

std::size_t scaled(std::size_t n, double scale, std::size_t floor = 16) {
  const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale));
  return std::max(floor, v);
}

struct Loaded {
  ProfileS base;
  std::optional<SmoothedProfile> smoothed;
};

Loaded load_profile(const Common& c) {
  if (c.profile == "builtin") return {build_profile(), std::nullopt};
  LoadedProfile lp = profile_from_json(read_json_file(c.profile));
  return {lp.base, lp.smoothed};
}

void validate_lists(const ProfileS& p, const Common& c) {
  const double eps0 = epsilon0(p);
  for (const double e : c.eps_list) {
    if (!(e > 0.0 && e < eps0)) {
      throw ParameterError("--eps values must lie in (0, eps_0 = " + num(eps0) + ")");
    }
  }
  for (const double s : c.s_list) {
    if (!(s >= 1.0)) throw ParameterError("--s values must be >= 1");
  }
  if (!(c.tube_eps > 0.0)) throw ParameterError("--tube-eps must be > 0");
}

SelectionOptions selection_options(const Common& c) {
  SelectionOptions o;
  o.tube_eps = c.tube_eps;
  o.crucial_n_delta = scaled(512, c.grid_scale);
  o.crucial_n_psi = scaled(4096, c.grid_scale);
  o.finder_samples = scaled(20000, c.grid_scale);
  o.t_delta_samples = scaled(100000, c.grid_scale);
  o.seed = c.seed;
  return o;
}

// Full override (--eta, --delta, --t) or the search, optionally with eta fixed.
Selection resolve_parameters(const Loaded& L, const Common& c) {
  const bool any = c.delta > 0.0 || c.t >= 0.0;
  if (any && !(c.eta > 0.0 && c.delta > 0.0 && c.t >= 0.0)) {
    throw ParameterError("--delta and --t must be given together with --eta");
  }
  if (any) {
    SmoothedProfile sp = build_smoothed(L.base, c.eta);
    SelectedParameters v;
    v.tube_eps = c.tube_eps;
    v.eta = c.eta;
    v.delta = c.delta;
    v.t = c.t;
    return {v, std::move(sp), RotationParams::make(c.tube_eps, c.eta, c.delta, c.t)};
  }
  SelectionOptions o = selection_options(c);
  if (c.eta > 0.0) {
    o.eta = c.eta;
  } else if (L.smoothed) {
    o.eta = L.smoothed->eta();
  }
  return select_parameters(L.base, o);
}

class ReportSink {
 public:
  ReportSink(fs::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {
    fs::create_directories(dir_);
  }

  void add(const CertReport& r, const std::string& file) {
    write_json_file(dir_ / file, report_to_json(r));
    json entry = {{"check_name", r.check_name}, {"file", file}, {"pass", r.pass},
                  {"min_margin", nullptr}, {"tolerance", r.tolerance}};
    if (std::isfinite(r.min_margin)) entry["min_margin"] = r.min_margin;
    checks_.push_back(entry);
    all_pass_ = all_pass_ && r.pass;
    out_ << (r.pass ? "PASS " : "FAIL ") << fs::path(file).stem().string()
         << "  margin=" << num(r.min_margin) << "  tol=" << num(r.tolerance) << '\n';
  }

  void add(const CertReport& r) { add(r, r.check_name + ".json"); }

  const json& checks() const { return checks_; }
  bool all_pass() const { return all_pass_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::ostream& out_;
  json checks_ = json::array();
  bool all_pass_ = true;
};

std::string eps_tag(double eps) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << eps;
  return os.str();
}

LeviOptions levi_options(const Common& c) {
  LeviOptions o;
  o.disc_n = scaled(100000, c.grid_scale);
  o.halfplane_n = scaled(100000, c.grid_scale);
  o.fd_n = scaled(1000, c.grid_scale);
  o.seed = c.seed;
  return o;
}

ContainmentOptions containment_options(const Common& c) {
  ContainmentOptions o;
  o.sample_n = scaled(100000, c.grid_scale);
  o.seed = c.seed;
  return o;
}

// ---------------------------------------------------------------------------

struct BuildArgs {
  double alpha = kDefaultAlpha;
  double extension_c = kDefaultExtensionC;
  double blend_width = 0.0;
};

int cmd_build_profile(const Common& c, const BuildArgs& b, std::ostream& out) {
  // The small-angle inequalities are verified on [-alpha0, alpha0]; a larger
  // user alpha falls outside that window.
  const AlphaSelection a = select_alpha();
  if (b.alpha > a.alpha) {
    throw ParameterError("--alpha exceeds the verified value " + num(a.alpha));
  }
  const ProfileS p = build_profile(b.alpha, b.extension_c, b.blend_width);
  std::optional<SmoothedProfile> sp;
  if (c.eta > 0.0) sp = build_smoothed(p, c.eta);
  const fs::path file = fs::path(c.out_dir) / "profile.json";
  write_json_file(file, profile_to_json(p, sp ? &*sp : nullptr));
  out << "alpha " << num(p.alpha()) << '\n'
      << "beta " << num(p.beta()) << '\n'
      << "eps0 " << num(epsilon0(p)) << '\n';
  if (sp) out << "eta " << num(sp->eta()) << "  gamma " << num(sp->gamma()) << '\n';
  out << "wrote " << file.string() << '\n';
  return kExitPass;
}

int cmd_certify_all(const Common& c, std::ostream& out, std::ostream& err) {
  const Loaded L = load_profile(c);
  const ProfileS& p = L.base;
  validate_lists(p, c);
  ReportSink sink(c.out_dir, out);

  json summary = {{"version", kReportVersion},
                  {"seed", c.seed},
                  {"grid_scale", c.grid_scale},
                  {"tube_eps", c.tube_eps},
                  {"eps_list", c.eps_list},
                  {"s_list", c.s_list}};
  const auto finish = [&](int code) {
    summary["checks"] = sink.checks();
    summary["pass"] = code == kExitPass;
    write_json_file(sink.dir() / "summary.json", summary);
    return code;
  };
  // Errors inside a step are hard failures: record them and stop.
  const auto step = [&](const std::string& name, const auto& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      CertReport r;
      r.check_name = name;
      r.min_margin = -std::numeric_limits<double>::infinity();
      r.details = {{"error", e.what()}};
      sink.add(r);
      summary["aborted_at"] = name + ".json";
      err << "aborted: " << (sink.dir() / (name + ".json")).string() << ": " << e.what()
          << '\n';
      return false;
    }
  };

  const std::size_t nd = scaled(512, c.grid_scale);
  const std::size_t np = scaled(4096, c.grid_scale);
  double d1 = 0.0;
  std::optional<Selection> sel;

  if (!step("profile_invariants", [&] { sink.add(certify_profile(p)); })) {
    return finish(kExitCertificationFailure);
  }
  if (!step("crucial_estimate", [&] {
        d1 = find_d1(p, nd, np);
        CertReport r = certify_crucial_estimate(p, d1, nd, np);
        r.details["d1"] = d1;
        sink.add(r);
      })) {
    return finish(kExitCertificationFailure);
  }
  if (!step("parameter_selection", [&] {
        Common cc = c;
        SelectionOptions o = selection_options(cc);
        o.d1 = d1;
        if (L.smoothed) o.eta = L.smoothed->eta();
        sel = select_parameters(p, o);
        summary["parameters"] = selected_json(sel->values);
        summary["profile"] = profile_to_json(p, &sel->smoothed);
        sink.add(certify_smoothed(sel->smoothed));
      })) {
    return finish(kExitCertificationFailure);
  }
  const SmoothedProfile& sp = sel->smoothed;
  const RotationParams& rp = sel->params;
  const bool ok =
      step("containments",
           [&] { sink.add(certify_containments(p, sp, rp, containment_options(c))); }) &&
      step("closure_in_halfplane", [&] {
        sink.add(certify_t_delta(p, sp, rp, scaled(100000, c.grid_scale), c.seed));
      }) &&
      step("levi", [&] {
        const LeviSuite suite = certify_levi(p, sp, rp, levi_options(c));
        for (const CertReport* r : suite.reports()) sink.add(*r);
      }) &&
      step("m_phi_identity",
           [&] { sink.add(m_phi_identity_check(p, d1, scaled(256, c.grid_scale))); }) &&
      step("annuli", [&] {
        for (const double e : c.eps_list) {
          sink.add(certify_annuli(p, e, scaled(256, c.grid_scale), scaled(256, c.grid_scale)),
                   "annuli_eps_" + eps_tag(e) + ".json");
        }
      }) &&
      step("witness", [&] {
        WitnessConstants wc = lipschitz_constants(p, 0.1, scaled(100000, c.grid_scale), c.seed);
        wc.s_list = c.s_list;
        const WitnessTable table = witness_table(p, wc, c.eps_list);
        write_json_file(sink.dir() / "witness_table.json", witness_table_json(table));
        if (c.format == "csv") {
          write_text_file(sink.dir() / "witness_table.csv", witness_table_csv(table));
        }
        sink.add(certify_witness(table, wc));
      });
  if (!ok) return finish(kExitCertificationFailure);
  const int code = sink.all_pass() ? kExitPass : kExitCertificationFailure;
  out << (code == kExitPass ? "all checks passed" : "some checks failed") << '\n';
  return finish(code);
}

int cmd_crucial(const Common& c, double delta_max, std::ostream& out) {
  const Loaded L = load_profile(c);
  const std::size_t nd = scaled(512, c.grid_scale);
  const std::size_t np = scaled(4096, c.grid_scale);
  const double dmax = delta_max > 0.0 ? delta_max : find_d1(L.base, nd, np);
  ReportSink sink(c.out_dir, out);
  CertReport r = certify_crucial_estimate(L.base, dmax, nd, np);
  r.details["d1_searched"] = !(delta_max > 0.0);
  sink.add(r);
  out << "delta_max " << num(dmax) << '\n';
  return sink.all_pass() ? kExitPass : kExitCertificationFailure;
}

int cmd_levi(const Common& c, std::ostream& out) {
  const Loaded L = load_profile(c);
  const Selection sel = resolve_parameters(L, c);
  ReportSink sink(c.out_dir, out);
  const LeviSuite suite = certify_levi(L.base, sel.smoothed, sel.params, levi_options(c));
  for (const CertReport* r : suite.reports()) sink.add(*r);
  return sink.all_pass() ? kExitPass : kExitCertificationFailure;
}

int cmd_containment(const Common& c, std::ostream& out) {
  const Loaded L = load_profile(c);
  if (!(c.tube_eps > 0.0)) throw ParameterError("--tube-eps must be > 0");
  const Selection sel = resolve_parameters(L, c);
  ReportSink sink(c.out_dir, out);
  sink.add(certify_containments(L.base, sel.smoothed, sel.params, containment_options(c)));
  sink.add(certify_t_delta(L.base, sel.smoothed, sel.params,
                           scaled(100000, c.grid_scale), c.seed));
  out << "eta " << num(sel.params.eta) << "  delta " << num(sel.params.delta) << "  t "
      << num(sel.params.t) << '\n';
  return sink.all_pass() ? kExitPass : kExitCertificationFailure;
}

int cmd_witness(const Common& c, std::ostream& out) {
  const Loaded L = load_profile(c);
  validate_lists(L.base, c);
  WitnessConstants wc = lipschitz_constants(L.base, 0.1, scaled(100000, c.grid_scale), c.seed);
  wc.s_list = c.s_list;
  const WitnessTable table = witness_table(L.base, wc, c.eps_list);
  ReportSink sink(c.out_dir, out);
  if (c.format == "csv") {
    write_text_file(sink.dir() / "witness_table.csv", witness_table_csv(table));
  } else {
    write_json_file(sink.dir() / "witness_table.json", witness_table_json(table));
  }
  sink.add(certify_witness(table, wc));
  return sink.all_pass() ? kExitPass : kExitCertificationFailure;
}

int cmd_annuli(const Common& c, std::ostream& out) {
  const Loaded L = load_profile(c);
  validate_lists(L.base, c);
  ReportSink sink(c.out_dir, out);
  for (const double e : c.eps_list) {
    sink.add(certify_annuli(L.base, e, scaled(256, c.grid_scale), scaled(256, c.grid_scale)),
             "annuli_eps_" + eps_tag(e) + ".json");
  }
  return sink.all_pass() ? kExitPass : kExitCertificationFailure;
}

struct SliceArgs {
  std::string type = "wplane";
  double abs_z2 = std::exp(kHalfPi);
  double re_min = -2.5, re_max = 2.5, im_min = -2.5, im_max = 2.5;
  double w_angle = kHalfPi;
  double abs_w_max = 2.5;
  double log_min = -1.5, log_max = kPi + 1.5;
  std::size_t nx = 101, ny = 101;
};

int cmd_slice(const Common& c, const SliceArgs& s, std::ostream& out) {
  if (s.type == "wplane" && !(s.abs_z2 > 0.0)) {
    throw ParameterError("slice: |z| = 0 is off the chart");
  }
  if (s.nx < 2 || s.ny < 2) throw ParameterError("slice: need at least 2 points per axis");
  const Loaded L = load_profile(c);
  const Selection sel = resolve_parameters(L, c);
  const RotationParams& rp = sel.params;

  const auto axis = [](double lo, double hi, std::size_t i, std::size_t n) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  const bool wplane = s.type == "wplane";
  const std::string c0 = wplane ? "re_w" : "log_abs_z2";
  const std::string c1 = wplane ? "im_w" : "abs_w";

  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  csv.precision(17);
  json rows = json::array();
  csv << c0 << ',' << c1 << ",rho,rho_delta_eta,halfplane_margin,in_D\n";
  // Row-major: the second coordinate indexes rows.
  for (std::size_t j = 0; j < s.ny; ++j) {
    for (std::size_t i = 0; i < s.nx; ++i) {
      double a, b;
      PointCW pt;
      if (wplane) {
        a = axis(s.re_min, s.re_max, i, s.nx);
        b = axis(s.im_min, s.im_max, j, s.ny);
        pt = {cplx(std::sqrt(s.abs_z2), 0.0), cplx(a, b)};
      } else {
        a = axis(s.log_min, s.log_max, i, s.nx);
        b = axis(0.0, s.abs_w_max, j, s.ny);
        pt = {cplx(std::exp(0.5 * a), 0.0), b * cplx(std::cos(s.w_angle), std::sin(s.w_angle))};
      }
      const double rho = rho_eval(L.base, pt);
      const double rde = rho_delta_eta_eval(rp, sel.smoothed, pt);
      const double hm = halfplane_margin(rp, pt);
      const bool in_d = rde < 0.0 && hm > 0.0;
      if (c.format == "csv") {
        csv << a << ',' << b << ',' << rho << ',' << rde << ',' << hm << ',' << (in_d ? 1 : 0)
            << '\n';
      } else {
        rows.push_back({{c0, a}, {c1, b}, {"rho", rho}, {"rho_delta_eta", rde},
                        {"halfplane_margin", hm}, {"in_D", in_d}});
      }
    }
  }
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  if (c.format == "csv") {
    write_text_file(dir / "slice.csv", csv.str());
    out << "wrote " << (dir / "slice.csv").string() << '\n';
  } else {
    write_json_file(dir / "slice.json",
                    {{"type", s.type}, {"params", params_json(rp)}, {"rows", rows}});
    out << "wrote " << (dir / "slice.json").string() << '\n';
  }
  return kExitPass;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--profile", c.profile, "Profile JSON path or 'builtin'");
  sub->add_option("--eps", c.eps_list, "Witness eps list, comma separated")->delimiter(',');
  sub->add_option("--s", c.s_list, "Exponent list s >= 1, comma separated")->delimiter(',');
  sub->add_option("--grid-scale", c.grid_scale, "Multiplier for every grid and sample count")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out_dir, "Output directory");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", c.seed, "Seed of the low-discrepancy samplers");
  sub->add_option("--tube-eps", c.tube_eps, "Tube radius of the neighbourhood");
  sub->add_option("--eta", c.eta, "Fix eta");
  sub->add_option("--delta", c.delta, "Fix delta (needs --eta and --t)");
  sub->add_option("--t", c.t, "Fix t (needs --eta and --delta)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certification suite for the modified worm domain"};
  app.name("wormcert");
  app.require_subcommand(1);

  Common c;
  BuildArgs build;
  double delta_max = 0.0;
  SliceArgs slice;

  auto* b = app.add_subcommand("build-profile", "Build and validate a profile, write profile.json");
  add_common(b, c);
  b->add_option("--alpha", build.alpha, "Round-off width alpha");
  b->add_option("--extension-c", build.extension_c, "Curvature floor of the extension");
  b->add_option("--blend-width", build.blend_width, "Curvature blend width (0: alpha/2)");

  auto* all = app.add_subcommand("certify-all", "Run every certification and write summary.json");
  add_common(all, c);

  auto* ce = app.add_subcommand("crucial-estimate", "Grid-certify the crucial estimate");
  add_common(ce, c);
  ce->add_option("--delta-max", delta_max, "Upper end of the delta grid (0: search d1)");

  auto* lv = app.add_subcommand("levi", "Levi-form suite on sampled boundary points");
  add_common(lv, c);
  auto* ct = app.add_subcommand("containment", "Containment and half-plane checks");
  add_common(ct, c);
  auto* wt = app.add_subcommand("witness", "Witness table for the eps list");
  add_common(wt, c);
  auto* an = app.add_subcommand("annuli", "Annulus hypotheses for the eps list");
  add_common(an, c);

  auto* sl = app.add_subcommand("slice", "Export a w-plane or radial slice");
  add_common(sl, c);
  sl->add_option("--type", slice.type, "wplane or radial")
      ->check(CLI::IsMember({"wplane", "radial"}));
  sl->add_option("--abs-z2", slice.abs_z2, "|z|^2 of a w-plane slice");
  sl->add_option("--re-min", slice.re_min);
  sl->add_option("--re-max", slice.re_max);
  sl->add_option("--im-min", slice.im_min);
  sl->add_option("--im-max", slice.im_max);
  sl->add_option("--w-angle", slice.w_angle, "arg w of a radial slice");
  sl->add_option("--abs-w-max", slice.abs_w_max);
  sl->add_option("--log-min", slice.log_min, "ln|z|^2 range of a radial slice");
  sl->add_option("--log-max", slice.log_max);
  sl->add_option("--nx", slice.nx);
  sl->add_option("--ny", slice.ny);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (*b) return cmd_build_profile(c, build, out);
    if (*all) return cmd_certify_all(c, out, err);
    if (*ce) return cmd_crucial(c, delta_max, out);
    if (*lv) return cmd_levi(c, out);
    if (*ct) return cmd_containment(c, out);
    if (*wt) return cmd_witness(c, out);
    if (*an) return cmd_annuli(c, out);
    if (*sl) return cmd_slice(c, slice, out);
  } catch (const ParameterError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "certification error: " << e.what() << '\n';
    return kExitCertificationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace worm
