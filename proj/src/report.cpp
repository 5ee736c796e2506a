#include "worm/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace worm {

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double required(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParameterError(std::string("profile JSON: missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

json report_to_json(const CertReport& r) {
  return {{"check_name", r.check_name},
          {"params", r.params},
          {"grid", r.grid},
          {"min_margin", finite_or_null(r.min_margin)},
          {"argmin", r.argmin},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"wall_time_s", r.wall_time_s},
          {"version", kReportVersion},
          {"details", r.details}};
}

json profile_to_json(const ProfileS& p, const SmoothedProfile* sp) {
  json j = {{"alpha", p.alpha()},
            {"beta", p.beta()},
            {"extension_c", p.extension_c()},
            {"blend_width", p.blend_width()},
            {"eta", nullptr},
            {"gamma", nullptr},
            {"x_eta", nullptr},
            {"beta_eta", nullptr}};
  if (sp) {
    j["eta"] = sp->eta();
    j["gamma"] = sp->gamma();
    j["x_eta"] = sp->x_eta();
    j["beta_eta"] = sp->beta_eta();
  }
  return j;
}

LoadedProfile profile_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("profile JSON: expected an object");
  const double beta = required(j, "beta");
  if (!(beta > 0.0 && beta < kHalfPi)) {
    throw ParameterError("profile JSON: beta must lie in (0, pi/2)");
  }
  ProfileS p = build_profile(required(j, "alpha"), required(j, "extension_c"),
                             required(j, "blend_width"));
  if (!close(p.beta(), beta, 1e-12)) {
    throw ParameterError("profile JSON: stored beta disagrees with the rebuilt profile");
  }
  LoadedProfile out{p, std::nullopt};
  if (j.contains("eta") && !j["eta"].is_null()) {
    SmoothedProfile sp =
        build_smoothed_with_gamma(p, required(j, "eta"), required(j, "gamma"));
    if (!close(sp.x_eta(), required(j, "x_eta"), 1e-10) ||
        !close(sp.beta_eta(), required(j, "beta_eta"), 1e-10)) {
      throw ParameterError("profile JSON: stored x_eta/beta_eta disagree with the rebuild");
    }
    out.smoothed = std::move(sp);
  }
  return out;
}

json witness_table_json(const WitnessTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"eps", r.eps},
                    {"x_minus_pi", r.x_minus_pi},
                    {"g_relative_residual", r.g_relative_residual},
                    {"rho", r.rho},
                    {"distance", r.distance},
                    {"distance_bound", r.distance_bound},
                    {"ratios", r.ratios}});
  }
  return {{"s_list", t.s_list}, {"rows", rows}};
}

std::string witness_table_csv(const WitnessTable& t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "eps,x_minus_pi,rho,distance,distance_bound";
  for (const double s : t.s_list) os << ",ratio_s" << s;
  os << '\n';
  for (const auto& r : t.rows) {
    os << r.eps << ',' << r.x_minus_pi << ',' << r.rho << ',' << r.distance << ','
       << r.distance_bound;
    for (const double v : r.ratios) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace worm
