// One line per acceptance criterion; exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "worm/cli.hpp"
#include "worm/report.hpp"

using namespace worm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string note;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.note += " (over time budget)";
  }
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.precision(3);
  line << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << " (" << secs
       << " s): " << o.note;
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome profile_suite() {
  const ProfileS p = build_profile();
  const ProfileChecks pc = check_profile(p);
  if (!pc.ok()) return {false, "base profile invariants fail"};
  std::string note = "base ok";
  bool ok = true;
  for (double eta : {1e-2, 1e-3}) {
    try {
      const SmoothedProfile sp = build_smoothed(p, eta);
      note += "; eta=" + fmt(eta) + " ok";
    } catch (const ParameterError& e) {
      // Report the best factor-100 slack reachable at the finest mollifier.
      const SmoothedChecks c = check_smoothed(construct_smoothed(p, eta, kGammaFloor));
      note += "; eta=" + fmt(eta) + " " + e.what() + " (slack " + fmt(c.factor100_margin) + ")";
      ok = false;
    }
  }
  return {ok, note};
}

Outcome crucial() {
  const ProfileS p = build_profile();
  const double d1 = find_d1(p, 512, 4096);
  const CertReport r = certify_crucial_estimate(p, d1, 512, 4096);
  return {r.pass && d1 >= 0.05, "d1=" + fmt(d1) + " min margin=" + fmt(r.min_margin)};
}

struct Shared {
  ProfileS p = build_profile();
  Selection sel = select_parameters(p);
};

const Shared& shared() {
  static const Shared s;
  return s;
}

Outcome levi() {
  const Shared& s = shared();
  const LeviSuite suite = certify_levi(s.p, s.sel.smoothed, s.sel.params);
  std::string note;
  for (const CertReport* r : suite.reports()) {
    note += r->check_name + "=" + fmt(r->min_margin) + (r->pass ? " " : "(fail) ");
  }
  return {suite.pass(), note};
}

Outcome containment() {
  const Shared& s = shared();
  const CertReport r = certify_containments(s.p, s.sel.smoothed, s.sel.params);
  const CertReport t = certify_t_delta(s.p, s.sel.smoothed, s.sel.params);
  return {r.pass && t.pass, "eta=" + fmt(s.sel.values.eta) + " delta=" +
                                fmt(s.sel.values.delta) + " t=" + fmt(s.sel.values.t) +
                                " margin=" + fmt(r.min_margin) +
                                " halfplane margin=" + fmt(t.min_margin)};
}

Outcome witness() {
  const ProfileS p = build_profile();
  const WitnessConstants wc = lipschitz_constants(p);
  const WitnessTable t = witness_table(p, wc, default_eps_list());
  const CertReport r = certify_witness(t, wc);
  bool ok = r.pass;
  for (const WitnessRow& row : t.rows) {
    const double lift = 1.0 / std::log(2.0 / row.eps);
    ok = ok && std::abs(row.ratios[0] / (lift / row.eps) - 1.0) <= 0.05;
  }
  const double first = t.rows.front().ratios[0], last = t.rows.back().ratios[0];
  ok = ok && first > 1e5 && last > 1e10;
  return {ok, "s=1 ratio " + fmt(first) + " -> " + fmt(last) + ", margin=" + fmt(r.min_margin)};
}

Outcome identity() {
  const ProfileS p = build_profile();
  const CertReport r = m_phi_identity_check(p, find_d1(p), 256);
  const double disc = r.details["max_discrepancy"].get<double>();
  const double mmin = r.details["min_m"].get<double>();
  return {r.pass && disc <= 1e-12 && mmin >= 0.0,
          "max discrepancy=" + fmt(disc) + " min M=" + fmt(mmin)};
}

Outcome end_to_end() {
  const fs::path base = fs::temp_directory_path() / "wormcert_acceptance";
  fs::remove_all(base);
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string dir = (base / std::to_string(k)).string();
    const char* argv[] = {"wormcert", "certify-all", "--out", dir.c_str()};
    std::ostringstream out, err;
    codes[k] = run_cli(4, argv, out, err);
  }
  const bool same = slurp(base / "0" / "summary.json") == slurp(base / "1" / "summary.json");
  return {codes[0] == 0 && codes[1] == 0 && same,
          "exit codes " + std::to_string(codes[0]) + "," + std::to_string(codes[1]) +
              (same ? ", summaries identical" : ", summaries differ")};
}

}  // namespace

int main() {
  criterion(1, "profile suite", 10, profile_suite);
  criterion(2, "crucial estimate", 30, crucial);
  criterion(3, "Levi suite", 120, levi);
  criterion(4, "containment", 120, containment);
  criterion(5, "witness suite", 60, witness);
  criterion(6, "M/phi identity", 5, identity);
  criterion(7, "end-to-end certify-all", 600, end_to_end);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " failing")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
