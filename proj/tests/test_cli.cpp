#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "worm/cli.hpp"
#include "worm/report.hpp"

using namespace worm;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "wormcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("wormcert_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, kExitPass); }

TEST(Cli, MissingOrUnknownSubcommand) {
  EXPECT_EQ(run({}).code, kExitConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(run({"levi", "--no-such-flag"}).code, kExitConfigError);
  EXPECT_EQ(run({"witness", "--format", "xml"}).code, kExitConfigError);
}

TEST(Cli, BinaryReportsConfigErrors) {
  const std::string cmd = std::string(WORMCERT_EXE) + " slice --abs-z2 0 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitConfigError);
}

TEST(Cli, BuildProfileDefaultsAndValidation) {
  const fs::path d = scratch("build");
  const CliRun r = run({"build-profile", "--out", d.string()});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  EXPECT_NE(r.out.find("alpha 0.07"), std::string::npos);
  const LoadedProfile lp = profile_from_json(read_json_file(d / "profile.json"));
  EXPECT_EQ(lp.base.alpha(), 0.07);
  EXPECT_FALSE(lp.smoothed.has_value());

  EXPECT_EQ(run({"build-profile", "--alpha", "0.2", "--out", d.string()}).code,
            kExitConfigError);
  EXPECT_EQ(run({"build-profile", "--extension-c", "0", "--out", d.string()}).code,
            kExitConfigError);
}

TEST(Cli, BuildProfileWithEtaRoundTrips) {
  const fs::path d = scratch("build_eta");
  ASSERT_EQ(run({"build-profile", "--eta", "5e-5", "--out", d.string()}).code, kExitPass);
  const LoadedProfile lp = profile_from_json(read_json_file(d / "profile.json"));
  ASSERT_TRUE(lp.smoothed.has_value());
  EXPECT_EQ(lp.smoothed->eta(), 5e-5);
}

TEST(Cli, CorruptedProfileIsRejected) {
  const fs::path d = scratch("corrupt");
  fs::create_directories(d);
  json j = profile_to_json(build_profile());
  j["beta"] = 2.0;  // beyond pi/2
  write_json_file(d / "bad.json", j);
  const CliRun r = run({"certify-all", "--profile", (d / "bad.json").string(), "--out",
                     (d / "out").string()});
  EXPECT_NE(r.code, kExitPass);
  EXPECT_EQ(r.code, kExitConfigError);
  std::ofstream(d / "garbage.json") << "{not json";
  EXPECT_EQ(run({"witness", "--profile", (d / "garbage.json").string()}).code,
            kExitConfigError);
}

TEST(Cli, EpsAboveThresholdIsConfigError) {
  EXPECT_EQ(run({"witness", "--eps", "1e-7,1e-3", "--out", scratch("eps").string()}).code,
            kExitConfigError);
  EXPECT_EQ(run({"annuli", "--s", "0.5", "--out", scratch("s").string()}).code,
            kExitConfigError);
}

TEST(Cli, WitnessCsv) {
  const fs::path d = scratch("witness");
  const CliRun r = run({"witness", "--format", "csv", "--eps", "1e-8,1e-9", "--s", "1,2",
                     "--out", d.string()});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  const std::string csv = slurp(d / "witness_table.csv");
  EXPECT_EQ(csv.rfind("eps,x_minus_pi,rho,distance,distance_bound,ratio_s1,ratio_s2\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "witness.json"));
}

TEST(Cli, SliceCsvShape) {
  const fs::path d = scratch("slice");
  const CliRun r = run({"slice", "--format", "csv", "--nx", "7", "--ny", "5", "--eta", "5e-5",
                     "--delta", "1e-5", "--t", "1e-7", "--out", d.string()});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  std::istringstream in(slurp(d / "slice.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "re_w,im_w,rho,rho_delta_eta,halfplane_margin,in_D");
  int rows = 0;
  bool centre_seen = false;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 6u);
    EXPECT_EQ(v[5] == 1.0, v[3] < 0.0 && v[4] > 0.0);
    // the pi/2 slice of the domain is the unit disc about i
    const double rho = v[0] * v[0] + (v[1] - 1.0) * (v[1] - 1.0) - 1.0;
    EXPECT_NEAR(v[2], rho, 1e-12);
    centre_seen = centre_seen || (v[0] == 0.0 && v[2] < 0.0);
  }
  EXPECT_EQ(rows, 35);
  EXPECT_TRUE(centre_seen);
}

TEST(Cli, SliceDegeneratesAtTheTip) {
  const ProfileS p = build_profile();
  const fs::path d = scratch("tip");
  std::ostringstream z2;
  z2.precision(17);
  z2 << std::exp(kPi + p.beta());
  ASSERT_EQ(run({"slice", "--nx", "41", "--ny", "41", "--abs-z2", z2.str(), "--eta", "5e-5",
                 "--delta", "1e-5", "--t", "1e-7", "--out", d.string()})
                .code,
            kExitPass);
  const json j = read_json_file(d / "slice.json");
  ASSERT_EQ(j["rows"].size(), 41u * 41u);
  for (const auto& row : j["rows"]) EXPECT_GE(row["rho"].get<double>(), -1e-12);
}

TEST(Cli, SliceRejectsZeroModulus) {
  EXPECT_EQ(run({"slice", "--abs-z2", "0"}).code, kExitConfigError);
}

TEST(Cli, PartialOverridesAreConfigErrors) {
  EXPECT_EQ(run({"levi", "--delta", "1e-5"}).code, kExitConfigError);
}

TEST(Cli, CertifyAllIsDeterministicAndConsistent) {
  const fs::path a = scratch("all_a"), b = scratch("all_b");
  const CliRun ra = run({"certify-all", "--grid-scale", "0.1", "--out", a.string()});
  const CliRun rb = run({"certify-all", "--grid-scale", "0.1", "--out", b.string()});
  ASSERT_EQ(ra.code, kExitPass) << ra.out << ra.err;
  ASSERT_EQ(rb.code, kExitPass);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));

  const json s = read_json_file(a / "summary.json");
  bool all = true;
  for (const auto& c : s["checks"]) {
    const json rep = read_json_file(a / c["file"].get<std::string>());
    for (const char* key : {"check_name", "params", "grid", "min_margin", "argmin", "tolerance",
                            "pass", "wall_time_s", "version"}) {
      EXPECT_TRUE(rep.contains(key)) << key;
    }
    EXPECT_EQ(rep["pass"], c["pass"]);
    all = all && c["pass"].get<bool>();
  }
  EXPECT_EQ(s["pass"].get<bool>(), all);
  EXPECT_EQ(s["checks"].size(), 18u);
  EXPECT_TRUE(s.contains("parameters"));
  EXPECT_TRUE(fs::exists(a / "witness_table.json"));
}
