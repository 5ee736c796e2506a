#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "worm/geometry.hpp"
#include "worm/levi.hpp"
#include "worm/profiles.hpp"
#include "worm/sampling.hpp"

namespace worm {

using json = nlohmann::json;

/// Outcome of one grid or sampling certification. pass == (min_margin > tolerance).
struct CertReport {
  std::string check_name;
  json params = json::object();
  json grid = json::object();
  double min_margin = 0.0;
  json argmin = json::object();
  double tolerance = 0.0;
  bool pass = false;
  double wall_time_s = 0.0;
  json details = json::object();

  void finalize() { pass = min_margin > tolerance; }
};

json params_json(const RotationParams& rp);

// ---------------------------------------------------------------------------
// Profile invariants as reports

/// check_profile with every invariant turned into a slack; margin is the
/// smallest one.
CertReport certify_profile(const ProfileS& p, double h = 1e-3);

/// check_smoothed as a report. The factor-100 slack carries the 1e-12 allowance.
CertReport certify_smoothed(const SmoothedProfile& sp,
                            std::size_t grid_points = 10000);

// ---------------------------------------------------------------------------
// Witness suite

/// pi + 1 / ln(2 / eps); requires 0 < eps < 2. Throws if g(x - pi) misses
/// eps / 2 by more than 1e-12 relative.
double x_epsilon(double eps);

/// (e^{pi/4}, i sin x_eps).
PointCW witness_point(double eps);

struct WitnessConstants {
  double lip_radius = 0.1;
  double lip_L = 0.0;
  double max_sampled_gradient = 0.0;
  std::size_t samples = 0;
  std::vector<double> s_list = {1.0, 2.0, 4.0};
};

/// Samples a superset of the closure of the lip_radius-tube of the domain and
/// returns 1.05 x the largest gradient norm of rho seen there.
WitnessConstants lipschitz_constants(const ProfileS& p, double lip_radius = 0.1,
                                     std::size_t sample_n = 100000,
                                     std::uint64_t seed = kDefaultSeed);

/// Boundary circles of the annuli over phi in [pi, x_eps] lie within eps of
/// the domain; the bottom annulus lies on its boundary.
CertReport certify_annuli(const ProfileS& p, double eps,
                          std::size_t phi_grid = 256,
                          std::size_t bottom_grid = 256);

struct WitnessRow {
  double eps = 0.0;
  double x_minus_pi = 0.0;
  double g_relative_residual = 0.0;  // |g(x - pi) - eps/2| / (eps/2)
  double rho = 0.0;                  // rho(p_eps)
  double distance = 0.0;             // distance of p_eps to the domain
  double distance_bound = 0.0;       // min{lip_radius, (x - pi) / L}
  std::vector<double> ratios;        // (x - pi)^s / eps per s
};

struct WitnessTable {
  std::vector<double> s_list;
  std::vector<WitnessRow> rows;
};

std::vector<double> default_eps_list();

/// Rows ordered as eps_list. Every eps must lie in (0, eps_0).
WitnessTable witness_table(const ProfileS& p, const WitnessConstants& wc,
                           const std::vector<double>& eps_list);

/// Checks rho >= x - pi, the distance bound, the g residual and strict growth
/// of every ratio column along decreasing eps.
CertReport certify_witness(const WitnessTable& table, const WitnessConstants& wc);

// ---------------------------------------------------------------------------
// Crucial estimate

/// cos(delta (pi/2 - psi)) - sqrt(S(psi)) + sin(psi + delta (pi/2 - psi)) delta_tilde,
/// evaluated without cancellation where S = (cos t - g(t))^2.
double crucial_estimate_value(const ProfileS& p, double delta, double psi);

CertReport certify_crucial_estimate(const ProfileS& p, double delta_max,
                                    std::size_t n_delta = 512,
                                    std::size_t n_psi = 4096);

/// Largest delta_max on the 1e-3 lattice of (0, 1/4) for which the crucial
/// estimate certifies.
double find_d1(const ProfileS& p, std::size_t n_delta = 512,
               std::size_t n_psi = 4096);

/// M(t, y) = cos(a)(cos ty - cos y) + sin(a)(sin ty + sin (1-t)y - sin y),
/// a = t pi / (2 (1 - t)).
double m_function(double t, double y);
/// x + t pi / (2 (1 - t)).
double phi_function(double t, double x);

/// g(-psi) + M(delta, phi(delta, psi)) against the crucial-estimate expression
/// over (0, d1) x (-alpha/2, 0), plus M >= 0 and M(t, 0) = 0.
CertReport m_phi_identity_check(const ProfileS& p, double d1,
                                std::size_t n = 256);

// ---------------------------------------------------------------------------
// Containments and parameter search

struct ContainmentOptions {
  std::size_t sample_n = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t distance_grid = 2000;
  bool side_a = true;  // closure of the domain inside D^(delta,eta)
  bool side_b = true;  // boundary of D^(delta,eta) inside the tube
};

/// Point of the closure of the domain; even indices lie on its boundary.
PointCW omega_closure_sample(const ProfileS& p, const Halton& h, std::size_t i);

/// Point of the boundary of D^(delta,eta) from (rotation angle, disc angle,
/// z phase) coordinates.
PointCW d_boundary_sample(const RotationParams& rp, const SmoothedProfile& sp,
                          double s, double theta, double phase);

/// rp.epsilon is the tube radius.
CertReport certify_containments(const ProfileS& p, const SmoothedProfile& sp,
                                const RotationParams& rp,
                                const ContainmentOptions& opts = {});

inline constexpr double kEta1ProbeDelta = 1e-6;

/// Largest eta (to 2% in log scale) for which build_smoothed succeeds and the
/// tube side of the containment holds at delta = kEta1ProbeDelta.
double find_eta1(const ProfileS& p, double eps, const ContainmentOptions& opts = {});

/// Largest delta (to 2% in log scale) for which both containment sides hold.
double find_d2(const ProfileS& p, const SmoothedProfile& sp, double eps,
               const ContainmentOptions& opts = {});

/// 0.5 x min of the t = 0 half-plane margin over sampled closure points.
/// Throws when that minimum is not positive.
double find_t_delta(const ProfileS& p, const SmoothedProfile& sp,
                    const RotationParams& rp, std::size_t sample_n = 100000,
                    std::uint64_t seed = kDefaultSeed);

CertReport certify_t_delta(const ProfileS& p, const SmoothedProfile& sp,
                           const RotationParams& rp,
                           std::size_t sample_n = 100000,
                           std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Levi suite

struct LeviOptions {
  std::size_t disc_n = 100000;
  std::size_t halfplane_n = 100000;
  std::size_t fd_n = 1000;
  double fd_h = 1e-4;
  bool richardson = false;
  std::uint64_t seed = kDefaultSeed;
};

struct LeviSuite {
  CertReport disc;
  CertReport halfplane;
  CertReport theta_bound;
  CertReport fifty_bound;
  CertReport fd_defect;

  std::vector<const CertReport*> reports() const {
    return {&disc, &halfplane, &theta_bound, &fifty_bound, &fd_defect};
  }
  bool pass() const;
};

LeviSuite certify_levi(const ProfileS& p, const SmoothedProfile& sp,
                       const RotationParams& rp, const LeviOptions& opts = {});

// ---------------------------------------------------------------------------
// Full parameter selection

struct SelectedParameters {
  double tube_eps = 0.1;
  double d1 = 0.0;
  double eta1 = 0.0;
  double eta = 0.0;
  double d2 = 0.0;
  double delta = 0.0;
  double t_delta = 0.0;
  double t = 0.0;
};

json selected_json(const SelectedParameters& sel);

struct SelectionOptions {
  double tube_eps = 0.1;
  std::size_t crucial_n_delta = 512;
  std::size_t crucial_n_psi = 4096;
  std::size_t finder_samples = 20000;
  std::size_t t_delta_samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  double d1 = 0.0;   // > 0 skips the d1 search
  double eta = 0.0;  // > 0 fixes eta and skips the eta1 search
};

struct Selection {
  SelectedParameters values;
  SmoothedProfile smoothed;
  RotationParams params;
};

/// d1 by search; eta = eta1 / 2; delta = min(d1, d2) / 2; t = t_delta / 2.
Selection select_parameters(const ProfileS& p, const SelectionOptions& opts = {});

}  // namespace worm
