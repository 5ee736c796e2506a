#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "worm/numerics.hpp"

namespace worm {

/// g(x) = exp(-1/x) for x > 0 and 0 otherwise. Flat to infinite order at 0.
inline double g_eval(double x) { return flat_g(x); }

/// Smooth monotone step: 0 on (-inf, pi + gamma/4], 1 on [pi + 3 gamma/4, inf).
double smooth_step_eval(double gamma, double x);
double smooth_step_deriv(double gamma, double x);

/// Folds x onto [pi/2, inf) through the mirror x -> pi - x.
inline double fold_half_pi(double x) { return kHalfPi + std::abs(x - kHalfPi); }

// ---------------------------------------------------------------------------

struct AlphaSelection {
  double alpha = 0.0;
  // Normalized slacks over the grid with x = 0 excluded (all three hold with
  // equality there):
  //   1 - |sin x - x| / |x|^3,   |sin x| / |x| - 3/4,   2 - |tan x| / |x|.
  double cubic_margin = 0.0;
  double sine_margin = 0.0;
  double tangent_margin = 0.0;
  std::size_t grid_points = 0;
};

inline constexpr double kDefaultAlpha = 0.07;
inline constexpr double kDefaultExtensionC = 2.0;

double alpha_upper_bound();  // 1 / (4 pi)

/// Verifies the three small-angle inequalities for the default alpha on a
/// symmetric grid of [-alpha, alpha].
AlphaSelection select_alpha(std::size_t grid_points = 100001);

/// Samples of the arc s in [-beta, pi + beta] along which the closure of the
/// domain is swept: radius e^{s/2} in z, disc centre e^{is}, disc radius sqrt(S).
struct ArcSamples {
  std::vector<double> s;
  std::vector<double> z_radius;
  std::vector<double> cos_s;
  std::vector<double> sin_s;
  std::vector<double> disc_radius;
};

/// The concave C^{1,1} radius profile. Equal to 1 on [0, pi], equal to
/// (cos(x - pi) - g(x - pi))^2 on [pi, pi + alpha], continued past pi + alpha
/// by blending its curvature into the constant -extension_c; symmetric about
/// pi/2. Cheap to copy.
class ProfileS {
 public:
  double alpha() const;
  double beta() const;
  double extension_c() const;
  double blend_width() const;

  double eval(double x) const;
  double deriv(double x) const;
  /// Almost-everywhere second derivative (jumps at 0 and pi).
  double second(double x) const;
  /// sqrt(max(S(x), 0)).
  double sqrt_eval(double x) const;

  const ArcSamples& arc_samples() const;

  struct Tables;

 private:
  friend ProfileS build_profile(double, double, double);
  explicit ProfileS(std::shared_ptr<const Tables> t) : t_(std::move(t)) {}
  std::shared_ptr<const Tables> t_;
};

/// Default arc sample count used by the distance oracle.
inline constexpr std::size_t kArcSampleCount = 20000;

/// Builds and validates the profile. blend_width <= 0 selects alpha / 2.
/// Throws ParameterError when beta >= pi/2 or the concavity grid check fails.
ProfileS build_profile(double alpha = kDefaultAlpha,
                       double extension_c = kDefaultExtensionC,
                       double blend_width = 0.0);

struct ProfileChecks {
  double concavity_max = 0.0;  // max second divided difference, h = 1e-3
  double concavity_argmax = 0.0;
  double root_residual = 0.0;   // |S(pi + beta)|
  double slope_at_root = 0.0;   // S'(pi + beta)
  double junction_slope_jump = 0.0;  // one-sided slopes at pi (and 0)
  double junction_curvature = 0.0;   // max |one-sided S''| at the junctions
  double max_value = 0.0;            // sup S on the grid
  bool ok() const;
};

ProfileChecks check_profile(const ProfileS& p, double h = 1e-3);

/// eps_0 = 0.9 * min{1 - sqrt(S(pi + alpha)), g(alpha)}.
double epsilon0(const ProfileS& p);

// ---------------------------------------------------------------------------

/// Smooth concave over-approximation
///   S_eta(x) = 1 + eta + \int_{pi/2}^{fold(x)} S'(t) Phi_gamma(t) dt.
class SmoothedProfile {
 public:
  double eta() const;
  double gamma() const;
  double x_eta() const;
  double beta_eta() const;
  double quadrature_tol() const;
  const ProfileS& base() const;

  double eval(double x) const;
  double deriv(double x) const;
  double second(double x) const;

  struct Tables;

 private:
  friend SmoothedProfile construct_smoothed(const ProfileS&, double, double,
                                            double);
  explicit SmoothedProfile(std::shared_ptr<const Tables> t)
      : t_(std::move(t)) {}
  std::shared_ptr<const Tables> t_;
};

inline constexpr double kSmoothingQuadratureTol = 1e-11;
inline constexpr double kGammaFloor = 1e-6;

/// Builds S_eta for an explicit mollifier width and locates x_eta and beta_eta.
/// No invariant validation.
SmoothedProfile construct_smoothed(const ProfileS& p, double eta, double gamma,
                                   double quadrature_tol = kSmoothingQuadratureTol);

struct SmoothedChecks {
  double sandwich_margin = 0.0;   // min of S_eta - S - eta/2 and S + 3eta/2 - S_eta
  double sandwich_argmin = 0.0;
  double flat_defect = 0.0;       // max |S_eta - (1 + eta)| on [0, pi]
  double factor100_margin = 0.0;  // min of -S_eta'' - 100 |S_eta'| on [pi/2, x_eta]
  double factor100_argmin = 0.0;
  double concavity_max = 0.0;     // max second divided difference, h = 1e-3
  double x_eta_residual = 0.0;    // |S_eta(x_eta) - 1|
  double beta_eta_residual = 0.0; // |S_eta(pi + beta_eta)|
  double slope_at_beta_eta = 0.0;
  double max_value_excess = 0.0;  // sup (S_eta - (1 + eta))
  std::size_t grid_points = 0;

  bool ok() const;
  /// First failing invariant, empty when ok().
  std::string failure() const;
};

SmoothedChecks check_smoothed(const SmoothedProfile& sp,
                              std::size_t grid_points = 10000);

/// Searches gamma = (alpha/2) 2^{-k} downward until every S_eta invariant
/// validates. Throws ParameterError("eta too large for factor-100 property")
/// when the search reaches kGammaFloor.
SmoothedProfile build_smoothed(const ProfileS& p, double eta,
                               std::size_t grid_points = 10000);

/// Same as build_smoothed for a fixed gamma; throws on any invariant failure.
SmoothedProfile build_smoothed_with_gamma(const ProfileS& p, double eta,
                                          double gamma,
                                          std::size_t grid_points = 10000);

}  // namespace worm
