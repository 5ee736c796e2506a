#pragma once

#include <complex>
#include <cstddef>

#include "worm/profiles.hpp"

namespace worm {

using cplx = std::complex<double>;

/// A point (z, w) of C^2.
struct PointCW {
  cplx z;
  cplx w;
};

/// Euclidean norm of p - q in C^2 = R^4.
double distance(const PointCW& p, const PointCW& q);

/// Neighbourhood parameters: tube radius epsilon, smoothing eta, rotation
/// tilt delta, half-plane offset t, and the cached centre shift
/// delta_tilde = sin(delta pi / (2 (1 - delta))).
struct RotationParams {
  double epsilon = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  double t = 0.0;
  double delta_tilde = 0.0;

  /// Validates delta in (0, 1), t in [0, 1), epsilon > 0.
  static RotationParams make(double epsilon, double eta, double delta, double t);
  RotationParams with_t(double new_t) const;
};

double delta_tilde_of(double delta);

/// rho(z, w) = |w - e^{i ln|z|^2}|^2 - S(ln|z|^2); negative inside the domain.
double rho_eval(const ProfileS& p, const PointCW& pt);

/// gamma(z) = delta pi / 2 + (1 - delta) ln|z|^2.
double rotation_angle(const RotationParams& rp, cplx z);

/// Re((w + i delta_tilde) e^{-i gamma}) for a given angle, with compensated
/// sums and products so that the result is accurate to a few ulps of itself.
double rotated_real_part(const RotationParams& rp, const PointCW& pt, double gamma);

/// Re((w + i delta_tilde) e^{-i gamma(z)}) - t; positive inside H_t.
double halfplane_margin(const RotationParams& rp, const PointCW& pt);

/// |w + i delta_tilde - e^{i gamma(z)}|^2 - S_eta(gamma(z)).
double rho_delta_eta_eval(const RotationParams& rp, const SmoothedProfile& sp,
                          const PointCW& pt);

/// Membership in D = D^(delta,eta) intersected with H_t. False for z = 0.
bool in_domain_D(const RotationParams& rp, const SmoothedProfile& sp,
                 const PointCW& pt);

struct DistanceOptions {
  std::size_t grid = kArcSampleCount;
  double refine_tol = 1e-10;
  std::size_t refine_candidates = 4;
};

/// Euclidean distance to the closure of the domain. Uses rotational symmetry
/// in z and the closed-form nearest point of each w-disc to reduce to a
/// one-dimensional minimization over the arc parameter s in [-beta, pi+beta].
double distance_to_omega(const ProfileS& p, const PointCW& pt,
                         const DistanceOptions& opts = {});

/// Upper bound on distance_to_omega from a single arc parameter s.
double distance_to_omega_at(const ProfileS& p, const PointCW& pt, double s);

/// True iff pt lies in the open r-neighbourhood of the domain.
bool omega_neighborhood_contains(const ProfileS& p, double r, const PointCW& pt);

/// Real gradient of rho in R^4 coordinates (Re z, Im z, Re w, Im w).
struct Gradient4 {
  double d[4];
  double norm() const;
};

Gradient4 rho_gradient(const ProfileS& p, const PointCW& pt);

}  // namespace worm
