#pragma once

#include <functional>
#include <string_view>

#include "worm/geometry.hpp"

namespace worm {

// Levi forms of the two local defining functions of D, evaluated in the
// complex tangent direction (-df/dw, df/dz) (never normalized). The Hessian
// convention is L = sum_{j,k} d^2 f / dz_j dzbar_k v_j conj(v_k).

enum class LeviCase { disc_le1, disc_gt1, halfplane };

std::string_view to_string(LeviCase c);

struct LeviSample {
  PointCW point;
  double value = 0.0;   // closed-form Levi value
  double defect = 0.0;  // |closed form - finite differences|
  LeviCase case_tag = LeviCase::halfplane;
};

/// (1 - delta)^2 Re((w + i delta_tilde) e^{-i gamma}) / (4 |z|^2), i.e.
/// (1 - delta)^2 (t - r) / (4 |z|^2) for r = t - Re(...).
double levi_halfplane(const RotationParams& rp, const PointCW& pt);

/// |z|^2 L / (1 - delta)^2 for the rotating-disc defining function:
///   S (-S'' + 2 Re X) - 2 S' Re(i X) + S'^2,  X = (w + i delta_tilde) e^{-i gamma},
/// with S = S_eta and derivatives taken at gamma(z).
double levi_disc_normalized(const RotationParams& rp, const SmoothedProfile& sp,
                            const PointCW& pt);

/// L(z, w) itself.
double levi_disc(const RotationParams& rp, const SmoothedProfile& sp,
                 const PointCW& pt);

struct DiscDecomposition {
  double s_val = 0.0;  // S_eta(gamma(z))
  double theta = 0.0;  // X = 1 + sqrt(s_val) e^{i theta}
  LeviCase case_tag = LeviCase::disc_le1;
};

inline constexpr double kBoundaryTolerance = 1e-9;

/// Requires |rho_{delta,eta}(pt)| <= kBoundaryTolerance.
DiscDecomposition levi_disc_decompose(const RotationParams& rp,
                                      const SmoothedProfile& sp,
                                      const PointCW& pt);

enum class DefiningFunction { halfplane, disc };

/// Levi value of an arbitrary real function from central-difference
/// gradient and complex Hessian with step h.
double levi_finite_difference(const std::function<double(const PointCW&)>& f,
                              const PointCW& pt, double h);

/// Finite-difference Levi value of the chosen defining function; h must lie
/// in [1e-6, 1e-3]. With `richardson`, combines steps h and h/2 to cancel the
/// O(h^2) truncation term.
double levi_fd_check(DefiningFunction which, const RotationParams& rp,
                     const SmoothedProfile& sp, const PointCW& pt,
                     double h = 1e-4, bool richardson = false);

}  // namespace worm
