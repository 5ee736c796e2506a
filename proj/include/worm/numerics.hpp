#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace worm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point outside the (C \ {0}) x C chart on which the defining functions live.
class OffChartError : public Error {
 public:
  OffChartError() : Error("off chart: z = 0") {}
};

/// Invalid parameter passed to a construction or certification routine.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// ---------------------------------------------------------------------------
// The flat function g(x) = exp(-1/x) for x > 0, 0 otherwise, and the smooth
// monotone step built from it.

double flat_g(double x);
double flat_g_deriv(double x);
double flat_g_second(double x);

/// sigma(u) = g(u) / (g(u) + g(width - u)); 0 for u <= 0, 1 for u >= width.
double unit_step(double u, double width);
double unit_step_deriv(double u, double width);
double unit_step_second(double u, double width);

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Simpson with Richardson correction. Throws QuadratureError when
/// the recursion depth is exhausted before `tol` is met.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double tol,
                                  int max_depth = 48);

/// Fixed 8-point Gauss-Legendre rule on [a, b].
double gauss_legendre8(const std::function<double(double)>& f, double a,
                       double b);

/// Running integral x -> \int_a^x f on [a, b]. Knot values come from adaptive
/// Simpson; the partial segment up to x uses an 8-point Gauss-Legendre rule,
/// which keeps the result a smooth function of x.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> f, double a, double b,
                     std::size_t segments, double tol);

  double operator()(double x) const;
  double total() const { return knots_.empty() ? 0.0 : knots_.back(); }
  double lower() const { return a_; }
  double upper() const { return b_; }
  double achieved_error() const { return error_; }

 private:
  std::function<double(double)> f_;
  double a_ = 0.0;
  double b_ = 0.0;
  double h_ = 0.0;
  std::vector<double> knots_;
  double error_ = 0.0;
};

// ---------------------------------------------------------------------------
// One-dimensional root finding and minimization

/// Bisection on a sign change in [lo, hi] down to `abs_tol`.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double abs_tol = 1e-12);

struct Bracket {
  double lo;
  double hi;
};

/// Walks right from `start` with doubling steps until f changes sign.
Bracket bracket_by_doubling(const std::function<double(double)>& f,
                            double start, double first_step, double limit);

struct MinimizeResult {
  double x;
  double value;
};

MinimizeResult golden_section_min(const std::function<double(double)>& f,
                                  double a, double b, double tol = 1e-10);

}  // namespace worm
