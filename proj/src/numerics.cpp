#include "worm/numerics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <utility>

namespace worm {

double flat_g(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double flat_g_deriv(double x) {
  const double g = flat_g(x);
  if (g == 0.0) return 0.0;
  return g / (x * x);
}

double flat_g_second(double x) {
  const double g = flat_g(x);
  if (g == 0.0) return 0.0;
  const double x2 = x * x;
  return g * (1.0 - 2.0 * x) / (x2 * x2);
}

namespace {

// sigma = 1 / (1 + e^q) with q = 1/u - 1/(w-u); written this way so that
// narrow steps (where g itself underflows) stay well defined.
struct StepParts {
  double sigma;
  double one_minus;
  double p;        // 1/u^2 + 1/(w-u)^2 = -dq/du
  double p_deriv;  // dp/du
};

StepParts step_parts(double u, double width) {
  const double v = width - u;
  const double q = 1.0 / u - 1.0 / v;
  StepParts s{};
  s.sigma = 1.0 / (1.0 + std::exp(q));
  s.one_minus = 1.0 / (1.0 + std::exp(-q));
  s.p = 1.0 / (u * u) + 1.0 / (v * v);
  s.p_deriv = -2.0 / (u * u * u) + 2.0 / (v * v * v);
  return s;
}

}  // namespace

double unit_step(double u, double width) {
  if (u <= 0.0) return 0.0;
  if (u >= width) return 1.0;
  return step_parts(u, width).sigma;
}

double unit_step_deriv(double u, double width) {
  if (u <= 0.0 || u >= width) return 0.0;
  const StepParts s = step_parts(u, width);
  const double sw = s.sigma * s.one_minus;
  return sw == 0.0 ? 0.0 : sw * s.p;
}

double unit_step_second(double u, double width) {
  if (u <= 0.0 || u >= width) return 0.0;
  const StepParts s = step_parts(u, width);
  const double sw = s.sigma * s.one_minus;
  if (sw == 0.0) return 0.0;
  const double d1 = sw * s.p;
  return d1 * (s.one_minus - s.sigma) * s.p + sw * s.p_deriv;
}

// ---------------------------------------------------------------------------

namespace {

struct SimpsonNode {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

QuadratureResult simpson_recurse(const std::function<double(double)>& f,
                                 const SimpsonNode& n, double tol, int depth) {
  const double lm = 0.5 * (n.a + n.m);
  const double rm = 0.5 * (n.m + n.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(n.fa, flm, n.fm, n.a, n.m);
  const double right = simpson(n.fm, frm, n.fb, n.m, n.b);
  const double diff = left + right - n.whole;
  if (std::abs(diff) <= 15.0 * tol) {
    return {left + right + diff / 15.0, std::abs(diff) / 15.0};
  }
  if (depth <= 0) {
    throw QuadratureError("adaptive Simpson: recursion depth exhausted",
                          std::abs(diff) / 15.0);
  }
  const QuadratureResult l = simpson_recurse(
      f, {n.a, n.fa, lm, flm, n.m, n.fm, left}, 0.5 * tol, depth - 1);
  const QuadratureResult r = simpson_recurse(
      f, {n.m, n.fm, rm, frm, n.b, n.fb, right}, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error_estimate + r.error_estimate};
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double tol,
                                  int max_depth) {
  if (a == b) return {0.0, 0.0};
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const SimpsonNode root{a, fa, m, fm, b, fb, simpson(fa, fm, fb, a, b)};
  return simpson_recurse(f, root, tol, max_depth);
}

double gauss_legendre8(const std::function<double(double)>& f, double a,
                       double b) {
  static constexpr std::array<double, 4> kNodes = {
      0.1834346424956498049394761, 0.5255324099163289858177390,
      0.7966664774136267395915539, 0.9602898564975362316835609};
  static constexpr std::array<double, 4> kWeights = {
      0.3626837833783619829651504, 0.3137066458778872873379622,
      0.2223810344533744705443560, 0.1012285362903762591525314};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i) {
    const double dx = half * kNodes[i];
    sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return half * sum;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f,
                                       double a, double b,
                                       std::size_t segments, double tol)
    : f_(std::move(f)), a_(a), b_(b) {
  if (!(b > a) || segments == 0) {
    throw ParameterError("CumulativeIntegral: empty interval");
  }
  h_ = (b - a) / static_cast<double>(segments);
  knots_.resize(segments + 1);
  knots_[0] = 0.0;
  const double seg_tol = tol / static_cast<double>(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    const double lo = a + h_ * static_cast<double>(i);
    const double hi = (i + 1 == segments) ? b : lo + h_;
    const QuadratureResult r = adaptive_simpson(f_, lo, hi, seg_tol);
    knots_[i + 1] = knots_[i] + r.value;
    error_ += r.error_estimate;
  }
}

double CumulativeIntegral::operator()(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return total();
  const auto last = knots_.size() - 2;
  const auto i = std::min(static_cast<std::size_t>((x - a_) / h_), last);
  const double lo = a_ + h_ * static_cast<double>(i);
  if (x <= lo) return knots_[i];
  return knots_[i] + gauss_legendre8(f_, lo, x);
}

// ---------------------------------------------------------------------------

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double abs_tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw ParameterError("bisect_root: no sign change in bracket");
  }
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Bracket bracket_by_doubling(const std::function<double(double)>& f,
                            double start, double first_step, double limit) {
  const bool start_positive = f(start) > 0.0;
  double lo = start;
  double step = first_step;
  while (lo < limit) {
    const double hi = std::min(lo + step, limit);
    if ((f(hi) > 0.0) != start_positive) return {lo, hi};
    lo = hi;
    step *= 2.0;
  }
  throw ParameterError("bracket_by_doubling: no sign change before limit");
}

MinimizeResult golden_section_min(const std::function<double(double)>& f,
                                  double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fx <= fc && fx <= fd) return {x, fx};
  return fc <= fd ? MinimizeResult{c, fc} : MinimizeResult{d, fd};
}

}  // namespace worm
