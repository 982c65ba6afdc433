#include "chisqalt/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/SpecialFunctions>

namespace chisqalt::special {

double reg_lower_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  return Eigen::numext::igamma(a, x);
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return Eigen::numext::betainc(a, b, x);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p outside (0,1)");
  return Eigen::numext::ndtri(p);
}

namespace {

constexpr double kRelTol = 1e-10;

bool converged(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return (b - a) <= kRelTol * scale + 1e-300;
}

}  // namespace

double invert_monotone(const std::function<double(double)>& fn, double target,
                       double lo, double hi) {
  double a = lo;
  double b = hi;

  // Grow infinite ends geometrically until the bracket straddles the target.
  if (std::isinf(a)) {
    double anchor = std::isinf(b) ? 0.0 : b;
    double step = 1.0;
    a = anchor - step;
    while (fn(a) > target) {
      step *= 4.0;
      a = anchor - step;
      if (step > 1e300) throw std::runtime_error("invert_monotone: no lower bracket");
    }
  }
  if (std::isinf(b)) {
    double anchor = a;
    double step = 1.0;
    b = anchor + step;
    while (fn(b) < target) {
      step *= 4.0;
      b = anchor + step;
      if (step > 1e300) throw std::runtime_error("invert_monotone: no upper bracket");
    }
  }

  double fa = fn(a) - target;
  double fb = fn(b) - target;
  if (fa > 0.0 || fb < 0.0) throw std::runtime_error("invert_monotone: bracket does not straddle target");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  // Brent's method.
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = kRelTol * std::max(std::abs(b), 1e-300) + 1e-300;
    double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) break;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;  // bisection
    } else {
      double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc;
        double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = fn(b) - target;
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; e = d = b - a; }
    if (converged(std::min(b, c), std::max(b, c))) break;
  }
  return b;
}

}  // namespace chisqalt::special
