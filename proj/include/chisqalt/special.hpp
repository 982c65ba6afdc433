#ifndef CHISQALT_SPECIAL_HPP
#define CHISQALT_SPECIAL_HPP

#include <functional>

namespace chisqalt::special {

/// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

double log_beta(double a, double b);

/// Standard normal cdf and its inverse.
double norm_cdf(double z);
double norm_quantile(double p);

/// Invert a nondecreasing function on [lo, hi] to 1e-10 relative tolerance.
/// `lo`/`hi` may be infinite; the bracket is grown geometrically first.
double invert_monotone(const std::function<double(double)>& fn, double target,
                       double lo, double hi);

}  // namespace chisqalt::special

#endif  // CHISQALT_SPECIAL_HPP
