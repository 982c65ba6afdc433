#ifndef CHISQALT_ESTIMATION_HPP
#define CHISQALT_ESTIMATION_HPP

#include <functional>

#include <Eigen/Dense>

#include "chisqalt/spec_parser.hpp"
#include "chisqalt/statistics.hpp"

namespace chisqalt {

struct FitResult {
  Eigen::ArrayXd theta;
  double objective = 0.0;  // statistic value or negative log-likelihood
  bool converged = false;
  long evaluations = 0;
  bool floored = false;  // a bin probability hit the 1e-12 floor at the optimum
};

struct NelderMeadOptions {
  double tol = 1e-8;       // spread of objective values over the simplex
  int max_iterations = 0;  // 0 -> 500 * dimension
  double step = 0.5;       // initial simplex extent
};

struct NelderMeadResult {
  Eigen::ArrayXd x;
  double value = 0.0;
  bool converged = false;
  long evaluations = 0;
};

/// Derivative-free simplex descent. `fn` may return +inf for invalid points.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::ArrayXd&)>& fn,
                             const Eigen::ArrayXd& start,
                             const NelderMeadOptions& options = {});

/// Fit the family's free parameters by minimizing the chi-square statistic of
/// `counts` against expected counts n*p(theta) on the given edges. Runs in
/// the unconstrained transform with the given start plus 4 perturbed
/// restarts; returns the best fit. `expected_total` overrides n = sum(counts)
/// (Poisson sample-size mode uses the rate lambda).
FitResult minimum_chisq(const DistributionSpec& family, const Eigen::ArrayXd& counts,
                        const Eigen::ArrayXd& edges, StatisticKind kind,
                        const Eigen::ArrayXd& start, double expected_total = 0.0);

/// Maximize sum O_i log p_i(theta) over the same search space.
FitResult binned_mle(const DistributionSpec& family, const Eigen::ArrayXd& counts,
                     const Eigen::ArrayXd& edges, const Eigen::ArrayXd& start);

/// Maximize the unbinned log-likelihood. Normal and exponential atoms with
/// all parameters free use their closed-form estimators.
FitResult unbinned_mle(const DistributionSpec& family, const Eigen::ArrayXd& data,
                       const Eigen::ArrayXd& start);
FitResult unbinned_mle(const DistributionSpec& family, const Eigen::ArrayXd& data);

/// Moment-matching starting values; always inside the parameter domain.
Eigen::ArrayXd default_start(const DistributionSpec& family, const Eigen::ArrayXd& data);
Eigen::ArrayXd default_start_binned(const DistributionSpec& family,
                                    const Eigen::ArrayXd& counts,
                                    const Eigen::ArrayXd& edges);

}  // namespace chisqalt

#endif  // CHISQALT_ESTIMATION_HPP
