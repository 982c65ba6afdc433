#ifndef CHISQALT_RG_TEST_HPP
#define CHISQALT_RG_TEST_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "chisqalt/selection.hpp"

namespace chisqalt {

struct TestReport {
  BinningScheme scheme;
  StatisticKind kind = StatisticKind::Pearson;
  Eigen::ArrayXd theta;  // fitted parameters, empty for a simple null
  double statistic = 0.0;
  int df = 0;
  double pvalue = 1.0;
  double alpha = 0.05;
  bool reject = false;

  // diagnostics
  Eigen::ArrayXd counts;
  Eigen::ArrayXd expected;
  Eigen::Index out_of_range = 0;
  bool fallback_used = false;  // zero data count forced a non-Neyman statistic
  double selection_merit = 0.0;
  std::size_t grid_entries = 0;
  bool poisson_mode = false;
  double lambda = 0.0;
};

/// The full RG test: scheme selection against the declared alternative,
/// parameter estimation by minimum chi-square for composite nulls, statistic
/// and p-value. The scheme depends only on (null, f1, n), never on the data.
TestReport rg_test(const Eigen::ArrayXd& data, const DistributionSpec& null_spec,
                   const Distribution& f1, double alpha = 0.05,
                   const std::optional<SelectionGrid>& grid = std::nullopt);

/// RG test on already-binned data: the ideal scheme is snapped to the
/// closest combination of the data bins before testing.
TestReport rg_test_prebinned(const BinnedData& binned, const DistributionSpec& null_spec,
                             const Distribution& f1, double alpha = 0.05,
                             const std::optional<SelectionGrid>& grid = std::nullopt);

/// RG test when the sample size is Poisson with known rate lambda: expected
/// counts lambda*p_i, statistic restricted to Pearson / lambda-p, and k-p
/// degrees of freedom.
TestReport rg_test_poisson(const Eigen::ArrayXd& data, double lambda,
                           const DistributionSpec& null_spec, const Distribution& f1,
                           double alpha = 0.05,
                           const std::optional<SelectionGrid>& grid = std::nullopt);

/// Versioned JSON form of a report (stable field set, schema_version 1).
std::string report_to_json(const TestReport& report);

}  // namespace chisqalt

#endif  // CHISQALT_RG_TEST_HPP
