#ifndef CHISQALT_SELECTION_HPP
#define CHISQALT_SELECTION_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "chisqalt/binning.hpp"
#include "chisqalt/spec_parser.hpp"
#include "chisqalt/statistics.hpp"

namespace chisqalt {

struct SelectionGrid {
  std::vector<int> k_values;
  std::vector<double> kappa_values;
  std::vector<StatisticKind> kinds;

  /// k from p+2 to floor(2*(1+log2 n)) (also capped at floor(n/5)),
  /// kappa in {0, 0.25, 0.5, 0.75, 1}, all six statistics.
  static SelectionGrid defaults(int p, double n);
};

struct GridEntry {
  int k = 0;
  double kappa = 0.0;
  StatisticKind kind = StatisticKind::Pearson;
  double merit = 0.0;
  bool admissible = false;
};

/// The winner of the merit search plus the full grid for reporting.
struct SchemeChoice {
  BinningScheme scheme;
  StatisticKind kind = StatisticKind::Pearson;
  double merit = 0.0;
  Eigen::ArrayXd theta;      // minimum-chisq fit on the perfect counts; empty for simple nulls
  Eigen::ArrayXd theta_ref;  // reference fit that anchored the edges (composite nulls)
  std::vector<GridEntry> grid_report;
};

/// The n quantiles of f1 at (i - 0.5)/n, i = 1..n, in increasing order.
Eigen::ArrayXd perfect_sample(const Distribution& f1, Eigen::Index n);

/// Figure of merit: the statistic of the perfect data set under the scheme,
/// divided by the 95% chi-square critical value with k-1-p degrees of
/// freedom. Composite nulls are refitted by minimum chi-square on the
/// perfect counts. Throws if the scheme is inadmissible.
double merit(const DistributionSpec& null_spec, const Distribution& f1, double n,
             const BinningScheme& scheme, StatisticKind kind);

/// Search the grid for the (k, kappa, statistic) maximizing the merit.
/// Ties break to smaller k, then smaller kappa, then statistic listing order.
SchemeChoice select_scheme(const DistributionSpec& null_spec, const Distribution& f1,
                           double n, const SelectionGrid& grid);
SchemeChoice select_scheme(const DistributionSpec& null_spec, const Distribution& f1,
                           double n);

void write_grid_csv(std::ostream& out, const std::vector<GridEntry>& grid);

}  // namespace chisqalt

#endif  // CHISQALT_SELECTION_HPP
