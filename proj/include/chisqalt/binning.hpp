#ifndef CHISQALT_BINNING_HPP
#define CHISQALT_BINNING_HPP

#include <iosfwd>

#include <Eigen/Dense>

#include "chisqalt/distribution.hpp"

namespace chisqalt {

/// A binning of the real line for a chi-square test: k bins delimited by k+1
/// strictly increasing edges (outer edges may be infinite) and the bin
/// probabilities under the null.
struct BinningScheme {
  int k = 0;
  double kappa = 0.0;
  Eigen::ArrayXd edges;
  Eigen::ArrayXd null_probs;
};

/// Pre-binned observations: contiguous bins and their counts.
struct BinnedData {
  Eigen::ArrayXd edges;   // length = #bins + 1
  Eigen::ArrayXd counts;  // nonnegative integers
};

/// Interior edges at the i/k quantiles of f0; outer edges at the support ends.
Eigen::ArrayXd equal_prob_edges(const Distribution& f0, int k);

/// Equal-width bins. On a bounded support the bins split [lower, upper]
/// evenly. If either support end is infinite, interior edges are spaced
/// evenly over the working range [q(tail_eps), q(1-tail_eps)] and the outer
/// edges extend to the support ends.
Eigen::ArrayXd equal_size_edges(const Distribution& f0, int k, double tail_eps = 0.005);

/// Elementwise convex combination (1-kappa)*e0 + kappa*e1. Infinite entries
/// must agree in position and stay infinite.
Eigen::ArrayXd interpolate_edges(const Eigen::ArrayXd& e0, const Eigen::ArrayXd& e1,
                                 double kappa);

/// p_i = F(edges[i+1]) - F(edges[i]).
Eigen::ArrayXd bin_probabilities(const Distribution& f, const Eigen::ArrayXd& edges);

/// Histogram counts with bins [B_i, B_{i+1}) and the last bin closed. Values
/// outside [first, last] are tallied into *out_of_range when provided.
Eigen::ArrayXd bin_counts(const Eigen::ArrayXd& values, const Eigen::ArrayXd& edges,
                          Eigen::Index* out_of_range = nullptr);

/// True iff every expected count n*p_i reaches the threshold.
bool admissible(double n, const Eigen::ArrayXd& null_probs, double threshold = 5.0);

/// The practitioner's histogram binning: `nbins` equal-size bins, then
/// adjacent bins merged left to right until every expected count is at least
/// 5 (a deficient final group is absorbed into its left neighbor).
BinningScheme histogram_scheme(const Distribution& f0, double n, int nbins = 50);

/// Replace each interior ideal edge by the nearest available edge (ties go
/// right); collisions advance to the next unused edge to the right. Outer
/// ideal edges map to the outer available edges.
Eigen::ArrayXd snap_to_data_edges(const Eigen::ArrayXd& ideal,
                                  const Eigen::ArrayXd& available);

/// The kappa-interpolated scheme for f0 with its null probabilities.
BinningScheme make_scheme(const Distribution& f0, int k, double kappa,
                          double tail_eps = 0.005);

/// BinnedData CSV: header `lower,upper,count`, contiguous rows, -inf/inf
/// permitted in the first/last row.
BinnedData read_binned_csv(std::istream& in);
void write_binned_csv(std::ostream& out, const BinnedData& data);

}  // namespace chisqalt

#endif  // CHISQALT_BINNING_HPP
