#ifndef CHISQALT_STUDIES_HPP
#define CHISQALT_STUDIES_HPP

#include "chisqalt/power.hpp"

namespace chisqalt {

constexpr std::uint64_t kDefaultSeed = 20240101;

/// The seven null distributions of the type-I error study.
std::vector<std::pair<std::string, DistributionSpec>> table1_nulls();

/// RG type-I error at levels 1%, 5%, 10% for the seven nulls.
PowerTable reproduce_table1(int B, double n, std::uint64_t seed);

/// Two-component normal-mixture null (weight and all four component
/// parameters free) tested with 10 equal-probability bins: type-I error of
/// the chi-square test when the parameters come from unbinned maximum
/// likelihood versus minimum chi-square.
struct MixtureDemoResult {
  double type1_mle = 0.0;
  double type1_minchisq = 0.0;
  long replicates = 0;
  long failures = 0;
};
MixtureDemoResult mixture_estimation_demo(int B, int n, double alpha, std::uint64_t seed);

/// uniform-vs-linear(0.2) power by bin count and sample size (multinomial
/// fast path; param column = k, n column = sample size).
PowerTable bin_count_power_study(const std::vector<int>& k_values,
                                 const std::vector<double>& sample_sizes, double slope,
                                 double alpha, int B, std::uint64_t seed);

/// Merit grid for linear(-0.5) vs the unit-truncated exponential at n=10000
/// over k=2..21, the five kappas, Pearson only.
std::vector<GridEntry> merit_grid_study();

/// Actual powers for the same case over (k, kappa), Pearson (method column
/// carries the kappa label).
PowerTable merit_power_study(int B, std::uint64_t seed);

/// Method-comparison study manifests for the seven power-curve cases.
/// figure in {4,...,10}; B/B_inner scale the replication counts.
StudySpec figure_study(int figure, int B, int B_inner, std::uint64_t seed);

/// Run a named reproduction: table1, fig1..fig10, or mixture-demo.
/// (fig1-fig3 map to the dedicated study functions above.)
PowerTable reproduce(const std::string& name, int B, int B_inner, double n,
                     std::uint64_t seed);

}  // namespace chisqalt

#endif  // CHISQALT_STUDIES_HPP
