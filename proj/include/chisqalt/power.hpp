#ifndef CHISQALT_POWER_HPP
#define CHISQALT_POWER_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chisqalt/rg_test.hpp"

namespace chisqalt {

enum class Method { RG, EqualSize, EqualProb, Histogram, KS, AD, ZK, ZA, ZC };

inline constexpr std::array<Method, 9> kAllMethods = {
    Method::RG, Method::EqualSize, Method::EqualProb, Method::Histogram,
    Method::KS, Method::AD,        Method::ZK,        Method::ZA,
    Method::ZC};

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);
bool method_is_edf(Method m);

struct PowerResult {
  double power = 0.0;
  double se = 0.0;  // sqrt(p(1-p)/B)
  long replicates = 0;
  long failures = 0;
};

struct PowerRow {
  std::string study;
  double param = 0.0;
  std::string method;
  double power = 0.0;
  double se = 0.0;
  int B = 0;
  double n = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

struct PowerTable {
  std::vector<PowerRow> rows;
};

/// CSV columns: study,param,method,power,se,B,n,alpha,seed
void write_power_csv(std::ostream& out, const PowerTable& table);

/// Multinomial fast path for a simple null: replicate counts are drawn from
/// multinomial(n, p1) directly and the statistic is compared against the
/// chi-square critical value with k-1 degrees of freedom.
PowerResult power_fast(const Distribution& f0, const Distribution& f1,
                       const BinningScheme& scheme, StatisticKind kind, double n,
                       double alpha, int B, std::uint64_t seed);

/// Full per-replicate pipeline (sampling, estimation for composite nulls,
/// test) for one method. RG scheme selection runs once, outside the loop.
PowerResult power_full(Method method, const DistributionSpec& null_spec,
                       const Distribution& f1, double n_or_lambda, bool poisson,
                       double alpha, int B, int B_inner, std::uint64_t seed,
                       const std::optional<SelectionGrid>& rg_grid = std::nullopt);

/// One Monte Carlo cell evaluated for several methods at once. All methods
/// see the same replicate data; per-method results are bitwise identical to
/// running the method alone with the same seed.
std::map<Method, PowerResult> run_power_cell(const DistributionSpec& null_spec,
                                             const Distribution& f1,
                                             const std::vector<Method>& methods,
                                             double n_or_lambda, bool poisson,
                                             double alpha, int B, int B_inner,
                                             std::uint64_t seed,
                                             const std::optional<SelectionGrid>& rg_grid =
                                                 std::nullopt);

/// A method-comparison study over a grid of alternatives.
struct StudySpec {
  std::string name;
  DistributionSpec null_spec;
  std::vector<std::pair<double, Distribution>> alternatives;  // param -> F1
  std::vector<DistributionSpec> per_param_nulls;  // optional: one null per alternative
  std::vector<Method> methods;
  double n = 1000.0;  // lambda when poisson
  bool poisson = false;
  double alpha = 0.05;
  int B = 1000;
  int B_inner = 500;
  std::uint64_t seed = 20240101;
};

/// Power per (alternative, method) plus "<name>-mean" summary rows holding
/// each method's mean power over the grid.
PowerTable power_curve(const StudySpec& study);

/// RG type-I error rates: each null is paired with itself as the alternative
/// (composite nulls use their reference member to generate data).
PowerTable type1_table(const std::vector<std::pair<std::string, DistributionSpec>>& nulls,
                       const std::vector<double>& alphas, double n, int B,
                       std::uint64_t seed);

/// Reference member of a family: free parameters at their family defaults.
Distribution reference_member(const DistributionSpec& spec);

}  // namespace chisqalt

#endif  // CHISQALT_POWER_HPP
