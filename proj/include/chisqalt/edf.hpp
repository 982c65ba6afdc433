#ifndef CHISQALT_EDF_HPP
#define CHISQALT_EDF_HPP

#include <array>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "chisqalt/spec_parser.hpp"

namespace chisqalt {

enum class EdfKind { KS, AD, ZK, ZA, ZC };

inline constexpr std::array<EdfKind, 5> kAllEdfKinds = {EdfKind::KS, EdfKind::AD,
                                                        EdfKind::ZK, EdfKind::ZA,
                                                        EdfKind::ZC};

std::string_view edf_name(EdfKind kind);
std::optional<EdfKind> edf_from_name(std::string_view name);

/// Statistic from the probability-integral transforms of a sorted sample
/// (u_i = F(x_(i)), clamped to [1e-12, 1-1e-12]).
double edf_statistic_from_u(EdfKind kind, const Eigen::ArrayXd& u_sorted);

/// Statistic of unbinned data under the distribution F.
double edf_statistic(EdfKind kind, const Eigen::ArrayXd& data, const Distribution& f);

enum class SampleSizeMode { Fixed, PoissonSize };

struct SimulatedPValue {
  double statistic = 0.0;
  double pvalue = 1.0;
  Eigen::ArrayXd theta;  // MLE fit for composite nulls, empty otherwise
};

/// Monte Carlo p-value: B replicates from the (fitted) null, refitting by
/// unbinned maximum likelihood on every replicate for composite nulls;
/// pvalue = (1 + #{replicate >= observed}) / (B + 1). In Poisson mode each
/// replicate draws its size from Poisson(lambda).
SimulatedPValue simulated_pvalue(EdfKind kind, const Eigen::ArrayXd& data,
                                 const DistributionSpec& null_spec, int B,
                                 RngStream& stream,
                                 SampleSizeMode mode = SampleSizeMode::Fixed,
                                 double lambda = 0.0);

}  // namespace chisqalt

#endif  // CHISQALT_EDF_HPP
