#ifndef CHISQALT_STATISTICS_HPP
#define CHISQALT_STATISTICS_HPP

#include <array>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace chisqalt {

/// The six chi-square statistic formulas, in listing order (used for
/// deterministic tie-breaking).
enum class StatisticKind { Pearson, FreemanTukey, LambdaP, G2, NeymanModified, CR23 };

inline constexpr std::array<StatisticKind, 6> kAllStatisticKinds = {
    StatisticKind::Pearson,       StatisticKind::FreemanTukey,
    StatisticKind::LambdaP,       StatisticKind::G2,
    StatisticKind::NeymanModified, StatisticKind::CR23};

std::string_view statistic_name(StatisticKind kind);
std::optional<StatisticKind> statistic_from_name(std::string_view name);

/// Evaluate one statistic for observed counts against expected counts.
/// Expected counts must be positive; NeymanModified additionally requires all
/// observed counts positive and throws otherwise. Terms with O=0 follow the
/// conventions 0*log(0) = 0 and 0*(0^(2/3)) = 0.
double chisq_stat(StatisticKind kind, const Eigen::Ref<const Eigen::ArrayXd>& observed,
                  const Eigen::Ref<const Eigen::ArrayXd>& expected);

/// The Cressie-Read power-divergence statistic
///   2/(lambda*(lambda+1)) * sum O * ((O/E)^lambda - 1).
/// lambda in {0, -1} (the G2-type limits) is rejected; use chisq_stat.
double cressie_read(double lambda, const Eigen::Ref<const Eigen::ArrayXd>& observed,
                    const Eigen::Ref<const Eigen::ArrayXd>& expected);

/// Chi-square distribution function P(df/2, x/2) and its inverse.
double chisq_cdf(double x, int df);
double chisq_quantile(double q, int df);

struct TestOutcome {
  double value;   // clamped at 0
  int df;
  double pvalue;  // 1 - chisq_cdf(value, df)
};

TestOutcome make_outcome(double value, int df);

}  // namespace chisqalt

#endif  // CHISQALT_STATISTICS_HPP
