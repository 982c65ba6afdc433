#include "chisqalt/statistics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chisqalt/special.hpp"

namespace chisqalt {

std::string_view statistic_name(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::Pearson: return "pearson";
    case StatisticKind::FreemanTukey: return "freeman-tukey";
    case StatisticKind::LambdaP: return "lambda-p";
    case StatisticKind::G2: return "g2";
    case StatisticKind::NeymanModified: return "neyman-modified";
    case StatisticKind::CR23: return "cr23";
  }
  return "?";
}

std::optional<StatisticKind> statistic_from_name(std::string_view name) {
  for (StatisticKind k : kAllStatisticKinds)
    if (name == statistic_name(k)) return k;
  return std::nullopt;
}

namespace {

void check_inputs(const Eigen::Ref<const Eigen::ArrayXd>& o,
                  const Eigen::Ref<const Eigen::ArrayXd>& e) {
  if (o.size() != e.size() || o.size() < 2)
    throw std::invalid_argument("chisq_stat: need matching vectors of length >= 2");
  if (!(e > 0.0).all()) throw std::invalid_argument("chisq_stat: expected counts must be > 0");
}

// sum of O*log(O/E) with the 0*log(0)=0 convention
double o_log_ratio_sum(const Eigen::Ref<const Eigen::ArrayXd>& o,
                       const Eigen::Ref<const Eigen::ArrayXd>& e) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < o.size(); ++i)
    if (o[i] > 0.0) acc += o[i] * std::log(o[i] / e[i]);
  return acc;
}

}  // namespace

double chisq_stat(StatisticKind kind, const Eigen::Ref<const Eigen::ArrayXd>& o,
                  const Eigen::Ref<const Eigen::ArrayXd>& e) {
  check_inputs(o, e);
  switch (kind) {
    case StatisticKind::Pearson:
      return ((o - e).square() / e).sum();
    case StatisticKind::FreemanTukey:
      return 4.0 * (o.sqrt() - e.sqrt()).square().sum();
    case StatisticKind::LambdaP:
      return 2.0 * ((e - o).sum() + o_log_ratio_sum(o, e));
    case StatisticKind::G2:
      return 2.0 * o_log_ratio_sum(o, e);
    case StatisticKind::NeymanModified:
      if ((o <= 0.0).any())
        throw std::invalid_argument(
            "neyman-modified is undefined for zero observed counts; "
            "choose another statistic or merge bins");
      return (e.square() / o - o).sum();
    case StatisticKind::CR23:
      return cressie_read(2.0 / 3.0, o, e);
  }
  return 0.0;
}

double cressie_read(double lambda, const Eigen::Ref<const Eigen::ArrayXd>& o,
                    const Eigen::Ref<const Eigen::ArrayXd>& e) {
  check_inputs(o, e);
  if (lambda == 0.0 || lambda == -1.0)
    throw std::invalid_argument("cressie_read: lambda in {0,-1} is a G2-type limit");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < o.size(); ++i) {
    if (o[i] > 0.0) {
      acc += o[i] * (std::pow(o[i] / e[i], lambda) - 1.0);
    } else if (lambda < 0.0) {
      throw std::invalid_argument("cressie_read: zero observed count with negative lambda");
    }
  }
  return 2.0 / (lambda * (lambda + 1.0)) * acc;
}

double chisq_cdf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chisq_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return special::reg_lower_gamma(df / 2.0, x / 2.0);
}

double chisq_quantile(double q, int df) {
  if (df < 1) throw std::invalid_argument("chisq_quantile: df must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("chisq_quantile: q outside (0,1)");
  return special::invert_monotone([df](double x) { return chisq_cdf(x, df); }, q, 0.0,
                                  std::numeric_limits<double>::infinity());
}

TestOutcome make_outcome(double value, int df) {
  double v = std::max(value, 0.0);
  return TestOutcome{v, df, 1.0 - chisq_cdf(v, df)};
}

}  // namespace chisqalt
