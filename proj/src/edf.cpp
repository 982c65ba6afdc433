#include "chisqalt/edf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chisqalt/estimation.hpp"

namespace chisqalt {

std::string_view edf_name(EdfKind kind) {
  switch (kind) {
    case EdfKind::KS: return "ks";
    case EdfKind::AD: return "ad";
    case EdfKind::ZK: return "zk";
    case EdfKind::ZA: return "za";
    case EdfKind::ZC: return "zc";
  }
  return "?";
}

std::optional<EdfKind> edf_from_name(std::string_view name) {
  for (EdfKind k : kAllEdfKinds)
    if (name == edf_name(k)) return k;
  return std::nullopt;
}

double edf_statistic_from_u(EdfKind kind, const Eigen::ArrayXd& u) {
  const Eigen::Index n = u.size();
  if (n < 1) throw std::invalid_argument("edf_statistic: empty sample");
  const double dn = static_cast<double>(n);
  switch (kind) {
    case EdfKind::KS: {
      double d = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / dn - u[i];
        const double lo = u[i] - static_cast<double>(i) / dn;
        d = std::max({d, hi, lo});
      }
      return d;
    }
    case EdfKind::AD: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        acc += (2.0 * static_cast<double>(i) + 1.0) *
               (std::log(u[i]) + std::log1p(-u[n - 1 - i]));
      return -dn - acc / dn;
    }
    case EdfKind::ZK: {
      double z = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) + 0.5;       // i - 0.5, 1-based
        const double b = dn - static_cast<double>(i) - 0.5;  // n - i + 0.5
        z = std::max(z, a * std::log(a / (dn * u[i])) + b * std::log(b / (dn * (1.0 - u[i]))));
      }
      return std::max(z, 0.0);
    }
    case EdfKind::ZA: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) + 0.5;
        const double b = dn - static_cast<double>(i) - 0.5;
        acc += std::log(u[i]) / b + std::log1p(-u[i]) / a;
      }
      return -acc;
    }
    case EdfKind::ZC: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = (dn - 0.5) / (static_cast<double>(i) + 0.25) - 1.0;
        const double t = std::log((1.0 / u[i] - 1.0) / denom);
        acc += t * t;
      }
      return acc;
    }
  }
  return 0.0;
}

double edf_statistic(EdfKind kind, const Eigen::ArrayXd& data, const Distribution& f) {
  const Eigen::Index n = data.size();
  if (n < 1) throw std::invalid_argument("edf_statistic: empty sample");
  Eigen::ArrayXd sorted = data;
  std::sort(sorted.begin(), sorted.end());
  Eigen::ArrayXd u(n);
  for (Eigen::Index i = 0; i < n; ++i)
    u[i] = std::clamp(f.cdf(sorted[i]), 1e-12, 1.0 - 1e-12);
  return edf_statistic_from_u(kind, u);
}

SimulatedPValue simulated_pvalue(EdfKind kind, const Eigen::ArrayXd& data,
                                 const DistributionSpec& null_spec, int B,
                                 RngStream& stream, SampleSizeMode mode, double lambda) {
  if (B < 99) throw std::invalid_argument("simulated_pvalue: need B >= 99");
  if (mode == SampleSizeMode::PoissonSize && !(lambda > 0.0))
    throw std::invalid_argument("simulated_pvalue: Poisson mode needs lambda > 0");
  const Eigen::Index n = data.size();

  SimulatedPValue out;
  Distribution fitted = [&] {
    if (!null_spec.is_composite()) return null_spec.bind();
    out.theta = unbinned_mle(null_spec, data).theta;
    return null_spec.bind(out.theta);
  }();
  out.statistic = edf_statistic(kind, data, fitted);

  long exceed = 0, successes = 0, failures = 0;
  for (int b = 0; b < B; ++b) {
    RngStream sub = stream.substream(static_cast<std::uint64_t>(b));
    try {
      Eigen::Index size =
          mode == SampleSizeMode::PoissonSize ? static_cast<Eigen::Index>(sub.poisson(lambda)) : n;
      if (size < 1) throw std::runtime_error("empty replicate");
      Eigen::ArrayXd replicate = fitted.sample(size, sub);
      Distribution null_b = null_spec.is_composite()
                                ? null_spec.bind(unbinned_mle(null_spec, replicate).theta)
                                : fitted;
      double stat = edf_statistic(kind, replicate, null_b);
      ++successes;
      if (stat >= out.statistic) ++exceed;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  if (failures * 100 > B)
    throw std::runtime_error("simulated_pvalue: estimation failed on " +
                             std::to_string(failures) + "/" + std::to_string(B) +
                             " replicates");
  out.pvalue = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(successes) + 1.0);
  return out;
}

}  // namespace chisqalt
