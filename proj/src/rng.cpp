#include "chisqalt/rng.hpp"

#include <cmath>

#include "chisqalt/special.hpp"

namespace chisqalt {
namespace {

// splitmix64; used only for key mixing, never as the variate engine.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(seed), engine_(mix64(seed)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(mix64(key_ ^ mix64(index + 1)));
}

double RngStream::uniform() {
  // 53-bit mantissa draw in (0,1); zero is rerolled so logs stay finite.
  for (;;) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::normal() { return special::norm_quantile(uniform()); }

double RngStream::gamma(double shape) {
  if (shape < 1.0) {
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

long long RngStream::poisson(double mean) {
  std::poisson_distribution<long long> dist(mean);
  return dist(engine_);
}

long long RngStream::binomial(long long trials, double prob) {
  if (trials <= 0) return 0;
  if (prob <= 0.0) return 0;
  if (prob >= 1.0) return trials;
  std::binomial_distribution<long long> dist(trials, prob);
  return dist(engine_);
}

Eigen::ArrayXd RngStream::multinomial(long long trials, const Eigen::ArrayXd& probs) {
  const Eigen::Index k = probs.size();
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(k);
  double remaining_prob = probs.sum();
  long long remaining = trials;
  for (Eigen::Index i = 0; i + 1 < k && remaining > 0; ++i) {
    double p = remaining_prob > 0.0 ? probs[i] / remaining_prob : 0.0;
    long long c = binomial(remaining, std::min(1.0, std::max(0.0, p)));
    counts[i] = static_cast<double>(c);
    remaining -= c;
    remaining_prob -= probs[i];
  }
  if (k > 0) counts[k - 1] = static_cast<double>(remaining);
  return counts;
}

}  // namespace chisqalt
