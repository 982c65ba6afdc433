#ifndef CHISQALT_RNG_HPP
#define CHISQALT_RNG_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace chisqalt {

/// Seeded random stream with deterministic child-stream derivation.
///
/// Child streams are derived from (key, index) by hashing, so a replicate
/// always sees the same variates no matter which thread runs it or in which
/// order replicates are scheduled.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Derive an independent stream for task `index`.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via the inverse cdf.
  double normal();

  /// Gamma(shape, 1) by the Marsaglia-Tsang squeeze.
  double gamma(double shape);

  long long poisson(double mean);
  long long binomial(long long trials, double prob);

  /// Multinomial counts by sequential binomial conditioning. `probs` must be
  /// nonnegative; it is normalized internally.
  Eigen::ArrayXd multinomial(long long trials, const Eigen::ArrayXd& probs);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace chisqalt

#endif  // CHISQALT_RNG_HPP
