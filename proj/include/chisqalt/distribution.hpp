#ifndef CHISQALT_DISTRIBUTION_HPP
#define CHISQALT_DISTRIBUTION_HPP

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chisqalt/rng.hpp"

namespace chisqalt {

struct Support {
  double lower;
  double upper;

  bool bounded() const;
  bool contains(double x) const { return x >= lower && x <= upper; }
};

enum class Family { Uniform, Normal, StudentT, Beta, Gamma, Exponential, Linear };

int family_arity(Family f);
std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);  // case-insensitive

/// An immutable univariate continuous distribution: a catalog atom, a finite
/// mixture, or a truncation of another distribution. Values share their node
/// tree and are cheap to copy.
class Distribution {
 public:
  static Distribution atom(Family f, const Eigen::ArrayXd& params);
  static Distribution mixture(const Eigen::ArrayXd& weights,
                              std::vector<Distribution> components);
  static Distribution truncate(const Distribution& base, double lower, double upper);

  double cdf(double x) const;
  double quantile(double q) const;
  double log_density(double x) const;
  Eigen::ArrayXd log_density(const Eigen::ArrayXd& xs) const;
  const Support& support() const { return support_; }

  /// n independent draws, sorted order not guaranteed.
  Eigen::ArrayXd sample(Eigen::Index n, RngStream& rng) const;

 private:
  struct Node;
  Distribution(std::shared_ptr<const Node> node, Support support);

  std::shared_ptr<const Node> node_;
  Support support_;
};

}  // namespace chisqalt

#endif  // CHISQALT_DISTRIBUTION_HPP
