#ifndef CHISQALT_SPEC_PARSER_HPP
#define CHISQALT_SPEC_PARSER_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chisqalt/distribution.hpp"

namespace chisqalt {

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

/// One textual argument slot: a fixed number or the free marker `?`.
struct SpecArg {
  bool free = false;
  double value = 0.0;

  bool operator==(const SpecArg&) const = default;
};

struct SpecAtom {
  Family family;
  std::vector<SpecArg> args;

  bool operator==(const SpecAtom&) const = default;
};

/// A parsed distribution description: a weighted sum of catalog atoms,
/// optionally truncated to an interval. Mixture weights are either all fixed
/// (positive, summing to 1) or all free, in which case they contribute m-1
/// positional parameters (the last weight is the remainder).
///
/// Grammar:
///   spec    := mix ("|" interval)?
///   mix     := term ("+" term)*
///   term    := ((number|"?") "*")? atom
///   atom    := name "(" arg ("," arg)* ")"
///   arg     := number | "?"
///   interval:= ("["|"(") bound "," bound ("]"|")")   bound := number|-inf|inf
class DistributionSpec {
 public:
  static DistributionSpec parse(std::string_view text);

  /// Canonical text form; parse(unparse()) reproduces the same structure.
  std::string unparse() const;

  /// Number of free parameters p.
  int free_parameter_count() const { return p_; }
  bool is_composite() const { return p_ > 0; }

  /// Substitute theta (length p) for the free slots and build the
  /// distribution. Throws on arity mismatch or out-of-domain values.
  Distribution bind(const Eigen::ArrayXd& theta) const;
  Distribution bind() const { return bind(Eigen::ArrayXd()); }

  /// Map between the constrained parameter vector and the optimizer's
  /// unconstrained coordinates (log for scale-like parameters, atanh for the
  /// linear slope, stick-breaking logits for free mixture weights).
  Eigen::ArrayXd to_unconstrained(const Eigen::ArrayXd& theta) const;
  Eigen::ArrayXd from_unconstrained(const Eigen::ArrayXd& u) const;

  const std::vector<SpecAtom>& components() const { return components_; }
  const std::vector<SpecArg>& weights() const { return weights_; }
  bool free_weights() const { return free_weights_; }
  bool truncated() const { return truncated_; }
  double truncation_lower() const { return trunc_lower_; }
  double truncation_upper() const { return trunc_upper_; }

  bool operator==(const DistributionSpec&) const = default;

 private:
  void finalize();  // validates and counts p

  std::vector<SpecArg> weights_;
  std::vector<SpecAtom> components_;
  bool free_weights_ = false;
  bool truncated_ = false;
  double trunc_lower_ = 0.0;
  double trunc_upper_ = 0.0;
  int p_ = 0;
};

}  // namespace chisqalt

#endif  // CHISQALT_SPEC_PARSER_HPP
