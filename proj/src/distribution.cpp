#include "chisqalt/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "chisqalt/special.hpp"

namespace chisqalt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

[[noreturn]] void domain_error(Family f, const std::string& what) {
  throw std::invalid_argument(std::string(family_name(f)) + ": " + what);
}

}  // namespace

bool Support::bounded() const { return std::isfinite(lower) && std::isfinite(upper); }

int family_arity(Family f) {
  switch (f) {
    case Family::Uniform: return 2;
    case Family::Normal: return 2;
    case Family::StudentT: return 1;
    case Family::Beta: return 2;
    case Family::Gamma: return 2;
    case Family::Exponential: return 1;
    case Family::Linear: return 1;
  }
  return 0;
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Uniform: return "uniform";
    case Family::Normal: return "normal";
    case Family::StudentT: return "t";
    case Family::Beta: return "beta";
    case Family::Gamma: return "gamma";
    case Family::Exponential: return "exp";
    case Family::Linear: return "linear";
  }
  return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "uniform") return Family::Uniform;
  if (lower == "normal") return Family::Normal;
  if (lower == "t") return Family::StudentT;
  if (lower == "beta") return Family::Beta;
  if (lower == "gamma") return Family::Gamma;
  if (lower == "exp") return Family::Exponential;
  if (lower == "linear") return Family::Linear;
  return std::nullopt;
}

namespace {

struct AtomData {
  Family family;
  Eigen::ArrayXd params;
};

struct MixtureData {
  Eigen::ArrayXd weights;
  std::vector<Distribution> components;
};

struct TruncateData {
  Distribution base;
  double lower, upper;
  double cdf_lower, cdf_upper;  // base cdf at the bounds
  double log_mass;
};

}  // namespace

struct Distribution::Node {
  std::variant<AtomData, MixtureData, TruncateData> data;
};

Distribution::Distribution(std::shared_ptr<const Node> node, Support support)
    : node_(std::move(node)), support_(support) {}

// ---------------------------------------------------------------------------
// Atom math
// ---------------------------------------------------------------------------

namespace {

double atom_cdf(const AtomData& a, double x) {
  const auto& p = a.params;
  switch (a.family) {
    case Family::Uniform:
      return std::clamp((x - p[0]) / (p[1] - p[0]), 0.0, 1.0);
    case Family::Normal:
      return special::norm_cdf((x - p[0]) / p[1]);
    case Family::StudentT: {
      // Student t scaled to unit variance: X = sqrt((df-2)/df) * T_df
      const double df = p[0];
      if (x == 0.0) return 0.5;
      const double t = x / std::sqrt((df - 2.0) / df);
      const double ib = special::reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
      return t > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
    }
    case Family::Beta:
      return special::reg_inc_beta(p[0], p[1], x);
    case Family::Gamma:
      return special::reg_lower_gamma(p[0], p[1] * x);
    case Family::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-p[0] * x);
    case Family::Linear: {
      const double s = p[0];
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return s * x * x + (1.0 - s) * x;
    }
  }
  return 0.0;
}

double atom_log_density(const AtomData& a, double x) {
  const auto& p = a.params;
  switch (a.family) {
    case Family::Uniform:
      return (x >= p[0] && x <= p[1]) ? -std::log(p[1] - p[0]) : kNegInf;
    case Family::Normal: {
      const double z = (x - p[0]) / p[1];
      return -0.5 * z * z - std::log(p[1]) - kLogSqrt2Pi;
    }
    case Family::StudentT: {
      const double df = p[0];
      const double scale = std::sqrt((df - 2.0) / df);
      const double t = x / scale;
      return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
             0.5 * std::log(df * M_PI) -
             (df + 1.0) / 2.0 * std::log1p(t * t / df) - std::log(scale);
    }
    case Family::Beta: {
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return (p[0] - 1.0) * std::log(x) + (p[1] - 1.0) * std::log1p(-x) -
             special::log_beta(p[0], p[1]);
    }
    case Family::Gamma: {
      if (x < 0.0) return kNegInf;
      if (x == 0.0) return p[0] == 1.0 ? std::log(p[1]) : (p[0] > 1.0 ? kNegInf : kInf);
      return p[0] * std::log(p[1]) + (p[0] - 1.0) * std::log(x) - p[1] * x -
             std::lgamma(p[0]);
    }
    case Family::Exponential:
      return x < 0.0 ? kNegInf : std::log(p[0]) - p[0] * x;
    case Family::Linear: {
      if (x < 0.0 || x > 1.0) return kNegInf;
      const double f = 2.0 * p[0] * x + (1.0 - p[0]);
      return f > 0.0 ? std::log(f) : kNegInf;
    }
  }
  return kNegInf;
}

// Closed-form quantiles where available; the rest fall back to inversion.
std::optional<double> atom_quantile_closed(const AtomData& a, double q) {
  const auto& p = a.params;
  switch (a.family) {
    case Family::Uniform:
      return p[0] + q * (p[1] - p[0]);
    case Family::Normal:
      return p[0] + p[1] * special::norm_quantile(q);
    case Family::Exponential:
      return -std::log1p(-q) / p[0];
    case Family::Linear: {
      const double s = p[0];
      if (s == 0.0) return q;
      const double one_minus_s = 1.0 - s;
      return (-one_minus_s + std::sqrt(one_minus_s * one_minus_s + 4.0 * s * q)) /
             (2.0 * s);
    }
    default:
      return std::nullopt;
  }
}

Support atom_support(Family f, const Eigen::ArrayXd& p) {
  switch (f) {
    case Family::Uniform: return {p[0], p[1]};
    case Family::Normal: return {kNegInf, kInf};
    case Family::StudentT: return {kNegInf, kInf};
    case Family::Beta: return {0.0, 1.0};
    case Family::Gamma: return {0.0, kInf};
    case Family::Exponential: return {0.0, kInf};
    case Family::Linear: return {0.0, 1.0};
  }
  return {kNegInf, kInf};
}

void validate_atom(Family f, const Eigen::ArrayXd& p) {
  if (p.size() != family_arity(f))
    domain_error(f, "expects " + std::to_string(family_arity(f)) + " parameters, got " +
                        std::to_string(p.size()));
  if (!p.isFinite().all()) domain_error(f, "parameters must be finite");
  switch (f) {
    case Family::Uniform:
      if (!(p[0] < p[1])) domain_error(f, "requires a < b");
      break;
    case Family::Normal:
      if (!(p[1] > 0.0)) domain_error(f, "requires sigma > 0");
      break;
    case Family::StudentT:
      if (!(p[0] > 2.0)) domain_error(f, "requires df > 2 (unit-variance scaling)");
      break;
    case Family::Beta:
      if (!(p[0] > 0.0 && p[1] > 0.0)) domain_error(f, "requires a, b > 0");
      break;
    case Family::Gamma:
      if (!(p[0] > 0.0 && p[1] > 0.0)) domain_error(f, "requires shape, rate > 0");
      break;
    case Family::Exponential:
      if (!(p[0] > 0.0)) domain_error(f, "requires rate > 0");
      break;
    case Family::Linear:
      if (!(std::abs(p[0]) <= 1.0)) domain_error(f, "requires |slope| <= 1");
      break;
  }
}

double atom_sample_one(const AtomData& a, RngStream& rng) {
  const auto& p = a.params;
  switch (a.family) {
    case Family::Uniform:
      return rng.uniform(p[0], p[1]);
    case Family::Normal:
      return p[0] + p[1] * rng.normal();
    case Family::StudentT: {
      const double df = p[0];
      double z = rng.normal();
      double v = 2.0 * rng.gamma(df / 2.0);  // chi-square(df)
      return std::sqrt((df - 2.0) / df) * z / std::sqrt(v / df);
    }
    case Family::Beta: {
      double x = rng.gamma(p[0]);
      double y = rng.gamma(p[1]);
      return x / (x + y);
    }
    case Family::Gamma:
      return rng.gamma(p[0]) / p[1];
    case Family::Exponential:
      return -std::log1p(-rng.uniform()) / p[0];
    case Family::Linear:
      return *atom_quantile_closed(a, rng.uniform());
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Distribution Distribution::atom(Family f, const Eigen::ArrayXd& params) {
  validate_atom(f, params);
  auto node = std::make_shared<const Node>(Node{AtomData{f, params}});
  return Distribution(std::move(node), atom_support(f, params));
}

Distribution Distribution::mixture(const Eigen::ArrayXd& weights,
                                   std::vector<Distribution> components) {
  if (weights.size() == 0 || weights.size() != static_cast<Eigen::Index>(components.size()))
    throw std::invalid_argument("mixture: weights/components size mismatch");
  if (!(weights > 0.0).all())
    throw std::invalid_argument("mixture: weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("mixture: weights must sum to 1");
  Support s{kInf, kNegInf};
  for (const auto& c : components) {
    s.lower = std::min(s.lower, c.support().lower);
    s.upper = std::max(s.upper, c.support().upper);
  }
  auto node = std::make_shared<const Node>(Node{MixtureData{weights, std::move(components)}});
  return Distribution(std::move(node), s);
}

Distribution Distribution::truncate(const Distribution& base, double lower, double upper) {
  if (!(lower < upper)) throw std::invalid_argument("truncate: requires lower < upper");
  const double flo = std::isinf(lower) ? 0.0 : base.cdf(lower);
  const double fhi = std::isinf(upper) ? 1.0 : base.cdf(upper);
  const double mass = fhi - flo;
  if (!(mass > 0.0))
    throw std::invalid_argument("truncate: component has no probability on the interval");
  Support s{std::max(lower, base.support().lower), std::min(upper, base.support().upper)};
  auto node = std::make_shared<const Node>(
      Node{TruncateData{base, lower, upper, flo, fhi, std::log(mass)}});
  return Distribution(std::move(node), s);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double Distribution::cdf(double x) const {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= support_.lower) return 0.0;
  if (x >= support_.upper) return 1.0;
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomData>) {
          return atom_cdf(n, x);
        } else if constexpr (std::is_same_v<T, MixtureData>) {
          double acc = 0.0;
          for (Eigen::Index i = 0; i < n.weights.size(); ++i)
            acc += n.weights[i] * n.components[static_cast<std::size_t>(i)].cdf(x);
          return std::min(acc, 1.0);
        } else {
          if (x <= n.lower) return 0.0;
          if (x >= n.upper) return 1.0;
          double v = (n.base.cdf(x) - n.cdf_lower) / (n.cdf_upper - n.cdf_lower);
          return std::clamp(v, 0.0, 1.0);
        }
      },
      node_->data);
}

double Distribution::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile: q outside (0,1)");
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomData>) {
          if (auto closed = atom_quantile_closed(n, q)) return *closed;
          return special::invert_monotone([&](double x) { return atom_cdf(n, x); }, q,
                                          support_.lower, support_.upper);
        } else if constexpr (std::is_same_v<T, MixtureData>) {
          return special::invert_monotone([&](double x) { return cdf(x); }, q,
                                          support_.lower, support_.upper);
        } else {
          return n.base.quantile(n.cdf_lower + q * (n.cdf_upper - n.cdf_lower));
        }
      },
      node_->data);
}

double Distribution::log_density(double x) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomData>) {
          return atom_log_density(n, x);
        } else if constexpr (std::is_same_v<T, MixtureData>) {
          // log sum_i exp(log w_i + log f_i(x)), pairwise for stability
          double acc = kNegInf;
          for (Eigen::Index i = 0; i < n.weights.size(); ++i) {
            double term = std::log(n.weights[i]) +
                          n.components[static_cast<std::size_t>(i)].log_density(x);
            if (term == kNegInf) continue;
            if (acc == kNegInf) {
              acc = term;
            } else {
              double hi = std::max(acc, term), lo = std::min(acc, term);
              acc = hi + std::log1p(std::exp(lo - hi));
            }
          }
          return acc;
        } else {
          if (x < n.lower || x > n.upper) return kNegInf;
          return n.base.log_density(x) - n.log_mass;
        }
      },
      node_->data);
}

Eigen::ArrayXd Distribution::log_density(const Eigen::ArrayXd& xs) const {
  return std::visit(
      [&](const auto& n) -> Eigen::ArrayXd {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomData>) {
          if (n.family == Family::Normal) {
            const double mu = n.params[0], sigma = n.params[1];
            Eigen::ArrayXd z = (xs - mu) / sigma;
            return -0.5 * z.square() - (std::log(sigma) + kLogSqrt2Pi);
          }
          Eigen::ArrayXd out(xs.size());
          for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = atom_log_density(n, xs[i]);
          return out;
        } else if constexpr (std::is_same_v<T, MixtureData>) {
          Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(xs.size(), kNegInf);
          for (Eigen::Index i = 0; i < n.weights.size(); ++i) {
            Eigen::ArrayXd term =
                n.components[static_cast<std::size_t>(i)].log_density(xs) +
                std::log(n.weights[i]);
            Eigen::ArrayXd hi = acc.max(term);
            Eigen::ArrayXd lo = acc.min(term);
            acc = (hi == kNegInf).select(hi, hi + (1.0 + (lo - hi).exp()).log());
          }
          return acc;
        } else {
          Eigen::ArrayXd base = n.base.log_density(xs) - n.log_mass;
          return (xs < n.lower || xs > n.upper)
              .select(Eigen::ArrayXd::Constant(xs.size(), kNegInf), base);
        }
      },
      node_->data);
}

Eigen::ArrayXd Distribution::sample(Eigen::Index n, RngStream& rng) const {
  Eigen::ArrayXd out(n);
  std::visit(
      [&](const auto& nd) {
        using T = std::decay_t<decltype(nd)>;
        if constexpr (std::is_same_v<T, AtomData>) {
          for (Eigen::Index i = 0; i < n; ++i) out[i] = atom_sample_one(nd, rng);
        } else if constexpr (std::is_same_v<T, MixtureData>) {
          for (Eigen::Index i = 0; i < n; ++i) {
            double u = rng.uniform();
            double cum = 0.0;
            Eigen::Index j = nd.weights.size() - 1;
            for (Eigen::Index c = 0; c < nd.weights.size(); ++c) {
              cum += nd.weights[c];
              if (u <= cum) { j = c; break; }
            }
            out[i] = nd.components[static_cast<std::size_t>(j)].sample(1, rng)[0];
          }
        } else {
          for (Eigen::Index i = 0; i < n; ++i) {
            double u = rng.uniform(nd.cdf_lower, nd.cdf_upper);
            out[i] = nd.base.quantile(std::clamp(u, std::nextafter(0.0, 1.0),
                                                 std::nextafter(1.0, 0.0)));
          }
        }
      },
      node_->data);
  return out;
}

}  // namespace chisqalt
