#include "chisqalt/spec_parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace chisqalt {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }

  std::size_t pos() const { return pos_; }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a family name");
    std::string out(text_.substr(start, pos_ - start));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

SpecArg parse_arg(Lexer& lex) {
  if (lex.accept('?')) return SpecArg{true, 0.0};
  return SpecArg{false, lex.number()};
}

SpecAtom parse_atom(Lexer& lex) {
  std::size_t at = lex.pos();
  std::string name = lex.name();
  auto family = family_from_name(name);
  if (!family) throw ParseError("unknown family name '" + name + "'", at);
  lex.expect('(');
  SpecAtom atom{*family, {}};
  atom.args.push_back(parse_arg(lex));
  while (lex.accept(',')) atom.args.push_back(parse_arg(lex));
  lex.expect(')');
  if (static_cast<int>(atom.args.size()) != family_arity(*family))
    throw ParseError(std::string(family_name(*family)) + " expects " +
                         std::to_string(family_arity(*family)) + " arguments",
                     at);
  return atom;
}

double parse_bound(Lexer& lex) { return lex.number(); }  // strtod handles -inf/inf

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

}  // namespace

DistributionSpec DistributionSpec::parse(std::string_view text) {
  Lexer lex(text);
  DistributionSpec spec;

  for (;;) {
    // term := ((number|"?") "*")? atom  -- a weight is present iff '*' follows.
    SpecArg weight{false, 1.0};
    bool explicit_weight = false;
    std::size_t save = lex.pos();
    char c = lex.peek();
    if (c == '?' || c == '-' || c == '+' || c == '.' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      SpecArg w = parse_arg(lex);
      if (lex.accept('*')) {
        weight = w;
        explicit_weight = true;
      } else {
        throw ParseError("expected '*' after mixture weight", save);
      }
    }
    (void)explicit_weight;
    spec.weights_.push_back(weight);
    spec.components_.push_back(parse_atom(lex));
    if (!lex.accept('+')) break;
  }

  if (lex.accept('|')) {
    char open = lex.peek();
    if (open != '[' && open != '(') lex.fail("expected '[' or '(' to open the interval");
    lex.accept(open);
    spec.trunc_lower_ = parse_bound(lex);
    lex.expect(',');
    spec.trunc_upper_ = parse_bound(lex);
    char close = lex.peek();
    if (close != ']' && close != ')') lex.fail("expected ']' or ')' to close the interval");
    lex.accept(close);
    spec.truncated_ = true;
    if (!(spec.trunc_lower_ < spec.trunc_upper_))
      lex.fail("invalid truncation bounds: lower must be below upper");
  }

  if (!lex.done()) lex.fail("unexpected trailing input");

  spec.finalize();
  return spec;
}

void DistributionSpec::finalize() {
  const std::size_t m = components_.size();
  std::size_t n_free_weights = 0;
  for (const auto& w : weights_)
    if (w.free) ++n_free_weights;
  if (n_free_weights != 0 && n_free_weights != m)
    throw ParseError("mixture weights must be all fixed or all free", 0);
  free_weights_ = n_free_weights == m && m > 0;

  if (!free_weights_) {
    double sum = 0.0;
    for (const auto& w : weights_) {
      if (!(w.value > 0.0)) throw ParseError("mixture weights must be positive", 0);
      sum += w.value;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ParseError("mixture weights must sum to 1 (got " + format_number(sum) + ")", 0);
  }

  p_ = free_weights_ ? static_cast<int>(m) - 1 : 0;
  for (const auto& comp : components_)
    for (const auto& a : comp.args)
      if (a.free) ++p_;
}

std::string DistributionSpec::unparse() const {
  std::string out;
  const bool plain = components_.size() == 1 && !free_weights_;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (j > 0) out += " + ";
    if (!plain) {
      out += weights_[j].free ? "?" : format_number(weights_[j].value);
      out += "*";
    }
    const auto& comp = components_[j];
    out += family_name(comp.family);
    out += "(";
    for (std::size_t i = 0; i < comp.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += comp.args[i].free ? "?" : format_number(comp.args[i].value);
    }
    out += ")";
  }
  if (truncated_) {
    out += " | ";
    out += std::isinf(trunc_lower_) ? "(" : "[";
    out += format_number(trunc_lower_);
    out += ", ";
    out += format_number(trunc_upper_);
    out += std::isinf(trunc_upper_) ? ")" : "]";
  }
  return out;
}

Distribution DistributionSpec::bind(const Eigen::ArrayXd& theta) const {
  if (theta.size() != p_)
    throw std::invalid_argument("bind: expected " + std::to_string(p_) +
                                " parameters, got " + std::to_string(theta.size()));
  Eigen::Index next = 0;
  const std::size_t m = components_.size();

  Eigen::ArrayXd weights(m);
  std::vector<Distribution> parts;
  parts.reserve(m);
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double w;
    if (free_weights_) {
      w = (j + 1 < m) ? theta[next++] : 1.0 - weight_sum;
    } else {
      w = weights_[j].value;
    }
    if (!(w > 0.0)) throw std::invalid_argument("bind: mixture weights must stay positive");
    weight_sum += w;
    weights[static_cast<Eigen::Index>(j)] = w;

    const auto& comp = components_[j];
    Eigen::ArrayXd params(comp.args.size());
    for (std::size_t i = 0; i < comp.args.size(); ++i)
      params[static_cast<Eigen::Index>(i)] =
          comp.args[i].free ? theta[next++] : comp.args[i].value;
    parts.push_back(Distribution::atom(comp.family, params));
  }

  Distribution dist = (m == 1) ? parts[0] : Distribution::mixture(weights, std::move(parts));
  if (truncated_) dist = Distribution::truncate(dist, trunc_lower_, trunc_upper_);
  return dist;
}

namespace {

enum class Transform { Identity, LogPos, AtanhUnit };

Transform arg_transform(Family f, std::size_t index) {
  switch (f) {
    case Family::Uniform: return Transform::Identity;
    case Family::Normal: return index == 0 ? Transform::Identity : Transform::LogPos;
    case Family::StudentT: return Transform::LogPos;
    case Family::Beta: return Transform::LogPos;
    case Family::Gamma: return Transform::LogPos;
    case Family::Exponential: return Transform::LogPos;
    case Family::Linear: return Transform::AtanhUnit;
  }
  return Transform::Identity;
}

double logit(double v) { return std::log(v / (1.0 - v)); }
double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

Eigen::ArrayXd DistributionSpec::to_unconstrained(const Eigen::ArrayXd& theta) const {
  if (theta.size() != p_) throw std::invalid_argument("to_unconstrained: wrong length");
  Eigen::ArrayXd u(p_);
  Eigen::Index next = 0;
  const std::size_t m = components_.size();
  double remaining = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (free_weights_ && j + 1 < m) {
      double w = theta[next];
      u[next] = logit(std::clamp(w / remaining, 1e-12, 1.0 - 1e-12));
      remaining -= w;
      ++next;
    }
    for (std::size_t i = 0; i < components_[j].args.size(); ++i) {
      if (!components_[j].args[i].free) continue;
      switch (arg_transform(components_[j].family, i)) {
        case Transform::Identity: u[next] = theta[next]; break;
        case Transform::LogPos: u[next] = std::log(theta[next]); break;
        case Transform::AtanhUnit:
          u[next] = std::atanh(std::clamp(theta[next], -1.0 + 1e-12, 1.0 - 1e-12));
          break;
      }
      ++next;
    }
  }
  return u;
}

Eigen::ArrayXd DistributionSpec::from_unconstrained(const Eigen::ArrayXd& u) const {
  if (u.size() != p_) throw std::invalid_argument("from_unconstrained: wrong length");
  Eigen::ArrayXd theta(p_);
  Eigen::Index next = 0;
  const std::size_t m = components_.size();
  double remaining = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (free_weights_ && j + 1 < m) {
      double w = sigmoid(u[next]) * remaining;
      theta[next] = w;
      remaining -= w;
      ++next;
    }
    for (std::size_t i = 0; i < components_[j].args.size(); ++i) {
      if (!components_[j].args[i].free) continue;
      switch (arg_transform(components_[j].family, i)) {
        case Transform::Identity: theta[next] = u[next]; break;
        case Transform::LogPos: theta[next] = std::exp(u[next]); break;
        case Transform::AtanhUnit: theta[next] = std::tanh(u[next]); break;
      }
      ++next;
    }
  }
  return theta;
}

}  // namespace chisqalt
