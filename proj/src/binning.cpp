#include "chisqalt/binning.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chisqalt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_edges(const Eigen::ArrayXd& edges) {
  if (edges.size() < 2) throw std::invalid_argument("edges: need at least two");
  for (Eigen::Index i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i]))
      throw std::invalid_argument("edges must be strictly increasing");
}

}  // namespace

Eigen::ArrayXd equal_prob_edges(const Distribution& f0, int k) {
  if (k < 2) throw std::invalid_argument("equal_prob_edges: k must be >= 2");
  Eigen::ArrayXd edges(k + 1);
  edges[0] = f0.support().lower;
  edges[k] = f0.support().upper;
  for (int i = 1; i < k; ++i)
    edges[i] = f0.quantile(static_cast<double>(i) / k);
  check_edges(edges);
  return edges;
}

Eigen::ArrayXd equal_size_edges(const Distribution& f0, int k, double tail_eps) {
  if (k < 2) throw std::invalid_argument("equal_size_edges: k must be >= 2");
  const Support& s = f0.support();
  Eigen::ArrayXd edges(k + 1);
  edges[0] = s.lower;
  edges[k] = s.upper;
  double lo = s.lower, hi = s.upper;
  if (!s.bounded()) {
    lo = f0.quantile(tail_eps);
    hi = f0.quantile(1.0 - tail_eps);
  }
  for (int i = 1; i < k; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / k;
  check_edges(edges);
  return edges;
}

Eigen::ArrayXd interpolate_edges(const Eigen::ArrayXd& e0, const Eigen::ArrayXd& e1,
                                 double kappa) {
  if (e0.size() != e1.size())
    throw std::invalid_argument("interpolate_edges: mismatched lengths");
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw std::invalid_argument("interpolate_edges: kappa outside [0,1]");
  if (kappa == 0.0) return e0;
  if (kappa == 1.0) return e1;
  Eigen::ArrayXd out(e0.size());
  for (Eigen::Index i = 0; i < e0.size(); ++i) {
    const bool inf0 = std::isinf(e0[i]), inf1 = std::isinf(e1[i]);
    if (inf0 != inf1 || (inf0 && e0[i] != e1[i]))
      throw std::invalid_argument("interpolate_edges: infinite entries must agree in position");
    out[i] = inf0 ? e0[i] : (1.0 - kappa) * e0[i] + kappa * e1[i];
  }
  check_edges(out);
  return out;
}

Eigen::ArrayXd bin_probabilities(const Distribution& f, const Eigen::ArrayXd& edges) {
  check_edges(edges);
  Eigen::ArrayXd probs(edges.size() - 1);
  double prev = f.cdf(edges[0]);
  for (Eigen::Index i = 1; i < edges.size(); ++i) {
    double cur = f.cdf(edges[i]);
    probs[i - 1] = std::max(cur - prev, 0.0);
    prev = cur;
  }
  return probs;
}

Eigen::ArrayXd bin_counts(const Eigen::ArrayXd& values, const Eigen::ArrayXd& edges,
                          Eigen::Index* out_of_range) {
  check_edges(edges);
  const Eigen::Index k = edges.size() - 1;
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(k);
  Eigen::Index outside = 0;
  const double* begin = edges.data();
  const double* end = begin + edges.size();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (x < edges[0] || x > edges[k] || std::isnan(x)) {
      ++outside;
      continue;
    }
    // [B_j, B_{j+1}) with the last bin closed; edge ties go right
    const double* it = std::upper_bound(begin, end, x);
    Eigen::Index j = std::min<Eigen::Index>(it - begin - 1, k - 1);
    counts[j] += 1.0;
  }
  if (out_of_range) *out_of_range = outside;
  return counts;
}

bool admissible(double n, const Eigen::ArrayXd& null_probs, double threshold) {
  if (null_probs.size() == 0) return false;
  return n * null_probs.minCoeff() >= threshold;
}

BinningScheme histogram_scheme(const Distribution& f0, double n, int nbins) {
  if (nbins < 2) throw std::invalid_argument("histogram_scheme: nbins must be >= 2");
  if (n < 10.0)
    throw std::invalid_argument("histogram_scheme: cannot reach two admissible bins with n < 10");
  const Eigen::ArrayXd raw_edges = equal_size_edges(f0, nbins);
  const Eigen::ArrayXd raw_probs = bin_probabilities(f0, raw_edges);

  std::vector<double> edges{raw_edges[0]};
  std::vector<double> probs;
  double acc = 0.0;
  for (int i = 0; i < nbins; ++i) {
    acc += raw_probs[i];
    if (n * acc >= 5.0) {
      edges.push_back(raw_edges[i + 1]);
      probs.push_back(acc);
      acc = 0.0;
    }
  }
  if (acc > 0.0) {
    // deficient remainder: absorb into the bin to its left
    if (probs.empty()) throw std::runtime_error("histogram_scheme: no admissible bins");
    probs.back() += acc;
    edges.back() = raw_edges[nbins];
  }
  if (probs.size() < 2) throw std::runtime_error("histogram_scheme: fewer than two bins survive");

  BinningScheme scheme;
  scheme.k = static_cast<int>(probs.size());
  scheme.kappa = 1.0;
  scheme.edges = Eigen::Map<const Eigen::ArrayXd>(edges.data(), static_cast<Eigen::Index>(edges.size()));
  scheme.null_probs = Eigen::Map<const Eigen::ArrayXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
  return scheme;
}

Eigen::ArrayXd snap_to_data_edges(const Eigen::ArrayXd& ideal,
                                  const Eigen::ArrayXd& available) {
  check_edges(ideal);
  check_edges(available);
  if (available.size() < ideal.size())
    throw std::invalid_argument("snap_to_data_edges: not enough data edges");
  const Eigen::Index m = available.size();
  Eigen::ArrayXd out(ideal.size());
  out[0] = available[0];
  out[ideal.size() - 1] = available[m - 1];
  Eigen::Index last_used = 0;  // outer edges are reserved
  for (Eigen::Index i = 1; i + 1 < ideal.size(); ++i) {
    const double target = ideal[i];
    // nearest available edge, ties to the right
    const double* it = std::lower_bound(available.data(), available.data() + m, target);
    Eigen::Index hi = std::min<Eigen::Index>(it - available.data(), m - 1);
    Eigen::Index lo = hi > 0 ? hi - 1 : 0;
    Eigen::Index pick =
        (std::abs(available[hi] - target) <= std::abs(available[lo] - target)) ? hi : lo;
    if (pick <= last_used) pick = last_used + 1;
    if (pick >= m - 1)
      throw std::runtime_error("snap_to_data_edges: ran out of distinct data edges");
    out[i] = available[pick];
    last_used = pick;
  }
  check_edges(out);
  return out;
}

BinningScheme make_scheme(const Distribution& f0, int k, double kappa, double tail_eps) {
  BinningScheme scheme;
  scheme.k = k;
  scheme.kappa = kappa;
  scheme.edges = interpolate_edges(equal_prob_edges(f0, k),
                                   equal_size_edges(f0, k, tail_eps), kappa);
  scheme.null_probs = bin_probabilities(f0, scheme.edges);
  return scheme;
}

namespace {

double parse_cell(const std::string& cell, int line_no) {
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw std::runtime_error("binned csv: bad number '" + cell + "' on line " +
                             std::to_string(line_no));
  return v;
}

}  // namespace

BinnedData read_binned_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw std::runtime_error("binned csv: empty input");
  ++line_no;
  if (line.ends_with('\r')) line.pop_back();
  if (line != "lower,upper,count")
    throw std::runtime_error("binned csv: expected header 'lower,upper,count'");

  std::vector<double> edges;
  std::vector<double> counts;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.ends_with('\r')) line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string lo_s, hi_s, c_s;
    if (!std::getline(row, lo_s, ',') || !std::getline(row, hi_s, ',') ||
        !std::getline(row, c_s))
      throw std::runtime_error("binned csv: expected 3 fields on line " +
                               std::to_string(line_no));
    double lo = parse_cell(lo_s, line_no);
    double hi = parse_cell(hi_s, line_no);
    double c = parse_cell(c_s, line_no);
    if (!(lo < hi))
      throw std::runtime_error("binned csv: lower must be below upper on line " +
                               std::to_string(line_no));
    if (c < 0.0 || std::abs(c - std::round(c)) > 1e-9)
      throw std::runtime_error("binned csv: count must be a nonnegative integer on line " +
                               std::to_string(line_no));
    if (edges.empty()) {
      edges.push_back(lo);
    } else {
      double prev = edges.back();
      double tol = 1e-12 * std::max(1.0, std::abs(prev));
      if (std::abs(lo - prev) > tol)
        throw std::runtime_error("binned csv: bins must be contiguous (line " +
                                 std::to_string(line_no) + ")");
    }
    edges.push_back(hi);
    counts.push_back(std::round(c));
  }
  if (counts.empty()) throw std::runtime_error("binned csv: no data rows");

  BinnedData out;
  out.edges = Eigen::Map<const Eigen::ArrayXd>(edges.data(), static_cast<Eigen::Index>(edges.size()));
  out.counts = Eigen::Map<const Eigen::ArrayXd>(counts.data(), static_cast<Eigen::Index>(counts.size()));
  check_edges(out.edges);
  return out;
}

void write_binned_csv(std::ostream& out, const BinnedData& data) {
  out << "lower,upper,count\n";
  char buf[96];
  for (Eigen::Index i = 0; i < data.counts.size(); ++i) {
    auto fmt = [&](double v) -> std::string {
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return buf;
    };
    out << fmt(data.edges[i]) << ',' << fmt(data.edges[i + 1]) << ','
        << static_cast<long long>(data.counts[i]) << '\n';
  }
}

}  // namespace chisqalt
