#include "chisqalt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "chisqalt/estimation.hpp"

namespace chisqalt {

SelectionGrid SelectionGrid::defaults(int p, double n) {
  SelectionGrid grid;
  const int k_min = p + 2;
  int k_max = static_cast<int>(std::floor(2.0 * (1.0 + std::log2(n))));
  k_max = std::min(k_max, static_cast<int>(std::floor(n / 5.0)));
  for (int k = k_min; k <= k_max; ++k) grid.k_values.push_back(k);
  grid.kappa_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  grid.kinds.assign(kAllStatisticKinds.begin(), kAllStatisticKinds.end());
  return grid;
}

Eigen::ArrayXd perfect_sample(const Distribution& f1, Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("perfect_sample: n must be >= 1");
  Eigen::ArrayXd xs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    xs[i] = f1.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return xs;
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Perfect counts are integers, so even F1 = F0 leaves rounding noise in the
// merit (bounded by ~0.02 across the catalog at practical n). Merits below
// this scale carry no ranking information and compare as ties, which the
// (k, kappa, kind) order then resolves to the smallest admissible scheme.
constexpr double kMeritNoiseFloor = 0.02;

struct EntryEval {
  double merit = kNan;
  bool admissible = false;
  Eigen::ArrayXd theta;
};

EntryEval evaluate_entry(const DistributionSpec& null_spec, double n,
                         const BinningScheme& scheme, const Eigen::ArrayXd& counts,
                         StatisticKind kind, const Eigen::ArrayXd& theta_ref) {
  EntryEval out;
  const int p = null_spec.free_parameter_count();
  const int df = scheme.k - 1 - p;
  if (df < 1) return out;
  if (kind == StatisticKind::NeymanModified && (counts <= 0.0).any()) return out;

  Eigen::ArrayXd expected;
  if (p == 0) {
    expected = n * scheme.null_probs;
  } else {
    try {
      FitResult fit = minimum_chisq(null_spec, counts, scheme.edges, kind, theta_ref);
      out.theta = fit.theta;
      expected =
          n * bin_probabilities(null_spec.bind(fit.theta), scheme.edges).max(1e-12);
    } catch (const std::exception&) {
      return out;
    }
  }
  if (expected.minCoeff() < 5.0) return out;

  out.admissible = true;
  out.merit = std::max(chisq_stat(kind, counts, expected), 0.0) /
              chisq_quantile(0.95, df);
  return out;
}

}  // namespace

double merit(const DistributionSpec& null_spec, const Distribution& f1, double n,
             const BinningScheme& scheme, StatisticKind kind) {
  const Eigen::ArrayXd xs = perfect_sample(f1, static_cast<Eigen::Index>(n));
  const Eigen::ArrayXd counts = bin_counts(xs, scheme.edges);
  Eigen::ArrayXd theta_ref;
  if (null_spec.is_composite()) theta_ref = unbinned_mle(null_spec, xs).theta;
  EntryEval eval = evaluate_entry(null_spec, n, scheme, counts, kind, theta_ref);
  if (!eval.admissible) throw std::runtime_error("merit: scheme is inadmissible");
  return eval.merit;
}

SchemeChoice select_scheme(const DistributionSpec& null_spec, const Distribution& f1,
                           double n, const SelectionGrid& grid) {
  if (grid.k_values.empty() || grid.kappa_values.empty() || grid.kinds.empty())
    throw std::invalid_argument("select_scheme: empty grid");

  // deterministic evaluation order: k, kappa ascending; kinds in listing order
  std::vector<int> ks = grid.k_values;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<double> kappas = grid.kappa_values;
  std::sort(kappas.begin(), kappas.end());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());
  std::vector<StatisticKind> kinds;
  for (StatisticKind k : kAllStatisticKinds)
    if (std::find(grid.kinds.begin(), grid.kinds.end(), k) != grid.kinds.end())
      kinds.push_back(k);

  const Eigen::ArrayXd xs = perfect_sample(f1, static_cast<Eigen::Index>(n));
  Eigen::ArrayXd theta_ref;
  Distribution f0_ref = null_spec.is_composite()
                            ? [&] {
                                theta_ref = unbinned_mle(null_spec, xs).theta;
                                return null_spec.bind(theta_ref);
                              }()
                            : null_spec.bind();

  SchemeChoice choice;
  double best = -std::numeric_limits<double>::infinity();
  bool any_admissible = false;

  for (int k : ks) {
    Eigen::ArrayXd e0, e1;
    bool edges_ok = true;
    try {
      e0 = equal_prob_edges(f0_ref, k);
      e1 = equal_size_edges(f0_ref, k);
    } catch (const std::exception&) {
      edges_ok = false;
    }
    for (double kappa : kappas) {
      BinningScheme scheme;
      Eigen::ArrayXd counts;
      bool scheme_ok = edges_ok;
      if (scheme_ok) {
        try {
          scheme.k = k;
          scheme.kappa = kappa;
          scheme.edges = interpolate_edges(e0, e1, kappa);
          scheme.null_probs = bin_probabilities(f0_ref, scheme.edges);
          counts = bin_counts(xs, scheme.edges);
        } catch (const std::exception&) {
          scheme_ok = false;
        }
      }
      for (StatisticKind kind : kinds) {
        GridEntry entry{k, kappa, kind, kNan, false};
        if (scheme_ok) {
          EntryEval eval = evaluate_entry(null_spec, n, scheme, counts, kind, theta_ref);
          entry.merit = eval.merit;
          entry.admissible = eval.admissible;
          if (eval.admissible) {
            any_admissible = true;
            const double effective = eval.merit < kMeritNoiseFloor ? 0.0 : eval.merit;
            if (effective > best) {
              best = effective;
              choice.scheme = scheme;
              choice.kind = kind;
              choice.merit = eval.merit;
              choice.theta = eval.theta;
            }
          }
        }
        choice.grid_report.push_back(entry);
      }
    }
  }
  if (!any_admissible)
    throw std::runtime_error("select_scheme: every grid entry is inadmissible");
  choice.theta_ref = theta_ref;
  return choice;
}

SchemeChoice select_scheme(const DistributionSpec& null_spec, const Distribution& f1,
                           double n) {
  return select_scheme(null_spec, f1, n,
                       SelectionGrid::defaults(null_spec.free_parameter_count(), n));
}

void write_grid_csv(std::ostream& out, const std::vector<GridEntry>& grid) {
  out << "k,kappa,kind,merit,admissible\n";
  char buf[64];
  for (const GridEntry& e : grid) {
    std::snprintf(buf, sizeof(buf), "%d,%g,%s,%.12g,%d", e.k, e.kappa,
                  std::string(statistic_name(e.kind)).c_str(), e.merit,
                  e.admissible ? 1 : 0);
    out << buf << '\n';
  }
}

}  // namespace chisqalt
