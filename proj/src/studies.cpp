#include "chisqalt/studies.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "chisqalt/estimation.hpp"
#include "chisqalt/parallel.hpp"

namespace chisqalt {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

std::vector<Method> all_methods() {
  return {kAllMethods.begin(), kAllMethods.end()};
}

}  // namespace

std::vector<std::pair<std::string, DistributionSpec>> table1_nulls() {
  return {
      {"U[0,1]", DistributionSpec::parse("uniform(0,1)")},
      {"Beta(2,4)", DistributionSpec::parse("beta(2,4)")},
      {"Gamma(3,0.5)", DistributionSpec::parse("gamma(3,0.5)")},
      {"N(0,1)", DistributionSpec::parse("normal(0,1)")},
      {"Normal", DistributionSpec::parse("normal(?,?)")},
      {"Exp(1)", DistributionSpec::parse("exp(1)")},
      {"Exponential", DistributionSpec::parse("exp(?)")},
  };
}

PowerTable reproduce_table1(int B, double n, std::uint64_t seed) {
  return type1_table(table1_nulls(), {0.01, 0.05, 0.10}, n, B, seed);
}

MixtureDemoResult mixture_estimation_demo(int B, int n, double alpha, std::uint64_t seed) {
  const DistributionSpec family = DistributionSpec::parse("?*normal(?,?) + ?*normal(?,?)");
  Eigen::ArrayXd truth(5);
  truth << 1.0 / 3.0, 0.0, 1.0, 5.0, 2.0;
  const Distribution f_true = family.bind(truth);
  const int k = 10;
  const int df = k - 1 - family.free_parameter_count();  // 4
  const double crit = chisq_quantile(1.0 - alpha, df);

  enum : std::uint8_t { kFail = 2 };
  std::vector<std::uint8_t> rej_mle(static_cast<std::size_t>(B), kFail);
  std::vector<std::uint8_t> rej_mc(static_cast<std::size_t>(B), kFail);

  RngStream root(seed);
  parallel_for(B, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index r = begin; r < end; ++r) {
      RngStream sub = root.substream(static_cast<std::uint64_t>(r));
      try {
        Eigen::ArrayXd data = f_true.sample(n, sub);
        Eigen::ArrayXd theta_mle = unbinned_mle(family, data).theta;
        Distribution fitted = family.bind(theta_mle);
        Eigen::ArrayXd edges = equal_prob_edges(fitted, k);
        Eigen::ArrayXd counts = bin_counts(data, edges);

        Eigen::ArrayXd expected_mle =
            static_cast<double>(n) * bin_probabilities(fitted, edges).max(1e-12);
        double stat_mle = chisq_stat(StatisticKind::Pearson, counts, expected_mle);
        rej_mle[static_cast<std::size_t>(r)] = stat_mle > crit ? 1 : 0;

        FitResult fit = minimum_chisq(family, counts, edges, StatisticKind::Pearson, theta_mle);
        Eigen::ArrayXd expected_mc =
            static_cast<double>(n) *
            bin_probabilities(family.bind(fit.theta), edges).max(1e-12);
        double stat_mc = chisq_stat(StatisticKind::Pearson, counts, expected_mc);
        rej_mc[static_cast<std::size_t>(r)] = stat_mc > crit ? 1 : 0;
      } catch (const std::exception&) {
        // leave both marked failed
      }
    }
  });

  MixtureDemoResult out;
  long ok = 0, rej1 = 0, rej2 = 0, failures = 0;
  for (int r = 0; r < B; ++r) {
    if (rej_mle[static_cast<std::size_t>(r)] == kFail ||
        rej_mc[static_cast<std::size_t>(r)] == kFail) {
      ++failures;
      continue;
    }
    ++ok;
    rej1 += rej_mle[static_cast<std::size_t>(r)];
    rej2 += rej_mc[static_cast<std::size_t>(r)];
  }
  if (failures * 100 > B)
    throw std::runtime_error("mixture_estimation_demo: estimation failed on " +
                             std::to_string(failures) + "/" + std::to_string(B) +
                             " replicates");
  out.replicates = ok;
  out.failures = failures;
  out.type1_mle = static_cast<double>(rej1) / static_cast<double>(ok);
  out.type1_minchisq = static_cast<double>(rej2) / static_cast<double>(ok);
  return out;
}

PowerTable bin_count_power_study(const std::vector<int>& k_values,
                                 const std::vector<double>& sample_sizes, double slope,
                                 double alpha, int B, std::uint64_t seed) {
  const Distribution f0 = DistributionSpec::parse("uniform(0,1)").bind();
  const Distribution f1 =
      DistributionSpec::parse(fmt("linear(%.17g)", slope)).bind();
  PowerTable table;
  RngStream root(seed);
  std::uint64_t cell = 0;
  for (double n : sample_sizes) {
    for (int k : k_values) {
      BinningScheme scheme = make_scheme(f0, k, 0.0);  // equal prob == equal size here
      if (!admissible(n, scheme.null_probs)) continue;
      PowerResult pr = power_fast(f0, f1, scheme, StatisticKind::Pearson, n, alpha, B,
                                  root.substream(cell++).key());
      table.rows.push_back(PowerRow{"fig1", static_cast<double>(k), "EqualProb", pr.power,
                                    pr.se, B, n, alpha, seed});
    }
  }
  return table;
}

namespace {

SelectionGrid merit_case_grid() {
  SelectionGrid grid;
  for (int k = 2; k <= 21; ++k) grid.k_values.push_back(k);
  grid.kappa_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  grid.kinds = {StatisticKind::Pearson};
  return grid;
}

}  // namespace

std::vector<GridEntry> merit_grid_study() {
  const DistributionSpec null_spec = DistributionSpec::parse("linear(-0.5)");
  const Distribution f1 = DistributionSpec::parse("exp(1) | [0, 1]").bind();
  return select_scheme(null_spec, f1, 10000.0, merit_case_grid()).grid_report;
}

PowerTable merit_power_study(int B, std::uint64_t seed) {
  const Distribution f0 = DistributionSpec::parse("linear(-0.5)").bind();
  const Distribution f1 = DistributionSpec::parse("exp(1) | [0, 1]").bind();
  const double n = 10000.0;
  PowerTable table;
  RngStream root(seed);
  std::uint64_t cell = 0;
  for (int k = 2; k <= 21; ++k) {
    for (double kappa : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      BinningScheme scheme = make_scheme(f0, k, kappa);
      if (!admissible(n, scheme.null_probs)) continue;
      PowerResult pr = power_fast(f0, f1, scheme, StatisticKind::Pearson, n, 0.05, B,
                                  root.substream(cell++).key());
      table.rows.push_back(PowerRow{"fig3", static_cast<double>(k),
                                    fmt("kappa=%.2g", kappa), pr.power, pr.se, B, n, 0.05,
                                    seed});
    }
  }
  return table;
}

StudySpec figure_study(int figure, int B, int B_inner, std::uint64_t seed) {
  StudySpec study;
  study.methods = all_methods();
  study.B = B;
  study.B_inner = B_inner;
  study.seed = seed;
  study.n = 1000.0;
  study.alpha = 0.05;

  auto alt = [](const std::string& spec) { return DistributionSpec::parse(spec).bind(); };

  switch (figure) {
    case 4:
      study.name = "fig4";
      study.null_spec = DistributionSpec::parse("normal(0,1)");
      for (int df = 3; df <= 22; ++df)  // 20 values; t is defined for df > 2
        study.alternatives.emplace_back(df, alt(fmt("t(%g)", df)));
      break;
    case 5:
      study.name = "fig5";
      study.null_spec = DistributionSpec::parse("normal(?,?)");
      for (int df = 3; df <= 22; ++df)
        study.alternatives.emplace_back(df, alt(fmt("t(%g)", df)));
      break;
    case 6:
      study.name = "fig6";
      study.null_spec = DistributionSpec::parse("uniform(0,1)");
      for (int i = 0; i <= 15; ++i) {
        double s = 0.02 * i;
        study.alternatives.emplace_back(s, alt(fmt("linear(%.17g)", s)));
      }
      break;
    case 7:
      study.name = "fig7";
      study.null_spec = DistributionSpec::parse("exp(?)");
      for (int i = 0; i <= 20; ++i) {
        double sigma = 0.25 + 0.0625 * i;
        study.alternatives.emplace_back(
            sigma, alt(fmt("0.9*exp(1) + 0.1*normal(1.5, %.17g) | [0, inf)", sigma)));
      }
      break;
    case 8:
      study.name = "fig8";
      study.null_spec = DistributionSpec::parse("uniform(0,1)");
      for (int i = 0; i <= 20; ++i) {
        double q = 1.0 + 0.05 * i;
        study.alternatives.emplace_back(q, alt(fmt("beta(1, %.17g)", q)));
      }
      break;
    case 9:
      study.name = "fig9";
      study.null_spec = DistributionSpec::parse("uniform(0,1)");
      for (int i = 0; i <= 20; ++i) {
        double q = 0.7 + 0.03 * i;
        study.alternatives.emplace_back(q, alt(fmt("beta(%.17g, %.17g)", q, q)));
      }
      break;
    case 10:
      study.name = "fig10";
      study.null_spec = DistributionSpec::parse("normal(10, 3.1622776601683795)");
      for (int i = 0; i <= 20; ++i) {
        double r = 10.0 + 4.5 * i;
        study.per_param_nulls.push_back(
            DistributionSpec::parse(fmt("normal(%.17g, %.17g)", r, std::sqrt(r))));
        study.alternatives.emplace_back(r, alt(fmt("gamma(%.17g, 1)", r)));
      }
      break;
    default:
      throw std::invalid_argument("figure_study: figure must be 4..10");
  }
  return study;
}

PowerTable reproduce(const std::string& name, int B, int B_inner, double n,
                     std::uint64_t seed) {
  if (name == "table1") return reproduce_table1(B, n, seed);
  if (name == "fig1")
    return bin_count_power_study(
        [] {
          std::vector<int> ks;
          for (int k = 2; k <= 21; ++k) ks.push_back(k);
          return ks;
        }(),
        {100, 250, 500, 1000, 2000}, 0.2, 0.05, B, seed);
  if (name == "fig2") {
    PowerTable table;
    for (const GridEntry& e : merit_grid_study()) {
      if (!e.admissible) continue;
      table.rows.push_back(PowerRow{"fig2", static_cast<double>(e.k),
                                    fmt("kappa=%.2g", e.kappa), e.merit, 0.0, 0, 10000.0,
                                    0.95, seed});
    }
    return table;
  }
  if (name == "fig3") return merit_power_study(B, seed);
  if (name == "mixture-demo") {
    MixtureDemoResult demo = mixture_estimation_demo(B, static_cast<int>(n), 0.05, seed);
    PowerTable table;
    table.rows.push_back(PowerRow{"mixture-demo", 0.0, "unbinned-mle", demo.type1_mle,
                                  std::sqrt(demo.type1_mle * (1.0 - demo.type1_mle) /
                                            static_cast<double>(demo.replicates)),
                                  B, n, 0.05, seed});
    table.rows.push_back(PowerRow{"mixture-demo", 0.0, "minimum-chisq",
                                  demo.type1_minchisq,
                                  std::sqrt(demo.type1_minchisq *
                                            (1.0 - demo.type1_minchisq) /
                                            static_cast<double>(demo.replicates)),
                                  B, n, 0.05, seed});
    return table;
  }
  for (int fig = 4; fig <= 10; ++fig) {
    if (name == fmt("fig%g", fig)) {
      StudySpec study = figure_study(fig, B, B_inner, seed);
      if (n > 0.0) study.n = n;
      return power_curve(study);
    }
  }
  throw std::invalid_argument("reproduce: unknown study '" + name +
                              "' (expected table1, fig1..fig10, or mixture-demo)");
}

}  // namespace chisqalt
