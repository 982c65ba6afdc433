#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "chisqalt/parallel.hpp"
#include "chisqalt/power.hpp"
#include "chisqalt/studies.hpp"
#include "chisqalt/svg.hpp"

using namespace chisqalt;

namespace {

Distribution dist(const char* text) { return DistributionSpec::parse(text).bind(); }

double combined_se(const PowerResult& a, const PowerResult& b) {
  return std::sqrt(a.se * a.se + b.se * b.se);
}

}  // namespace

TEST_CASE("fast path size equals the level under the null") {
  Distribution f0 = dist("uniform(0,1)");
  BinningScheme scheme = make_scheme(f0, 4, 0.0);
  PowerResult pr = power_fast(f0, f0, scheme, StatisticKind::Pearson, 1000, 0.05, 2000, 91);
  CHECK(std::abs(pr.power - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / 2000.0));
}

TEST_CASE("fast path equals the full pipeline") {
  // five configurations of (null, alternative, k, kappa)
  struct Config {
    const char* null_text;
    const char* alt_text;
    int k;
    double kappa;
  };
  const Config configs[] = {
      {"uniform(0,1)", "linear(0.2)", 2, 0.0},
      {"uniform(0,1)", "beta(1,1.3)", 4, 0.5},
      {"normal(0,1)", "t(6)", 3, 0.5},
      {"exp(1)", "gamma(1.3,1.3)", 5, 0.0},
      {"beta(2,4)", "beta(2.5,3.5)", 3, 1.0},
  };
  int idx = 0;
  for (const Config& cfg : configs) {
    DistributionSpec null_spec = DistributionSpec::parse(cfg.null_text);
    Distribution f0 = null_spec.bind();
    Distribution f1 = dist(cfg.alt_text);
    BinningScheme scheme = make_scheme(f0, cfg.k, cfg.kappa);
    SelectionGrid grid;
    grid.k_values = {cfg.k};
    grid.kappa_values = {cfg.kappa};
    grid.kinds = {StatisticKind::Pearson};

    PowerResult fast =
        power_fast(f0, f1, scheme, StatisticKind::Pearson, 500, 0.05, 2000, 7000 + idx);
    // force the full path onto the same scheme through a one-entry grid
    PowerResult full = power_full(Method::RG, null_spec, f1, 500, false, 0.05, 2000, 0,
                                  9000 + idx, grid);
    CHECK(std::abs(fast.power - full.power) <= 3.0 * combined_se(fast, full) + 1e-12);
    ++idx;
  }
}

TEST_CASE("power increases with the sample size (two equal bins)") {
  Distribution f0 = dist("uniform(0,1)");
  Distribution f1 = dist("linear(0.2)");
  BinningScheme scheme = make_scheme(f0, 2, 0.0);
  PowerResult p100 = power_fast(f0, f1, scheme, StatisticKind::Pearson, 100, 0.05, 2000, 5);
  PowerResult p500 = power_fast(f0, f1, scheme, StatisticKind::Pearson, 500, 0.05, 2000, 5);
  PowerResult p2000 = power_fast(f0, f1, scheme, StatisticKind::Pearson, 2000, 0.05, 2000, 5);
  CHECK(p500.power - p100.power > 2.0 * combined_se(p100, p500));
  CHECK(p2000.power - p500.power > 2.0 * combined_se(p500, p2000));
}

TEST_CASE("every method holds its size on a simple null") {
  // all nine methods at the paper's standing n=1000
  DistributionSpec unif = DistributionSpec::parse("uniform(0,1)");
  const int B = 600, B_inner = 199;
  auto results = run_power_cell(unif, unif.bind(),
                                {Method::RG, Method::EqualProb, Method::EqualSize,
                                 Method::Histogram, Method::KS, Method::AD, Method::ZK,
                                 Method::ZA, Method::ZC},
                                1000, false, 0.05, B, B_inner, 2718);
  for (const auto& [method, pr] : results) {
    INFO(method_name(method));
    CHECK(std::abs(pr.power - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / B));
  }

  // chi-square methods across the simple-null catalog, B=2000
  for (const char* text :
       {"normal(0,1)", "t(5)", "beta(2,4)", "gamma(3,0.5)", "exp(1)", "linear(0.2)"}) {
    DistributionSpec null_spec = DistributionSpec::parse(text);
    auto chi = run_power_cell(null_spec, null_spec.bind(),
                              {Method::RG, Method::EqualProb, Method::EqualSize,
                               Method::Histogram},
                              1000, false, 0.05, 2000, 0, 2719);
    for (const auto& [method, pr] : chi) {
      INFO(text << " / " << method_name(method));
      CHECK(std::abs(pr.power - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / 2000.0));
    }
  }
}

TEST_CASE("single-method cells match multi-method cells bitwise") {
  DistributionSpec null_spec = DistributionSpec::parse("uniform(0,1)");
  Distribution f1 = dist("linear(0.25)");
  auto grouped = run_power_cell(null_spec, f1, {Method::RG, Method::KS, Method::AD}, 100,
                                false, 0.05, 200, 99, 424242);
  auto solo_rg = run_power_cell(null_spec, f1, {Method::RG}, 100, false, 0.05, 200, 99, 424242);
  auto solo_ks = run_power_cell(null_spec, f1, {Method::KS}, 100, false, 0.05, 200, 99, 424242);
  CHECK(grouped[Method::RG].power == solo_rg[Method::RG].power);
  CHECK(grouped[Method::KS].power == solo_ks[Method::KS].power);
}

TEST_CASE("reproducibility across thread counts") {
  DistributionSpec null_spec = DistributionSpec::parse("normal(0,1)");
  Distribution f1 = dist("t(5)");

  StudySpec study;
  study.name = "threads";
  study.null_spec = null_spec;
  study.alternatives.emplace_back(5.0, f1);
  study.alternatives.emplace_back(8.0, dist("t(8)"));
  study.methods = {Method::RG, Method::EqualProb, Method::KS};
  study.n = 200;
  study.B = 200;
  study.B_inner = 99;
  study.seed = 31337;

  setenv("CHISQALT_THREADS", "1", 1);
  PowerTable serial = power_curve(study);
  setenv("CHISQALT_THREADS", "7", 1);
  PowerTable threaded = power_curve(study);
  unsetenv("CHISQALT_THREADS");

  std::ostringstream a, b;
  write_power_csv(a, serial);
  write_power_csv(b, threaded);
  CHECK(a.str() == b.str());
}

TEST_CASE("type1 table covers nulls x alphas") {
  std::vector<std::pair<std::string, DistributionSpec>> nulls = {
      {"U[0,1]", DistributionSpec::parse("uniform(0,1)")}};
  PowerTable table = type1_table(nulls, {0.01, 0.05, 0.10}, 500, 400, 99);
  CHECK(table.rows.size() == 3);
  for (const PowerRow& row : table.rows) {
    CHECK(row.method == "RG");
    CHECK(std::abs(row.power - row.alpha) <=
          3.0 * std::sqrt(row.alpha * (1.0 - row.alpha) / 400.0));
  }
}

TEST_CASE("power curve emits per-cell and mean rows") {
  StudySpec study;
  study.name = "demo";
  study.null_spec = DistributionSpec::parse("uniform(0,1)");
  study.alternatives.emplace_back(0.0, dist("linear(0)"));
  study.alternatives.emplace_back(0.3, dist("linear(0.3)"));
  study.methods = {Method::RG, Method::EqualProb};
  study.n = 200;
  study.B = 200;
  study.B_inner = 99;
  study.seed = 5;
  PowerTable table = power_curve(study);
  CHECK(table.rows.size() == 2 * 2 + 2);
  int mean_rows = 0;
  for (const PowerRow& row : table.rows)
    if (row.study == "demo-mean") ++mean_rows;
  CHECK(mean_rows == 2);

  std::string svg = render_svg(table);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("RG") != std::string::npos);
  CHECK(render_svg(table) == svg);  // deterministic bytes
  CHECK_THROWS(render_svg(PowerTable{}));
}

TEST_CASE("poisson-mode type-I error is near the level") {
  DistributionSpec null_spec = DistributionSpec::parse("uniform(0,1)");
  Distribution f0 = null_spec.bind();
  auto results = run_power_cell(null_spec, f0, {Method::RG}, 300.0, true, 0.05, 500, 0, 808);
  CHECK(std::abs(results[Method::RG].power - 0.05) <= 0.03);
}

TEST_CASE("pervasive statistic failures abort the cell") {
  // an alternative concentrated in the middle bins leaves the outer bins
  // empty, which the Neyman statistic cannot handle
  Distribution f0 = dist("uniform(0,1)");
  Distribution f1 = dist("beta(50,50)");
  BinningScheme scheme = make_scheme(f0, 4, 0.0);
  CHECK_THROWS(
      power_fast(f0, f1, scheme, StatisticKind::NeymanModified, 100, 0.05, 200, 13));
}
