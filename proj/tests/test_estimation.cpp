#include <doctest.h>

#include <cmath>

#include "chisqalt/binning.hpp"
#include "chisqalt/estimation.hpp"
#include "chisqalt/rng.hpp"

using namespace chisqalt;

namespace {

Eigen::ArrayXd arr(std::initializer_list<double> values) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

}  // namespace

TEST_CASE("nelder-mead minimizes a quadratic") {
  auto fn = [](const Eigen::ArrayXd& x) {
    return (x[0] - 3.0) * (x[0] - 3.0) + 10.0 * (x[1] + 1.0) * (x[1] + 1.0);
  };
  NelderMeadResult res = nelder_mead(fn, arr({0, 0}));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(res.x[1] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("minimum chi-square recovers the exact-fit rate") {
  // two bins [0, 0.7, inf), counts 60/40: 1 - exp(-0.7 r) = 0.6
  DistributionSpec family = DistributionSpec::parse("exp(?)");
  Eigen::ArrayXd edges = arr({0.0, 0.7, INFINITY});
  Eigen::ArrayXd counts = arr({60, 40});
  FitResult fit = minimum_chisq(family, counts, edges, StatisticKind::Pearson, arr({1.0}));
  CHECK(fit.converged);
  CHECK(fit.theta[0] == doctest::Approx(1.3089867598202215).epsilon(1e-5));
  CHECK(fit.objective <= 1e-10);
}

TEST_CASE("exact counts give back the generating parameters") {
  DistributionSpec family = DistributionSpec::parse("normal(?,?)");
  Eigen::ArrayXd truth = arr({1.0, 2.0});
  Distribution d = family.bind(truth);
  Eigen::ArrayXd edges = equal_prob_edges(d, 6);
  Eigen::ArrayXd counts = 1000.0 * bin_probabilities(d, edges);

  FitResult mc = minimum_chisq(family, counts, edges, StatisticKind::Pearson, arr({0.5, 1.0}));
  CHECK(mc.objective <= 1e-10);
  CHECK(mc.theta[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(mc.theta[1] == doctest::Approx(2.0).epsilon(1e-5));

  FitResult ml = binned_mle(family, counts, edges, arr({0.5, 1.0}));
  CHECK(ml.theta[0] == doctest::Approx(mc.theta[0]).epsilon(1e-4));
  CHECK(ml.theta[1] == doctest::Approx(mc.theta[1]).epsilon(1e-4));
}

TEST_CASE("minimum chi-square is optimal against the binned mle fit") {
  DistributionSpec family = DistributionSpec::parse("gamma(?,?)");
  Distribution truth = DistributionSpec::parse("gamma(3,0.5)").bind();
  RngStream rng(77);
  Eigen::ArrayXd data = truth.sample(400, rng);
  Eigen::ArrayXd edges = equal_prob_edges(truth, 8);
  Eigen::ArrayXd counts = bin_counts(data, edges);
  Eigen::ArrayXd start = default_start(family, data);

  FitResult mc = minimum_chisq(family, counts, edges, StatisticKind::Pearson, start);
  FitResult ml = binned_mle(family, counts, edges, start);
  double stat_at_mle =
      chisq_stat(StatisticKind::Pearson, counts,
                 counts.sum() * bin_probabilities(family.bind(ml.theta), edges).max(1e-12));
  CHECK(mc.objective <= stat_at_mle + 1e-8);
}

TEST_CASE("unbinned mle closed forms") {
  DistributionSpec normal = DistributionSpec::parse("normal(?,?)");
  FitResult fit = unbinned_mle(normal, arr({0.0, 2.0}));
  CHECK(fit.theta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.theta[1] == doctest::Approx(1.0).epsilon(1e-12));

  DistributionSpec expf = DistributionSpec::parse("exp(?)");
  FitResult efit = unbinned_mle(expf, arr({1.0, 3.0, 2.0}));
  CHECK(efit.theta[0] == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS(unbinned_mle(expf, arr({1.0, -2.0})));
  CHECK_THROWS(unbinned_mle(normal, Eigen::ArrayXd()));
}

TEST_CASE("mixture mle recovers the weight at n=1000") {
  DistributionSpec family = DistributionSpec::parse("?*normal(?,?) + ?*normal(?,?)");
  Eigen::ArrayXd truth = arr({1.0 / 3.0, 0.0, 1.0, 5.0, 2.0});
  Distribution d = family.bind(truth);
  RngStream rng(5150);
  Eigen::ArrayXd data = d.sample(1000, rng);
  FitResult fit = unbinned_mle(family, data);
  CHECK(fit.converged);
  CHECK(fit.theta[0] == doctest::Approx(1.0 / 3.0).epsilon(0.3));  // within +-0.1
  CHECK(std::abs(fit.theta[0] - 1.0 / 3.0) <= 0.1);
  CHECK(fit.theta[1] < fit.theta[3]);  // canonical component order
}

TEST_CASE("consistency at large n") {
  RngStream rng(99);
  for (const char* text : {"exp(?)", "normal(?,?)"}) {
    DistributionSpec family = DistributionSpec::parse(text);
    Eigen::ArrayXd truth =
        family.free_parameter_count() == 1 ? arr({1.5}) : arr({2.0, 0.5});
    Distribution d = family.bind(truth);
    Eigen::ArrayXd data = d.sample(100000, rng);
    FitResult fit = unbinned_mle(family, data);
    for (int i = 0; i < truth.size(); ++i) {
      // 5 Monte Carlo standard errors, with sd(theta_hat) ~ c/sqrt(n)
      CHECK(std::abs(fit.theta[i] - truth[i]) < 5.0 * 2.0 / std::sqrt(100000.0));
    }
  }
}

TEST_CASE("reparameterization invariance of the fit") {
  // fitting the same family through a rescaled parameterization must land on
  // the same distribution: exp(?) vs gamma(1-ish shape fixed) is not in the
  // catalog, so compare exp(?) fit started from two different points instead
  DistributionSpec family = DistributionSpec::parse("exp(?)");
  Eigen::ArrayXd edges = arr({0.0, 0.4, 1.1, 2.5, INFINITY});
  Eigen::ArrayXd counts = arr({30, 35, 20, 15});
  FitResult a = minimum_chisq(family, counts, edges, StatisticKind::Pearson, arr({0.2}));
  FitResult b = minimum_chisq(family, counts, edges, StatisticKind::Pearson, arr({4.0}));
  CHECK(a.theta[0] == doctest::Approx(b.theta[0]).epsilon(2e-5));
}

TEST_CASE("default starts are inside the domain") {
  Eigen::ArrayXd data = arr({0.5, 1.5, 2.5, 3.5, 9.0});
  for (const char* text :
       {"normal(?,?)", "exp(?)", "gamma(?,?)", "beta(?,?)", "t(?)", "uniform(?,?)",
        "linear(?)", "?*normal(?,?) + ?*normal(?,?)"}) {
    DistributionSpec family = DistributionSpec::parse(text);
    Eigen::ArrayXd start = default_start(family, data);
    CHECK(start.size() == family.free_parameter_count());
    if (family.components()[0].family == Family::Beta ||
        family.components()[0].family == Family::Linear) {
      // data outside [0,1]; the start must still bind
      CHECK_NOTHROW(family.bind(family.from_unconstrained(family.to_unconstrained(start))));
      continue;
    }
    CHECK_NOTHROW(family.bind(start));
  }

  // no data: family defaults
  Eigen::ArrayXd start = default_start(DistributionSpec::parse("normal(?,?)"), Eigen::ArrayXd());
  CHECK(start[0] == 0.0);
  CHECK(start[1] == 1.0);

  // binned midpoint moments: exp rate ~ 1/m
  DistributionSpec expf = DistributionSpec::parse("exp(?)");
  Eigen::ArrayXd bstart =
      default_start_binned(expf, arr({50, 30, 20}), arr({0.0, 1.0, 2.0, 4.0}));
  double midpoint_mean = (50 * 0.5 + 30 * 1.5 + 20 * 3.0) / 100.0;
  CHECK(bstart[0] == doctest::Approx(1.0 / midpoint_mean).epsilon(1e-9));
}

TEST_CASE("degenerate binned input is rejected") {
  DistributionSpec family = DistributionSpec::parse("exp(?)");
  Eigen::ArrayXd edges = arr({0.0, 1.0, 2.0, INFINITY});
  CHECK_THROWS(binned_mle(family, arr({100, 0, 0}), edges, arr({1.0})));
}
