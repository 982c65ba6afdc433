#include <doctest.h>

#include <cmath>

#include "chisqalt/edf.hpp"
#include "chisqalt/rng.hpp"

using namespace chisqalt;

namespace {

Distribution dist(const char* text) { return DistributionSpec::parse(text).bind(); }

Eigen::ArrayXd arr(std::initializer_list<double> values) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

}  // namespace

TEST_CASE("hand-evaluated statistics") {
  Distribution unif = dist("uniform(0,1)");
  CHECK(edf_statistic(EdfKind::KS, arr({0.25, 0.75}), unif) ==
        doctest::Approx(0.25).epsilon(1e-12));

  Eigen::ArrayXd half = arr({0.5});
  CHECK(edf_statistic(EdfKind::AD, half, unif) ==
        doctest::Approx(0.38629436111989062).epsilon(1e-12));
  CHECK(edf_statistic(EdfKind::ZK, half, unif) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(edf_statistic(EdfKind::ZC, half, unif) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(edf_statistic(EdfKind::ZA, half, unif) ==
        doctest::Approx(2.7725887222397812).epsilon(1e-12));
}

TEST_CASE("probability integral transform invariance") {
  Distribution f = dist("gamma(3,0.5)");
  Distribution unif = dist("uniform(0,1)");
  RngStream rng(101);
  Eigen::ArrayXd data = f.sample(200, rng);
  Eigen::ArrayXd transformed(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) transformed[i] = f.cdf(data[i]);
  for (EdfKind kind : kAllEdfKinds)
    CHECK(edf_statistic(kind, data, f) ==
          doctest::Approx(edf_statistic(kind, transformed, unif)).epsilon(1e-10));
}

TEST_CASE("statistic ranges") {
  RngStream rng(102);
  Distribution f = dist("normal(0,1)");
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::ArrayXd data = f.sample(50, rng);
    double ks = edf_statistic(EdfKind::KS, data, f);
    CHECK(ks >= 0.0);
    CHECK(ks <= 1.0);
    CHECK(edf_statistic(EdfKind::AD, data, f) >= 0.0);
    CHECK(edf_statistic(EdfKind::ZA, data, f) >= 0.0);
    CHECK(edf_statistic(EdfKind::ZC, data, f) >= 0.0);
    CHECK(edf_statistic(EdfKind::ZK, data, f) >= 0.0);
  }
}

TEST_CASE("simulated p-value conventions") {
  DistributionSpec null_spec = DistributionSpec::parse("uniform(0,1)");
  RngStream rng(7);
  Eigen::ArrayXd data = null_spec.bind().sample(40, rng);

  RngStream s1(2000), s2(2000);
  SimulatedPValue a = simulated_pvalue(EdfKind::KS, data, null_spec, 199, s1);
  SimulatedPValue b = simulated_pvalue(EdfKind::KS, data, null_spec, 199, s2);
  CHECK(a.pvalue == b.pvalue);  // deterministic given the stream
  CHECK(a.pvalue >= 1.0 / 200.0);
  CHECK(a.pvalue <= 1.0);

  // an observed statistic above every replicate gets the floor p-value
  Eigen::ArrayXd extreme = Eigen::ArrayXd::Constant(40, 0.999);
  RngStream s3(2001);
  SimulatedPValue ext = simulated_pvalue(EdfKind::KS, extreme, null_spec, 199, s3);
  CHECK(ext.pvalue == doctest::Approx(1.0 / 200.0));

  CHECK_THROWS(simulated_pvalue(EdfKind::KS, data, null_spec, 50, s3));
}

TEST_CASE("composite null p-value is calibrated") {
  // normal family, data from the null: rejection at 5% within 3 sigma
  DistributionSpec null_spec = DistributionSpec::parse("normal(?,?)");
  Distribution truth = dist("normal(2,3)");
  RngStream root(99);
  const int trials = 200, B = 99;
  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream trial_stream = root.substream(t);
    Eigen::ArrayXd data = truth.sample(60, trial_stream);
    RngStream sim = trial_stream.substream(1);
    SimulatedPValue res = simulated_pvalue(EdfKind::AD, data, null_spec, B, sim);
    CHECK(res.theta.size() == 2);
    if (res.pvalue <= 0.05) ++rejections;
  }
  double rate = static_cast<double>(rejections) / trials;
  CHECK(rate < 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / trials));
}

TEST_CASE("poisson sample-size mode draws random sizes") {
  DistributionSpec null_spec = DistributionSpec::parse("uniform(0,1)");
  RngStream rng(55);
  Eigen::ArrayXd data = null_spec.bind().sample(100, rng);
  RngStream sim(56);
  SimulatedPValue res = simulated_pvalue(EdfKind::KS, data, null_spec, 199, sim,
                                         SampleSizeMode::PoissonSize, 100.0);
  CHECK(res.pvalue > 0.0);
  CHECK(res.pvalue <= 1.0);
}
