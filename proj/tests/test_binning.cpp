#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chisqalt/binning.hpp"
#include "chisqalt/spec_parser.hpp"

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

TEST_CASE("equal probability edges") {
  Eigen::ArrayXd u4 = equal_prob_edges(dist("uniform(0,1)"), 4);
  CHECK(u4.size() == 5);
  for (int i = 0; i <= 4; ++i) CHECK(u4[i] == doctest::Approx(0.25 * i).epsilon(1e-12));

  Eigen::ArrayXd e3 = equal_prob_edges(dist("exp(1)"), 3);
  CHECK(e3[0] == 0.0);
  CHECK(e3[1] == doctest::Approx(0.40546510810816438).epsilon(1e-10));
  CHECK(e3[2] == doctest::Approx(1.0986122886681097).epsilon(1e-10));
  CHECK(std::isinf(e3[3]));

  Eigen::ArrayXd n2 = equal_prob_edges(dist("normal(0,1)"), 2);
  CHECK(std::isinf(n2[0]));
  CHECK(n2[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isinf(n2[2]));

  CHECK_THROWS(equal_prob_edges(dist("normal(0,1)"), 1));
}

TEST_CASE("equal size edges") {
  Eigen::ArrayXd u4 = equal_size_edges(dist("uniform(0,1)"), 4);
  for (int i = 0; i <= 4; ++i) CHECK(u4[i] == doctest::Approx(0.25 * i).epsilon(1e-12));

  // unbounded side: interior edges spread over the 0.5%/99.5% working range
  Eigen::ArrayXd e3 = equal_size_edges(dist("exp(1)"), 3);
  CHECK(e3[0] == 0.0);
  CHECK(e3[1] == doctest::Approx(1.7694474833983751).epsilon(1e-9));
  CHECK(e3[2] == doctest::Approx(3.5338824249732059).epsilon(1e-9));
  CHECK(std::isinf(e3[3]));

  Eigen::ArrayXd b5 = equal_size_edges(dist("beta(2,4)"), 5);
  for (int i = 0; i <= 5; ++i) CHECK(b5[i] == doctest::Approx(0.2 * i).epsilon(1e-12));
}

TEST_CASE("edge interpolation") {
  Eigen::ArrayXd e0 = equal_prob_edges(dist("exp(1)"), 3);
  Eigen::ArrayXd e1 = equal_size_edges(dist("exp(1)"), 3);
  CHECK((interpolate_edges(e0, e1, 0.0) == e0).all());
  CHECK((interpolate_edges(e0, e1, 1.0) == e1).all());

  Eigen::ArrayXd mid = interpolate_edges(e0, e1, 0.5);
  CHECK(mid[1] == doctest::Approx(1.0874562957532697).epsilon(1e-9));
  CHECK(mid[2] == doctest::Approx(2.3162473568206578).epsilon(1e-9));
  CHECK(std::isinf(mid[3]));

  // degenerate interpolation
  for (double kappa : {0.0, 0.25, 0.5, 1.0}) {
    Eigen::ArrayXd same = interpolate_edges(e0, e0, kappa);
    for (Eigen::Index i = 0; i < e0.size(); ++i)
      if (std::isfinite(e0[i])) CHECK(same[i] == doctest::Approx(e0[i]).epsilon(1e-14));
  }

  CHECK_THROWS(interpolate_edges(e0, arr({0.0, 1.0}), 0.5));
  Eigen::ArrayXd bad_inf = e1;
  bad_inf[3] = 10.0;
  CHECK_THROWS(interpolate_edges(e0, bad_inf, 0.5));

  // strict monotonicity over the whole kappa range, across the catalog
  for (const char* text : {"normal(0,1)", "gamma(3,0.5)", "beta(2,4)", "t(5)", "exp(1)"}) {
    Distribution d = dist(text);
    for (int k : {2, 5, 12}) {
      Eigen::ArrayXd a = equal_prob_edges(d, k);
      Eigen::ArrayXd b = equal_size_edges(d, k);
      for (double kappa = 0.0; kappa <= 1.0; kappa += 0.1) {
        Eigen::ArrayXd e = interpolate_edges(a, b, kappa);
        for (Eigen::Index i = 1; i < e.size(); ++i) CHECK(e[i - 1] < e[i]);
      }
    }
  }
}

TEST_CASE("bin probabilities") {
  CHECK((bin_probabilities(dist("uniform(0,1)"), arr({0, 0.25, 0.5, 0.75, 1})) - 0.25)
            .abs()
            .maxCoeff() < 1e-12);
  Eigen::ArrayXd lin = bin_probabilities(dist("linear(0.2)"), arr({0, 0.5, 1}));
  CHECK(lin[0] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(lin[1] == doctest::Approx(0.55).epsilon(1e-12));
  Eigen::ArrayXd te = bin_probabilities(dist("exp(1) | [0, 1]"), arr({0, 0.5, 1}));
  CHECK(te[0] == doctest::Approx(0.62245933120185456).epsilon(1e-10));
  CHECK(te[1] == doctest::Approx(0.37754066879814544).epsilon(1e-10));

  // equal-prob edges produce 1/k within 1e-8 across the catalog
  for (const char* text :
       {"uniform(0,1)", "normal(0,1)", "t(5)", "beta(2,4)", "gamma(3,0.5)", "exp(1)",
        "linear(0.2)"}) {
    Distribution d = dist(text);
    for (int k = 2; k <= 30; ++k) {
      Eigen::ArrayXd probs = bin_probabilities(d, equal_prob_edges(d, k));
      CHECK((probs - 1.0 / k).abs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("bin counts and the half-open convention") {
  Eigen::ArrayXd counts = bin_counts(arr({0.1, 0.2, 0.9}), arr({0, 0.5, 1}));
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 1);

  CHECK(bin_counts(Eigen::ArrayXd(), arr({0, 0.5, 1})).sum() == 0);

  // value on an interior edge goes right; the last bin is closed
  Eigen::ArrayXd edge_tie = bin_counts(arr({0.5}), arr({0, 0.5, 1}));
  CHECK(edge_tie[0] == 0);
  CHECK(edge_tie[1] == 1);
  Eigen::ArrayXd last = bin_counts(arr({1.0}), arr({0, 0.5, 1}));
  CHECK(last[1] == 1);

  Eigen::Index outside = 0;
  Eigen::ArrayXd with_oor = bin_counts(arr({-0.5, 0.2, 1.5}), arr({0, 0.5, 1}), &outside);
  CHECK(outside == 2);
  CHECK(with_oor.sum() == 1);
}

TEST_CASE("admissibility") {
  Eigen::ArrayXd quarter = arr({0.25, 0.25, 0.25, 0.25});
  CHECK(admissible(1000, quarter));
  CHECK_FALSE(admissible(12, quarter));
  CHECK(admissible(20, quarter));  // boundary E = 5 accepted
}

TEST_CASE("histogram scheme merges to E >= 5") {
  Distribution unif = dist("uniform(0,1)");
  BinningScheme full = histogram_scheme(unif, 1000, 50);
  CHECK(full.k == 50);

  BinningScheme merged = histogram_scheme(unif, 100, 50);
  CHECK(admissible(100, merged.null_probs));
  CHECK(merged.k == 16);  // 15 triples and a final five-bin group
  for (int i = 0; i < 15; ++i)
    CHECK(merged.edges[i + 1] - merged.edges[i] == doctest::Approx(0.06).epsilon(1e-9));
  CHECK(merged.edges[16] - merged.edges[15] == doctest::Approx(0.10).epsilon(1e-9));

  BinningScheme boundary = histogram_scheme(unif, 10, 2);
  CHECK(boundary.k == 2);

  CHECK_THROWS(histogram_scheme(unif, 9, 50));

  // the invariant holds for an unbounded-support null too
  BinningScheme norm = histogram_scheme(dist("normal(0,1)"), 200, 50);
  CHECK(admissible(200, norm.null_probs));
}

TEST_CASE("snapping ideal edges to data edges") {
  Eigen::ArrayXd available(11);
  for (int i = 0; i <= 10; ++i) available[i] = 0.1 * i;

  Eigen::ArrayXd snapped = snap_to_data_edges(arr({0, 0.33, 0.66, 1}), available);
  CHECK(snapped[0] == 0.0);
  CHECK(snapped[1] == doctest::Approx(0.3));
  CHECK(snapped[2] == doctest::Approx(0.7));
  CHECK(snapped[3] == 1.0);

  // already aligned edges stay put
  Eigen::ArrayXd aligned = snap_to_data_edges(arr({0, 0.3, 0.6, 1}), available);
  CHECK(aligned[1] == doctest::Approx(0.3));
  CHECK(aligned[2] == doctest::Approx(0.6));

  // collision resolved rightward
  Eigen::ArrayXd collide = snap_to_data_edges(arr({0, 0.14, 0.16, 1}), available);
  CHECK(collide[1] == doctest::Approx(0.1));
  CHECK(collide[2] == doctest::Approx(0.2));

  // a nearest-edge tie goes right (eighths are exactly representable)
  Eigen::ArrayXd eighths(9);
  for (int i = 0; i <= 8; ++i) eighths[i] = i / 8.0;
  Eigen::ArrayXd tie = snap_to_data_edges(arr({0, 0.1875, 0.6875, 1}), eighths);
  CHECK(tie[1] == 0.25);
  CHECK(tie[2] == 0.75);

  CHECK_THROWS(snap_to_data_edges(arr({0, 0.2, 0.4, 0.6, 1}), arr({0, 0.5, 1})));
}

TEST_CASE("binned csv round trip and validation") {
  BinnedData data;
  data.edges = arr({-INFINITY, 0, 1.5, INFINITY});
  data.counts = arr({3, 10, 7});
  std::stringstream ss;
  write_binned_csv(ss, data);
  BinnedData back = read_binned_csv(ss);
  CHECK(back.counts.size() == 3);
  CHECK((back.counts == data.counts).all());
  CHECK(std::isinf(back.edges[0]));
  CHECK(back.edges[2] == doctest::Approx(1.5));

  std::stringstream bad_header("a,b,c\n0,1,5\n");
  CHECK_THROWS(read_binned_csv(bad_header));
  std::stringstream gap("lower,upper,count\n0,1,5\n2,3,5\n");
  CHECK_THROWS(read_binned_csv(gap));
  std::stringstream negative("lower,upper,count\n0,1,-2\n");
  CHECK_THROWS(read_binned_csv(negative));
}
