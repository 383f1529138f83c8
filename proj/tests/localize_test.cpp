#include <doctest.h>

#include <cmath>

#include "pvchart/dgp.hpp"
#include "pvchart/localize.hpp"
#include "pvchart/rng.hpp"

using namespace pvchart;

TEST_CASE("two-sided combination") {
  CHECK(two_sided_combine(PValue(0.01), PValue(0.7)).value() ==
        doctest::Approx(0.02).epsilon(1e-14));
  CHECK(two_sided_combine(PValue(0.6), PValue(0.6)).value() == 1.0);
  CHECK(two_sided_combine(PValue(0.0), PValue(1.0)).value() == 0.0);
}

TEST_CASE("aggregate p-values") {
  const std::vector<double> p = {0.02, 0.5, 0.9};
  CHECK(aggregate_p(p, AggregateMethod::bonferroni).value() ==
        doctest::Approx(0.06).epsilon(1e-14));
  CHECK(aggregate_p(p, AggregateMethod::arithmetic).value() ==
        doctest::Approx(2.0 / 3.0 * 1.42).epsilon(1e-12));
  CHECK(aggregate_p({0.3}, AggregateMethod::arithmetic).value() ==
        doctest::Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(aggregate_p({}, AggregateMethod::bonferroni), std::invalid_argument);
}

TEST_CASE("step-down rejections on worked values") {
  CHECK(holm_reject({0.01, 0.02, 0.5}, 0.05) == std::set<std::size_t>{0, 1});
  CHECK(holm_reject({0.2, 0.3, 0.4}, 0.05).empty());
  CHECK(holm_reject({0.001, 0.001, 0.001, 0.001}, 0.05) == std::set<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(holm_reject({}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(holm_reject({0.5}, 1.0), std::invalid_argument);
}

TEST_CASE("closure oracle on worked values") {
  CHECK(closed_testing_oracle({0.01, 0.02, 0.5}, 0.05) == std::set<std::size_t>{0, 1});
  CHECK(closed_testing_oracle({0.04}, 0.05) == std::set<std::size_t>{0});
  CHECK(closed_testing_oracle({1.0, 1.0, 1.0}, 0.05).empty());
  CHECK_THROWS_AS(closed_testing_oracle(std::vector<double>(21, 0.5), 0.05),
                  std::invalid_argument);
}

TEST_CASE("step-down equals the closure oracle, ties included") {
  Rng rng(400, 0);
  for (std::size_t d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 2000; ++rep) {
      std::vector<double> p(d);
      for (double& v : p) {
        v = rng.next_unit() < 0.3 ? 0.02 * static_cast<double>(1 + rng.next_u64() % 5)
                                  : rng.next_unit();
      }
      const double alpha = 0.01 + 0.2 * rng.next_unit();
      CHECK(holm_reject(p, alpha) == closed_testing_oracle(p, alpha));
    }
  }
}

TEST_CASE("shrinking a p-value never shrinks the rejection set") {
  Rng rng(401, 0);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> p(4);
    for (double& v : p) v = rng.next_unit();
    const auto before = holm_reject(p, 0.1);
    const std::size_t j = rng.next_u64() % 4;
    p[j] *= 0.5 * rng.next_unit();
    const auto after = holm_reject(p, 0.1);
    for (std::size_t idx : before) CHECK(after.count(idx) == 1);
  }
}

TEST_CASE("full localisation trace") {
  DirectionalPValues dp;
  dp.p_le = {0.001, 0.4, 0.9};
  dp.p_ge = {0.99, 0.6, 0.002};
  const LocalisationReport report = localise(dp, 0.05, AggregateMethod::bonferroni);
  REQUIRE(report.two_sided.size() == 3);
  CHECK(report.two_sided[0] == doctest::Approx(0.002).epsilon(1e-12));
  CHECK(report.two_sided[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(report.two_sided[2] == doctest::Approx(0.004).epsilon(1e-12));
  CHECK(report.aggregate.value() == doctest::Approx(0.006).epsilon(1e-12));
  CHECK(report.alarm);
  CHECK(report.rejected_coords == std::set<std::size_t>{0, 2});
  REQUIRE(report.directional_set.size() == 2);
  CHECK(report.directional_set[0].first == 0);
  CHECK(report.directional_set[0].second == Direction::below);
  CHECK(report.directional_set[1].first == 2);
  CHECK(report.directional_set[1].second == Direction::above);
}

TEST_CASE("no alarm means empty rejection sets") {
  DirectionalPValues dp;
  dp.p_le = {1.0, 1.0};
  dp.p_ge = {1.0, 1.0};
  const LocalisationReport report = localise(dp, 0.05);
  CHECK_FALSE(report.alarm);
  CHECK(report.rejected_coords.empty());
  CHECK(report.directional_set.empty());
}

TEST_CASE("single-coordinate reduction and direction ties") {
  DirectionalPValues dp;
  dp.p_le = {0.01};
  dp.p_ge = {0.99};
  const LocalisationReport report = localise(dp, 0.05);
  CHECK(report.aggregate.value() == doctest::Approx(0.02).epsilon(1e-12));
  REQUIRE(report.directional_set.size() == 1);
  CHECK(report.directional_set[0].second == Direction::below);

  DirectionalPValues tie;
  tie.p_le = {0.002};
  tie.p_ge = {0.002};
  const LocalisationReport tied = localise(tie, 0.05);
  REQUIRE(tied.directional_set.size() == 1);
  CHECK(tied.directional_set[0].second == Direction::below);
}

TEST_CASE("aggregates stay super-uniform under independent uniforms") {
  Rng rng(402, 0);
  const int reps = 20000;
  for (AggregateMethod method : {AggregateMethod::bonferroni, AggregateMethod::arithmetic}) {
    std::vector<double> agg;
    agg.reserve(reps);
    for (int i = 0; i < reps; ++i) {
      std::vector<double> p(3);
      for (double& v : p) v = rng.next_unit();
      agg.push_back(aggregate_p(p, method).value());
    }
    for (double alpha : {0.05, 0.2, 0.5}) {
      const double hits = static_cast<double>(
          std::count_if(agg.begin(), agg.end(), [&](double v) { return v <= alpha; }));
      const double se = std::sqrt(alpha * (1.0 - alpha) / reps);
      CHECK(hits / reps <= alpha + 3.0 * se);
    }
  }
}

TEST_CASE("family-wise error control at a single step, quick version") {
  const double alpha = 0.05;
  const int reps = 4000;
  auto factory = mv_normal_source(0.0, 0.5, 2025);
  int errors = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const LocalisationReport report = localise(factory(static_cast<std::uint64_t>(rep))(), alpha);
    if (!report.directional_set.empty()) ++errors;
  }
  const double se = std::sqrt(alpha * (1.0 - alpha) / reps);
  CHECK(static_cast<double>(errors) / reps <= alpha + 3.0 * se);
}
