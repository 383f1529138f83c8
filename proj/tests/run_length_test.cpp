#include <doctest.h>

#include <cmath>

#include "pvchart/dgp.hpp"
#include "pvchart/run_length.hpp"

using namespace pvchart;

TEST_CASE("distribution-free bounds on worked values") {
  CHECK(std::fabs(arl_bound_superuniform(0.01) - 50.5) <= 1e-12);
  CHECK(std::fabs(arl_bound_superuniform(0.05) - 10.5) <= 1e-12);
  CHECK(arl_bound_superuniform(1.0) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(std::fabs(karl_bound_superuniform(0.01, 5) - 250.5) <= 1e-12);
  CHECK(std::fabs(karl_bound_superuniform(0.05, 5) - 50.5) <= 1e-12);
  CHECK(std::fabs(karl_bound_superuniform(0.05, 1) - 10.5) <= 1e-12);

  CHECK(std::fabs(karl_bound_conditional(0.01, 1) - 100.0) <= 1e-12);
  CHECK(std::fabs(karl_bound_conditional(0.01, 5) - 500.0) <= 1e-12);
  CHECK(std::fabs(karl_bound_conditional(0.05, 1) - 20.0) <= 1e-12);

  CHECK_THROWS_AS(arl_bound_superuniform(0.0), std::invalid_argument);
  CHECK_THROWS_AS(karl_bound_superuniform(1.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(karl_bound_conditional(0.05, 0), std::invalid_argument);
}

TEST_CASE("bound hierarchy over a dense grid") {
  for (int ai = 1; ai <= 200; ++ai) {
    const double alpha = ai / 200.0;
    for (int k : {1, 2, 3, 5, 10}) {
      const double sharp = karl_bound_superuniform(alpha, k);
      CHECK(sharp >= k / (2.0 * alpha) + 0.5 - 1e-9);
      CHECK(karl_bound_conditional(alpha, k) >= sharp - 1e-9);
    }
    CHECK(karl_bound_superuniform(alpha, 1) >= arl_bound_superuniform(alpha) - 1e-9);
  }
  CHECK(applicable_bound(true, 0.05, 1) == karl_bound_conditional(0.05, 1));
  CHECK(applicable_bound(false, 0.05, 1) == karl_bound_superuniform(0.05, 1));
}

TEST_CASE("geometric sanity of the estimator") {
  const AlarmRule rule(0.05, 1);
  const auto sample =
      estimate_run_length(iid_uniform_source(5), RawChart{}, rule, 20000, 1000000, 2);
  const auto summary = summarize_run_lengths(sample, karl_bound_conditional(0.05, 1));
  CHECK(sample.censored_count == 0);
  CHECK(std::fabs(summary.mean - 20.0) <= 3.0 * summary.std_error);
  CHECK(summary.ratio.has_value());
}

TEST_CASE("an always-alarming source hits k alarms in exactly k steps") {
  StreamFactory zeros = [](std::uint64_t) -> PValueStream {
    return []() { return 0.0; };
  };
  const auto sample = estimate_run_length(zeros, RawChart{}, AlarmRule(0.01, 5), 50, 1000, 1);
  REQUIRE(sample.times_to_k.size() == 50);
  for (std::int64_t r : sample.times_to_k) CHECK(r == 5);
}

TEST_CASE("identical seeds and configs reproduce bit-identical samples") {
  const AlarmRule rule(0.1, 2);
  const auto a = estimate_run_length(two_phase_normal_source(77), QBarEwma{0.9, 1.0}, rule, 200,
                                     20000, 1);
  const auto b = estimate_run_length(two_phase_normal_source(77), QBarEwma{0.9, 1.0}, rule, 200,
                                     20000, 2);
  CHECK(a.times_to_k == b.times_to_k);
  CHECK(a.censored_count == b.censored_count);
}

TEST_CASE("censoring is visible and the lower bound stays valid") {
  StreamFactory ones = [](std::uint64_t) -> PValueStream {
    return []() { return 1.0; };
  };
  const auto sample = estimate_run_length(ones, RawChart{}, AlarmRule(0.05, 1), 10, 5, 1);
  CHECK(sample.censored_count == 10);
  CHECK(sample.times_to_k.empty());
  const auto summary = summarize_run_lengths(sample, 10.5);
  CHECK(summary.censored);
  CHECK(std::isnan(summary.mean));
  CHECK_FALSE(summary.ratio.has_value());
  CHECK(summary.mean_lower_bound == doctest::Approx(5.0));
}

TEST_CASE("conditionally valid smoothing keeps the sharp ARL bound") {
  const AlarmRule rule(0.2, 1);
  const auto sample = estimate_run_length(iid_uniform_source(99), QBarEwma{0.9, 1.0}, rule, 2000,
                                          100000, 2);
  REQUIRE(sample.censored_count == 0);
  const auto summary = summarize_run_lengths(sample, karl_bound_conditional(0.2, 1));
  CHECK(summary.mean >= 1.0 / 0.2 - 3.0 * summary.std_error);
}

TEST_CASE("estimated means respect the bound for in-control sources") {
  struct Case {
    StreamFactory factory;
    bool conditional;
  };
  const AlarmRule rule(0.05, 1);
  const Case cases[] = {{iid_uniform_source(3), true},
                        {one_phase_normal_source(3), true},
                        {two_phase_normal_source(3), false},
                        {ar1_source(0.5, 0.0, Ar1PValue::sup, 3), true},
                        {ar1_source(0.5, 0.0, Ar1PValue::marginal, 3), false}};
  for (const Case& c : cases) {
    const double bound = applicable_bound(c.conditional, rule.alpha, rule.k);
    const auto sample = estimate_run_length(c.factory, RawChart{}, rule, 2000, 100000, 2);
    const auto summary = summarize_run_lengths(sample, bound);
    CHECK(summary.mean >= bound - 3.0 * summary.std_error);
  }
}
