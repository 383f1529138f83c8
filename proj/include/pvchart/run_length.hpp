#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pvchart/chart.hpp"
#include "pvchart/core.hpp"

namespace pvchart {

// Lower bound on the expected time to first alarm assuming only that every
// chart statistic is a valid p-value: 1/(2*alpha) + 1/2.
double arl_bound_superuniform(double alpha);

// Lower bound on the expected time to the k-th alarm under the same
// assumption: (nu+1)*(1 - alpha*nu/(2k)) with nu = floor(k/alpha).
double karl_bound_superuniform(double alpha, int k);

// Sharper bound k/alpha, valid when the statistics are super-uniform
// conditionally on the past.
double karl_bound_conditional(double alpha, int k);

double applicable_bound(bool conditionally_valid, double alpha, int k);

// One fresh p-value stream per replication; must be deterministic in the
// replication index.
using PValueStream = std::function<double()>;
using StreamFactory = std::function<PValueStream(std::uint64_t rep)>;

struct RunLengthSample {
  std::vector<std::int64_t> times_to_k;  // uncensored replications only
  std::int64_t censored_count = 0;
  std::int64_t max_horizon = 0;
  std::size_t reps = 0;
};

struct RunLengthSummary {
  double mean = 0.0;       // over uncensored runs; NaN when all censored
  double std_error = 0.0;  // sample SD / sqrt(#uncensored)
  std::optional<double> bound;
  std::optional<double> ratio;
  std::int64_t censored_count = 0;
  bool censored = false;
  // mean of min(R_k, horizon) over all replications: a valid lower bound for
  // the k-ARL even under censoring.
  double mean_lower_bound = 0.0;
};

RunLengthSample estimate_run_length(const StreamFactory& source, const ChartKind& kind,
                                    const AlarmRule& rule, std::size_t reps,
                                    std::int64_t max_horizon, int threads = 1);

RunLengthSummary summarize_run_lengths(const RunLengthSample& sample,
                                       std::optional<double> bound = std::nullopt);

}  // namespace pvchart
