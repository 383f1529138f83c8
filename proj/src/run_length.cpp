#include "pvchart/run_length.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace pvchart {

namespace {

void check_rule_args(double alpha, int k) {
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

}  // namespace

double arl_bound_superuniform(double alpha) {
  check_rule_args(alpha, 1);
  return 0.5 / alpha + 0.5;
}

double karl_bound_superuniform(double alpha, int k) {
  check_rule_args(alpha, k);
  // Nudge before flooring: k/alpha = 100 must not floor to 99 because alpha
  // is not exactly representable.
  const double nu = std::floor(static_cast<double>(k) / alpha + 1e-9);
  return (nu + 1.0) * (1.0 - alpha * nu / (2.0 * static_cast<double>(k)));
}

double karl_bound_conditional(double alpha, int k) {
  check_rule_args(alpha, k);
  return static_cast<double>(k) / alpha;
}

double applicable_bound(bool conditionally_valid, double alpha, int k) {
  return conditionally_valid ? karl_bound_conditional(alpha, k)
                             : karl_bound_superuniform(alpha, k);
}

RunLengthSample estimate_run_length(const StreamFactory& source, const ChartKind& kind,
                                    const AlarmRule& rule, std::size_t reps,
                                    std::int64_t max_horizon, int threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (max_horizon < 1) throw std::invalid_argument("max_horizon must be >= 1");
  validate_kind(kind);
  if (threads < 1) threads = 1;

  // -1 marks a censored replication; aggregation below is ordered by
  // replication index, so the result is independent of the thread count.
  std::vector<std::int64_t> outcome(reps, -1);

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      PValueStream stream = source(static_cast<std::uint64_t>(rep));
      ChartState chart(kind);
      int alarms = 0;
      for (std::int64_t step = 1; step <= max_horizon; ++step) {
        const ChartStatistic stat = chart.step(PValue(stream()), rule);
        if (stat.alarm && ++alarms == rule.k) {
          outcome[rep] = step;
          break;
        }
      }
    }
  };

  if (threads == 1 || reps < 2) {
    worker(0, reps);
  } else {
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(threads), reps);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const std::size_t chunk = (reps + n_threads - 1) / n_threads;
    for (std::size_t i = 0; i < n_threads; ++i) {
      const std::size_t begin = i * chunk;
      const std::size_t end = std::min(reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  RunLengthSample sample;
  sample.max_horizon = max_horizon;
  sample.reps = reps;
  for (std::int64_t r : outcome) {
    if (r < 0)
      ++sample.censored_count;
    else
      sample.times_to_k.push_back(r);
  }
  return sample;
}

RunLengthSummary summarize_run_lengths(const RunLengthSample& sample,
                                       std::optional<double> bound) {
  RunLengthSummary summary;
  summary.censored_count = sample.censored_count;
  summary.censored = sample.censored_count > 0;
  summary.bound = bound;

  double censored_total = 0.0;
  const std::size_t n = sample.times_to_k.size();
  if (n == 0) {
    summary.mean = std::numeric_limits<double>::quiet_NaN();
    summary.std_error = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (std::int64_t r : sample.times_to_k) sum += static_cast<double>(r);
    summary.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::int64_t r : sample.times_to_k) {
      const double d = static_cast<double>(r) - summary.mean;
      ss += d * d;
    }
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    summary.std_error = sd / std::sqrt(static_cast<double>(n));
    censored_total = sum;
  }
  censored_total +=
      static_cast<double>(sample.censored_count) * static_cast<double>(sample.max_horizon);
  summary.mean_lower_bound =
      sample.reps > 0 ? censored_total / static_cast<double>(sample.reps) : 0.0;

  if (bound && n > 0 && *bound > 0.0) summary.ratio = summary.mean / *bound;
  return summary;
}

}  // namespace pvchart
