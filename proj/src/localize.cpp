#include "pvchart/localize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pvchart {

PValue two_sided_combine(PValue p_le, PValue p_ge) {
  return PValue(std::min(1.0, 2.0 * std::min(p_le.value(), p_ge.value())));
}

PValue aggregate_p(const std::vector<double>& two_sided, AggregateMethod method) {
  if (two_sided.empty()) throw std::invalid_argument("p-value list must be nonempty");
  const double d = static_cast<double>(two_sided.size());
  if (method == AggregateMethod::bonferroni) {
    double min_p = 1.0;
    for (double p : two_sided) min_p = std::min(min_p, PValue(p).value());
    return PValue(std::min(1.0, d * min_p));
  }
  double sum = 0.0;
  for (double p : two_sided) sum += PValue(p).value();
  return PValue(std::min(1.0, std::min(2.0, d) / d * sum));
}

std::set<std::size_t> holm_reject(const std::vector<double>& p, double alpha) {
  if (p.empty()) throw std::invalid_argument("p-value list must be nonempty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  const std::size_t d = p.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t k_star = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (p[order[i]] <= alpha / static_cast<double>(d - i)) {
      k_star = i + 1;
    } else {
      break;
    }
  }
  std::set<std::size_t> rejected;
  for (std::size_t i = 0; i < k_star; ++i) rejected.insert(order[i]);
  return rejected;
}

std::set<std::size_t> closed_testing_oracle(const std::vector<double>& p, double alpha) {
  if (p.empty()) throw std::invalid_argument("p-value list must be nonempty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  const std::size_t d = p.size();
  if (d > 20) throw std::invalid_argument("oracle enumeration capped at d = 20");

  std::vector<bool> locally_rejected(1ull << d, false);
  for (std::uint64_t mask = 1; mask < (1ull << d); ++mask) {
    double min_p = 1.0;
    int size = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if ((mask >> j) & 1ull) {
        min_p = std::min(min_p, p[j]);
        ++size;
      }
    }
    locally_rejected[mask] = min_p <= alpha / static_cast<double>(size);
  }

  std::set<std::size_t> rejected;
  for (std::size_t j = 0; j < d; ++j) {
    bool all = true;
    for (std::uint64_t mask = 1; mask < (1ull << d); ++mask) {
      if (((mask >> j) & 1ull) && !locally_rejected[mask]) {
        all = false;
        break;
      }
    }
    if (all) rejected.insert(j);
  }
  return rejected;
}

LocalisationReport localise(const DirectionalPValues& dp, double alpha, AggregateMethod method) {
  if (dp.p_le.empty() || dp.p_le.size() != dp.p_ge.size())
    throw std::invalid_argument("directional p-values need one (le, ge) pair per coordinate");

  LocalisationReport report;
  report.two_sided.reserve(dp.dimension());
  for (std::size_t j = 0; j < dp.dimension(); ++j)
    report.two_sided.push_back(two_sided_combine(PValue(dp.p_le[j]), PValue(dp.p_ge[j])).value());

  report.aggregate = aggregate_p(report.two_sided, method);
  report.alarm = report.aggregate.value() <= alpha;
  if (!report.alarm) return report;

  report.rejected_coords = holm_reject(report.two_sided, alpha);
  for (std::size_t j : report.rejected_coords)
    report.directional_set.emplace_back(
        j, dp.p_le[j] <= dp.p_ge[j] ? Direction::below : Direction::above);
  return report;
}

}  // namespace pvchart
