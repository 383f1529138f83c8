#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "pvchart/core.hpp"

namespace pvchart {

enum class Direction { below, above };  // reject "no downward shift" / "no upward shift"

// One-sided p-value pair per coordinate: p_le tests against a downward shift,
// p_ge against an upward shift. Coordinates are 0-based.
struct DirectionalPValues {
  std::vector<double> p_le;
  std::vector<double> p_ge;

  std::size_t dimension() const { return p_le.size(); }
};

enum class AggregateMethod { bonferroni, arithmetic };

// min{1, 2*min(p_le, p_ge)}.
PValue two_sided_combine(PValue p_le, PValue p_ge);

// Bonferroni: min{1, d*min_j p_j}. Arithmetic: min{1, min{2,d}/d * sum_j p_j}.
PValue aggregate_p(const std::vector<double>& two_sided, AggregateMethod method);

// Holm's step-down rejections at level alpha: indices of the k* smallest
// p-values, where k* is the largest k with p_(i) <= alpha/(d-i+1) for all
// i <= k. Equal p-values are ordered by coordinate index; the returned set is
// tie-invariant because it is determined by order statistics.
std::set<std::size_t> holm_reject(const std::vector<double>& p, double alpha);

// Closed testing with Bonferroni local tests, by full 2^d enumeration:
// rejects j iff every subset containing j satisfies min_{i in S} p_i <=
// alpha/|S|. Validation oracle only; d is capped at 20.
std::set<std::size_t> closed_testing_oracle(const std::vector<double>& p, double alpha);

struct LocalisationReport {
  std::vector<double> two_sided;
  PValue aggregate{1.0};
  bool alarm = false;
  std::set<std::size_t> rejected_coords;
  std::vector<std::pair<std::size_t, Direction>> directional_set;
};

// Full per-step procedure: combine one-sided pairs, aggregate, alarm when the
// aggregate is <= alpha, then Holm rejections with direction assignment
// (ties between the one-sided p-values resolve to `below`).
LocalisationReport localise(const DirectionalPValues& dp, double alpha,
                            AggregateMethod method = AggregateMethod::bonferroni);

}  // namespace pvchart
