#pragma once

#include <span>
#include <vector>

#include "pvchart/core.hpp"

namespace pvchart {

// Normalised weights for merging dependent p-values. Weights must already
// sum to one (tolerance 1e-12); off vectors are rejected, not renormalised.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t m);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double max_weight() const { return max_weight_; }

 private:
  std::vector<double> weights_;
  double max_weight_;
};

// Weighted generalised mean (sum_t w_t p_t^r)^(1/r) for r > -1, r != 0.
// For r < 0 the powers run through log-sum-exp; any zero p-value with
// positive weight yields the limiting value 0.
double generalized_mean(double r, const WeightVector& w, std::span<const double> p);

// Multiplier that turns the generalised mean into a valid merged p-value:
// (1+r)^(1/r) on (-1,1)\{0}, min{1+r, 1/w_max}^(1/r) for r >= 1.
double merge_constant(double r, double max_weight);

// merge_constant(r, w_max) * generalized_mean(r, w, p). May exceed 1; the
// caller clamps when interpreting the result as a p-value.
double valid_merge(double r, const WeightVector& w, std::span<const double> p);

// min{1, m * min_t p_t}.
PValue bonferroni_merge(std::span<const double> p);

}  // namespace pvchart
