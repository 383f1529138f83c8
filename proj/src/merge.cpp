#include "pvchart/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pvchart {

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("weight vector must be nonempty");
  double sum = 0.0;
  double max_w = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || w > 1.0) throw std::invalid_argument("weights must lie in [0,1]");
    sum += w;
    max_w = std::max(max_w, w);
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
  max_weight_ = max_w;
}

WeightVector WeightVector::uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("weight vector must be nonempty");
  std::vector<double> w(m, 1.0 / static_cast<double>(m));
  // Nudge the last entry so the sum is exactly 1 in floating point.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) sum += w[i];
  w[m - 1] = 1.0 - sum;
  return WeightVector(std::move(w));
}

double generalized_mean(double r, const WeightVector& w, std::span<const double> p) {
  validate_merge_exponent(r);
  if (p.empty()) throw std::invalid_argument("p-value list must be nonempty");
  if (p.size() != w.size()) throw std::invalid_argument("weights and p-values differ in length");
  for (double v : p) {
    if (!(v >= 0.0) || v > 1.0 + PValue::kTol)
      throw std::invalid_argument("p-values must lie in [0,1]");
  }

  if (r > 0.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += w.weights()[i] * std::pow(p[i], r);
    return std::pow(s, 1.0 / r);
  }

  // r < 0: p^r can overflow, so accumulate log(w_t) + r*log(p_t) instead.
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  logs.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double wt = w.weights()[i];
    if (wt == 0.0) continue;
    if (p[i] == 0.0) return 0.0;  // limit of the formula
    const double lt = std::log(wt) + r * std::log(p[i]);
    logs.push_back(lt);
    max_log = std::max(max_log, lt);
  }
  double s = 0.0;
  for (double lt : logs) s += std::exp(lt - max_log);
  const double log_mean = max_log + std::log(s);
  return std::exp(log_mean / r);
}

double merge_constant(double r, double max_weight) {
  validate_merge_exponent(r);
  if (r >= 1.0) return std::pow(std::min(1.0 + r, 1.0 / max_weight), 1.0 / r);
  return std::pow(1.0 + r, 1.0 / r);
}

double valid_merge(double r, const WeightVector& w, std::span<const double> p) {
  return merge_constant(r, w.max_weight()) * generalized_mean(r, w, p);
}

PValue bonferroni_merge(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("p-value list must be nonempty");
  double min_p = 1.0;
  for (double v : p) min_p = std::min(min_p, PValue(v).value());
  return PValue(std::min(1.0, static_cast<double>(p.size()) * min_p));
}

}  // namespace pvchart
