#pragma once

#include <cstdint>

#include "pvchart/core.hpp"
#include "pvchart/merge.hpp"

namespace pvchart {

enum class QVariant { q, q_tilde, q_bar };

// Weights of the smoothing recursion after t steps: the first input carries
// (1-lambda)^(t-1), later inputs lambda*(1-lambda)^(t-s). Sums to 1.
WeightVector ewma_weights(double lambda, std::int64_t t);

// Validity-restoring multiplier for each chart variant. The time-dependent
// variant uses w_max = max{lambda, (1-lambda)^(t-1)} in closed form.
double q_constant(QVariant variant, double lambda, double r, std::int64_t t);

// Smallest t at which (1-lambda)^(t-1) <= lambda, i.e. the time-dependent
// constant stops differing from the time-homogeneous one.
std::int64_t q_constant_settling_time(double lambda);

// State of the smoothed power recursion S_1 = p_1^r, S_t = lambda*p_t^r +
// (1-lambda)*S_{t-1}. The running value is kept with a scaled compensation
// term to limit drift over long runs.
class EwmaState {
 public:
  EwmaState(QVariant variant, double lambda, double r);

  // Advances one step and returns the uncapped chart statistic
  // constant * S^(1/r). A zero p-value with r < 0 yields 0.
  double step(PValue p);

  std::int64_t time() const { return t_; }
  double s_value() const { return s_ + comp_; }
  QVariant variant() const { return variant_; }
  double lambda() const { return lambda_; }
  double r() const { return r_; }

 private:
  QVariant variant_;
  double lambda_;
  double r_;
  std::int64_t t_ = 0;
  double s_ = 0.0;
  double comp_ = 0.0;
};

// p-to-e calibrator beta * p^(beta-1) for beta in (0,1); p = 0 maps to +inf.
double calibrate_p_to_e(double beta, PValue p);

// Convex e-value smoothing: E_tilde_1 = E_1, E_tilde_t = lambda*E_t +
// (1-lambda)*E_tilde_{t-1}; the chart output is min{1, 1/E_tilde}.
class EValueState {
 public:
  EValueState(double lambda, double beta);

  PValue step(PValue p);

  std::int64_t time() const { return t_; }
  double e_value() const { return e_; }

 private:
  double lambda_;
  double beta_;
  std::int64_t t_ = 0;
  double e_ = 0.0;
};

}  // namespace pvchart
