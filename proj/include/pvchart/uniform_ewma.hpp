#pragma once

#include <cstdint>
#include <vector>

namespace pvchart {

// Exact distribution of the smoothing recursion driven by IID Unif(0,1)
// inputs from a fixed start value u0: U_t = lambda*u_t + (1-lambda)*U_{t-1}.
// Evaluation cost grows like 2^t, so t is capped; beyond the cap callers
// should fall back to Monte Carlo.
struct UniformEwmaSpec {
  static constexpr int t_cap = 22;

  double lambda;
  int t;
  double u0;

  UniformEwmaSpec(double lambda_, int t_, double u0_);

  double support_lower() const { return support_lower_; }
  double support_upper() const { return support_upper_; }

 private:
  double support_lower_;
  double support_upper_;
};

double uniform_ewma_pdf(const UniformEwmaSpec& spec, double u);

double uniform_ewma_cdf(const UniformEwmaSpec& spec, double u);

// Closed-form mean 1/2 + (1-lambda)^t (u0 - 1/2) and variance
// lambda*(1 - (1-lambda)^(2t)) / (12*(2-lambda)).
struct UniformEwmaMoments {
  double mean;
  double variance;
};
UniformEwmaMoments uniform_ewma_moments(const UniformEwmaSpec& spec);

// Verifies cdf(alpha) <= alpha over a grid of levels in [0, 1/2]. Only
// meaningful for u0 >= 1/2; smaller starts are rejected.
struct LeftTailReport {
  bool pass;
  double max_excess;
  double worst_alpha;
};
LeftTailReport left_tail_check(const UniformEwmaSpec& spec, const std::vector<double>& alphas,
                               double tolerance = 1e-9);

}  // namespace pvchart
