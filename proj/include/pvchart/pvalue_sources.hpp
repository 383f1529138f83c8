#pragma once

#include <cmath>
#include <vector>

#include "pvchart/core.hpp"
#include "pvchart/normal.hpp"

namespace pvchart {

// Two-sided p-value for a standard normal test statistic, 2*(1 - Phi(|z|)),
// computed as erfc(|z|/sqrt(2)) to avoid cancellation.
inline PValue z_two_sided_p(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("test statistic must be finite");
  return PValue(std::erfc(std::fabs(z) * M_SQRT1_2));
}

// Baseline-with-reuse comparison of a single monitoring draw against a single
// reference draw: z = (x_t - x_0)/sqrt(2).
inline PValue two_phase_normal_p(double x0, double xt) {
  return z_two_sided_p((xt - x0) * M_SQRT1_2);
}

// Supremum over all admissible autoregression coefficients of the one-lag
// residual p-value; closed form 2*(1 - Phi(sqrt([x_t^2 - x_{t-1}^2]_+))).
inline PValue ar1_sup_p(double xt, double xprev) {
  if (!std::isfinite(xt) || !std::isfinite(xprev))
    throw std::invalid_argument("observations must be finite");
  const double gap = xt * xt - xprev * xprev;
  return z_two_sided_p(gap > 0.0 ? std::sqrt(gap) : 0.0);
}

struct TwoSampleData {
  std::vector<double> baseline;  // reference sample, size n0
  std::vector<double> current;   // monitoring sample, size nt
};

enum class TestMode { exact, asymptotic, auto_select };

// p-value plus a flag recording whether an exact computation was replaced by
// an asymptotic approximation (ties, or sample sizes beyond the exact cutoff).
struct SourcePValue {
  PValue p;
  bool approximate;
};

// Two-sample Kolmogorov-Smirnov test. Exact mode counts lattice paths below
// the observed deviation (valid for untied data); asymptotic mode applies the
// Kolmogorov limit at effective size n0*nt/(n0+nt). auto_select picks exact
// when n0*nt <= 10^4 and the pooled data has no ties.
SourcePValue ks_two_sample_p(const TwoSampleData& data, TestMode mode = TestMode::auto_select);

enum class ShiftDirection { greater, less };

// One-sided Mann-Whitney test of a location shift of the current sample
// relative to baseline. direction = greater: small p-values indicate the
// current sample is stochastically larger. Exact null distribution when
// n0*nt <= 10^4 and no ties; otherwise tie-corrected normal approximation
// with continuity correction.
SourcePValue mann_whitney_one_sided_p(const TwoSampleData& data, ShiftDirection direction,
                                      TestMode mode = TestMode::auto_select);

// Survival function of the Kolmogorov limit distribution.
double kolmogorov_sf(double x);

}  // namespace pvchart
