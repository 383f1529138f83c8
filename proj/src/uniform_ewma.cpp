#include "pvchart/uniform_ewma.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pvchart/detail/double_double.hpp"

namespace pvchart {

namespace {

using detail::DD;
using detail::dd_add;
using detail::dd_div;
using detail::dd_mul;
using detail::dd_neg;
using detail::dd_npow;
using detail::dd_sub;
using detail::two_sum;

// Bernoulli numbers B_2, B_4, ..., B_22 as exact rationals.
constexpr std::array<std::array<double, 2>, 11> kBernoulli = {{{1.0, 6.0},
                                                               {-1.0, 30.0},
                                                               {1.0, 42.0},
                                                               {-1.0, 30.0},
                                                               {5.0, 66.0},
                                                               {-691.0, 2730.0},
                                                               {7.0, 6.0},
                                                               {-3617.0, 510.0},
                                                               {43867.0, 798.0},
                                                               {-174611.0, 330.0},
                                                               {854513.0, 138.0}}};

double binom(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(acc);
}

// Central moments (orders 0..max_order) of sum_i a_i*U_i, via cumulants.
// Odd central moments vanish by symmetry.
std::vector<DD> central_moments(const std::vector<DD>& a, int max_order) {
  std::vector<DD> kappa(static_cast<std::size_t>(max_order) + 1, DD(0.0));
  for (int j = 2; j <= max_order; j += 2) {
    DD power_sum(0.0);
    for (const DD& ai : a) power_sum = dd_add(power_sum, dd_npow(ai, j));
    const auto& b = kBernoulli[static_cast<std::size_t>(j / 2 - 1)];
    kappa[static_cast<std::size_t>(j)] =
        dd_mul(dd_div(DD(b[0]), DD(b[1] * static_cast<double>(j))), power_sum);
  }
  std::vector<DD> mom(static_cast<std::size_t>(max_order) + 1, DD(0.0));
  mom[0] = DD(1.0);
  for (int n = 2; n <= max_order; ++n) {
    DD acc(0.0);
    for (int j = 2; j <= n; j += 2)
      acc = dd_add(acc, dd_mul(dd_mul(DD(binom(n - 1, j - 1)), kappa[static_cast<std::size_t>(j)]),
                               mom[static_cast<std::size_t>(n - j)]));
    mom[static_cast<std::size_t>(n)] = acc;
  }
  return mom;
}

struct Condensation {
  int dropped;            // k smallest components folded into a moment expansion
  double predicted_error;
};

// The raw inclusion-exclusion sum cancels catastrophically when the
// components span many orders of magnitude (large lambda, large t). Folding
// the smallest components into an exact moment expansion of the remaining
// integrand keeps the alternating sum over the big components only. The
// selector balances the certified fold-boundary error against double-double
// roundoff of the remaining 2^b-term sum.
Condensation choose_condensation(const std::vector<double>& asc, double x, int e) {
  const int t = static_cast<int>(asc.size());
  const double log2c = std::log(2.0);
  const double eps_dd = std::log(3e-31);
  std::vector<double> log_prefix(static_cast<std::size_t>(t) + 1, 0.0);
  std::vector<double> prefix_sum(static_cast<std::size_t>(t) + 1, 0.0);
  for (int i = 0; i < t; ++i) {
    log_prefix[static_cast<std::size_t>(i) + 1] =
        log_prefix[static_cast<std::size_t>(i)] + std::log(asc[static_cast<std::size_t>(i)]);
    prefix_sum[static_cast<std::size_t>(i) + 1] =
        prefix_sum[static_cast<std::size_t>(i)] + asc[static_cast<std::size_t>(i)];
  }
  const int k_max = std::min(t - 1, e - 1);
  int best_k = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const int b = t - k;
    const int m = e - k;
    const double log_norm =
        -(std::lgamma(static_cast<double>(m) + 1.0) +
          (log_prefix[static_cast<std::size_t>(t)] - log_prefix[static_cast<std::size_t>(k)]));
    const double lg_round = b * log2c + m * std::log(std::max(x, 1e-300)) + eps_dd + log_norm;
    double err = std::exp(std::min(700.0, lg_round));
    if (k > 0) {
      const double delta = prefix_sum[static_cast<std::size_t>(k)];
      const double lg_bound = b * log2c + m * std::log(delta) - log2c + log_norm;
      err += std::exp(std::min(700.0, lg_bound));
    }
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }
  return Condensation{best_k, best_err};
}

// E[[y - W]_+^m] with W the folded small-component sum: exact binomial-moment
// expansion when the positive part never kinks (y >= delta), a certified
// midpoint sandwich inside the kink zone.
DD folded_expectation(const DD& y, int m, const DD& delta, const DD& mu,
                      const std::vector<DD>& mom, const std::vector<double>& coef_idx) {
  if (!(y.hi > 0.0)) return DD(0.0);
  if (m == 0) return DD(1.0);
  if (delta.hi == 0.0) return dd_npow(y, m);
  if (y.value() >= delta.value()) {
    const DD ym = dd_sub(y, mu);
    const DD z = dd_mul(ym, ym);
    const int q = m / 2;
    DD acc = dd_mul(DD(coef_idx[0]), mom[0]);
    for (int i = 1; i <= q; ++i)
      acc = dd_add(dd_mul(acc, z), dd_mul(DD(coef_idx[static_cast<std::size_t>(i)]),
                                          mom[static_cast<std::size_t>(2 * i)]));
    if (m % 2 == 1) acc = dd_mul(acc, ym);
    return acc;
  }
  const DD low = dd_sub(y, delta);
  DD hi_term = dd_npow(y, m);
  if (low.hi > 0.0) hi_term = dd_add(hi_term, dd_npow(low, m));
  return dd_mul(DD(0.5), hi_term);
}

// Signed subset sum over the retained components (Gray-code order), times
// the 1/(m! * prod_B a) normalisation.
double eval_distribution(const std::vector<DD>& comps_asc, const DD& x, int e) {
  const int t = static_cast<int>(comps_asc.size());
  if (!(x.hi > 0.0)) return 0.0;

  std::vector<double> asc(comps_asc.size());
  for (std::size_t i = 0; i < comps_asc.size(); ++i) asc[i] = comps_asc[i].value();
  const Condensation plan = choose_condensation(asc, x.hi, e);
  const int k = plan.dropped;
  const int b = t - k;
  const int m = e - k;

  std::vector<DD> small(comps_asc.begin(), comps_asc.begin() + k);
  DD delta(0.0);
  for (const DD& a : small) delta = dd_add(delta, a);
  const DD mu = dd_mul(DD(0.5), delta);
  std::vector<DD> mom = central_moments(small, m);

  std::vector<double> coef(static_cast<std::size_t>(m / 2) + 1);
  for (int i = 0; i <= m / 2; ++i) coef[static_cast<std::size_t>(i)] = binom(m, 2 * i);

  DD acc = folded_expectation(x, m, delta, mu, mom, coef);  // empty subset
  DD a_beta(0.0);
  int sign = 1;
  const std::uint64_t n_subsets = 1ull << b;
  for (std::uint64_t idx = 1; idx < n_subsets; ++idx) {
    const int bit = std::countr_zero(idx);
    const std::uint64_t gray = idx ^ (idx >> 1);
    const DD& a = comps_asc[static_cast<std::size_t>(k + bit)];
    if ((gray >> bit) & 1ull)
      a_beta = dd_add(a_beta, a);
    else
      a_beta = dd_sub(a_beta, a);
    sign = -sign;
    const DD y = dd_sub(x, a_beta);
    if (!(y.hi > 0.0)) continue;
    const DD term = folded_expectation(y, m, delta, mu, mom, coef);
    acc = dd_add(acc, sign > 0 ? term : dd_neg(term));
  }

  DD norm(1.0);
  for (int i = 2; i <= m; ++i) norm = dd_mul(norm, DD(static_cast<double>(i)));
  for (int i = k; i < t; ++i) norm = dd_mul(norm, comps_asc[static_cast<std::size_t>(i)]);
  return dd_div(acc, norm).value();
}

struct Decomposition {
  std::vector<DD> comps_asc;  // lambda*(1-lambda)^(t-s), ascending in size
  DD offset;                  // (1-lambda)^t * u0
  DD total;                   // support width
};

Decomposition decompose(const UniformEwmaSpec& spec) {
  const DD one_minus_lambda = two_sum(1.0, -spec.lambda);
  Decomposition d;
  d.comps_asc.resize(static_cast<std::size_t>(spec.t));
  DD a(spec.lambda);
  for (int s = spec.t; s >= 1; --s) {
    d.comps_asc[static_cast<std::size_t>(s - 1)] = a;
    a = dd_mul(a, one_minus_lambda);
  }
  d.offset = dd_mul(dd_npow(one_minus_lambda, spec.t), DD(spec.u0));
  d.total = DD(0.0);
  for (const DD& c : d.comps_asc) d.total = dd_add(d.total, c);
  return d;
}

void check_capacity(const UniformEwmaSpec& spec) {
  if (spec.t > UniformEwmaSpec::t_cap)
    throw std::domain_error(
        "exact evaluation is capped at t = 22 (2^t subset terms); use Monte Carlo instead");
}

}  // namespace

UniformEwmaSpec::UniformEwmaSpec(double lambda_, int t_, double u0_)
    : lambda(lambda_), t(t_), u0(u0_) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  if (!(u0 >= 0.0 && u0 <= 1.0)) throw std::invalid_argument("u0 must be in [0,1]");
  const double decay = std::pow(1.0 - lambda, static_cast<double>(t));
  support_lower_ = decay * u0;
  support_upper_ = 1.0 - decay * (1.0 - u0);
}

double uniform_ewma_pdf(const UniformEwmaSpec& spec, double u) {
  check_capacity(spec);
  const Decomposition d = decompose(spec);
  const DD x = dd_sub(DD(u), d.offset);
  if (!(x.hi > 0.0) || x.value() >= d.total.value()) return 0.0;
  if (spec.t == 1) return 1.0 / spec.lambda;
  return std::max(0.0, eval_distribution(d.comps_asc, x, spec.t - 1));
}

double uniform_ewma_cdf(const UniformEwmaSpec& spec, double u) {
  check_capacity(spec);
  const Decomposition d = decompose(spec);
  const DD x = dd_sub(DD(u), d.offset);
  if (!(x.hi > 0.0)) return 0.0;
  if (x.value() >= d.total.value()) return 1.0;
  const double v = eval_distribution(d.comps_asc, x, spec.t);
  return std::clamp(v, 0.0, 1.0);
}

UniformEwmaMoments uniform_ewma_moments(const UniformEwmaSpec& spec) {
  const double decay = std::pow(1.0 - spec.lambda, static_cast<double>(spec.t));
  const double mean = 0.5 + decay * (spec.u0 - 0.5);
  const double variance =
      spec.lambda * (1.0 - decay * decay) / (12.0 * (2.0 - spec.lambda));
  return UniformEwmaMoments{mean, variance};
}

LeftTailReport left_tail_check(const UniformEwmaSpec& spec, const std::vector<double>& alphas,
                               double tolerance) {
  if (spec.u0 < 0.5)
    throw std::invalid_argument("left-tail guarantee requires u0 >= 1/2");
  LeftTailReport report{true, -std::numeric_limits<double>::infinity(), 0.0};
  for (double alpha : alphas) {
    if (alpha < 0.0 || alpha > 0.5)
      throw std::invalid_argument("left-tail levels must lie in [0, 1/2]");
    const double excess = uniform_ewma_cdf(spec, alpha) - alpha;
    if (excess > report.max_excess) {
      report.max_excess = excess;
      report.worst_alpha = alpha;
    }
  }
  report.pass = report.max_excess <= tolerance;
  return report;
}

}  // namespace pvchart
