#include "pvchart/ewma.hpp"

#include <cmath>
#include <limits>

namespace pvchart {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
}

}  // namespace

WeightVector ewma_weights(double lambda, std::int64_t t) {
  check_lambda(lambda);
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(t));
  w[0] = std::pow(1.0 - lambda, static_cast<double>(t - 1));
  for (std::int64_t s = 2; s <= t; ++s)
    w[static_cast<std::size_t>(s - 1)] = lambda * std::pow(1.0 - lambda, static_cast<double>(t - s));
  // Close the floating-point gap so the vector passes the sum-to-one check.
  double sum = 0.0;
  for (double v : w) sum += v;
  w.back() += 1.0 - sum;
  return WeightVector(std::move(w));
}

double q_constant(QVariant variant, double lambda, double r, std::int64_t t) {
  check_lambda(lambda);
  validate_merge_exponent(r);
  if (t < 1) throw std::invalid_argument("t must be >= 1");

  switch (variant) {
    case QVariant::q: {
      if (r >= 1.0) {
        const double w_max = std::max(lambda, std::pow(1.0 - lambda, static_cast<double>(t - 1)));
        return std::pow(std::min(1.0 + r, 1.0 / w_max), 1.0 / r);
      }
      return std::pow(1.0 + r, 1.0 / r);
    }
    case QVariant::q_tilde: {
      if (r >= 1.0) return std::pow(std::min(1.0 + r, 1.0 / lambda), 1.0 / r);
      return std::pow(1.0 + r, 1.0 / r);
    }
    case QVariant::q_bar: {
      if (r < 1.0) throw std::invalid_argument("conditionally valid chart requires r >= 1");
      return std::pow(lambda, -1.0 / r);
    }
  }
  throw std::logic_error("unreachable");
}

std::int64_t q_constant_settling_time(double lambda) {
  check_lambda(lambda);
  auto decay = [&](std::int64_t t) {
    return std::pow(1.0 - lambda, static_cast<double>(t - 1));
  };
  std::int64_t t =
      1 + static_cast<std::int64_t>(std::ceil(std::log(lambda) / std::log1p(-lambda)));
  t = std::max<std::int64_t>(t, 1);
  while (decay(t) > lambda) ++t;
  while (t > 1 && decay(t - 1) <= lambda) --t;
  return t;
}

EwmaState::EwmaState(QVariant variant, double lambda, double r)
    : variant_(variant), lambda_(lambda), r_(r) {
  check_lambda(lambda);
  validate_merge_exponent(r);
  if (variant == QVariant::q_bar && r < 1.0)
    throw std::invalid_argument("conditionally valid chart requires r >= 1");
}

double EwmaState::step(PValue p) {
  const double pr = std::pow(p.value(), r_);  // +inf when p = 0 and r < 0
  if (t_ == 0) {
    s_ = pr;
    comp_ = 0.0;
  } else if (std::isinf(pr) || std::isinf(s_)) {
    s_ = std::numeric_limits<double>::infinity();
    comp_ = 0.0;
  } else {
    const double a = lambda_ * pr;
    const double b = (1.0 - lambda_) * s_;
    const double sum = a + b;
    const double err = (std::fabs(a) >= std::fabs(b)) ? (a - sum) + b : (b - sum) + a;
    comp_ = (1.0 - lambda_) * comp_ + err;
    s_ = sum;
  }
  ++t_;
  const double s_total = s_ + comp_;
  if (std::isinf(s_total)) return 0.0;  // zero p-value under r < 0
  return q_constant(variant_, lambda_, r_, t_) * std::pow(s_total, 1.0 / r_);
}

double calibrate_p_to_e(double beta, PValue p) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
  if (p.value() == 0.0) return std::numeric_limits<double>::infinity();
  return beta * std::pow(p.value(), beta - 1.0);
}

EValueState::EValueState(double lambda, double beta) : lambda_(lambda), beta_(beta) {
  check_lambda(lambda);
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
}

PValue EValueState::step(PValue p) {
  const double e = calibrate_p_to_e(beta_, p);
  if (t_ == 0) {
    e_ = e;
  } else if (std::isinf(e) || std::isinf(e_)) {
    e_ = std::numeric_limits<double>::infinity();
  } else {
    e_ = lambda_ * e + (1.0 - lambda_) * e_;
  }
  ++t_;
  if (std::isinf(e_)) return PValue(0.0);
  return PValue(std::min(1.0, 1.0 / e_));
}

}  // namespace pvchart
