#include "pvchart/dgp.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "pvchart/pvalue_sources.hpp"
#include "pvchart/rng.hpp"

namespace pvchart {

namespace {

// 3x3 equicorrelation Cholesky factor, unit diagonal variances.
struct Chol3 {
  std::array<std::array<double, 3>, 3> l{};

  explicit Chol3(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must be in [0,1)");
    l[0][0] = 1.0;
    l[1][0] = rho;
    l[1][1] = std::sqrt(1.0 - rho * rho);
    l[2][0] = rho;
    l[2][1] = rho * (1.0 - rho) / l[1][1];
    const double rest = 1.0 - rho * rho - l[2][1] * l[2][1];
    if (!(rest > 0.0)) throw std::invalid_argument("correlation matrix not positive definite");
    l[2][2] = std::sqrt(rest);
  }

  std::array<double, 3> sample(Rng& rng) const {
    const std::array<double, 3> g = {rng.next_normal(), rng.next_normal(), rng.next_normal()};
    std::array<double, 3> x{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) x[static_cast<std::size_t>(i)] += l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
    return x;
  }
};

double chisq(Rng& rng, int dof) {
  double acc = 0.0;
  for (int i = 0; i < dof; ++i) acc += rng.next_chisq1();
  return acc;
}

}  // namespace

StreamFactory iid_uniform_source(std::uint64_t seed) {
  return [seed](std::uint64_t rep) -> PValueStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    return [rng]() { return rng->next_unit(); };
  };
}

StreamFactory one_phase_normal_source(std::uint64_t seed) {
  return [seed](std::uint64_t rep) -> PValueStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    return [rng]() { return z_two_sided_p(rng->next_normal()).value(); };
  };
}

StreamFactory two_phase_normal_source(std::uint64_t seed) {
  return [seed](std::uint64_t rep) -> PValueStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    const double x0 = rng->next_normal();
    return [rng, x0]() { return two_phase_normal_p(x0, rng->next_normal()).value(); };
  };
}

StreamFactory ar1_source(double ar_coeff, double delta, Ar1PValue which, std::uint64_t seed) {
  if (!(std::fabs(ar_coeff) < 1.0))
    throw std::invalid_argument("autoregression coefficient must lie in (-1,1)");
  return [=](std::uint64_t rep) -> PValueStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    auto prev = std::make_shared<double>(rng->next_normal());
    const double noise_sd = std::sqrt(1.0 - ar_coeff * ar_coeff);
    return [rng, prev, ar_coeff, delta, noise_sd, which]() {
      const double x = delta + ar_coeff * *prev + noise_sd * rng->next_normal();
      const double p = which == Ar1PValue::marginal ? z_two_sided_p(x).value()
                                                    : ar1_sup_p(x, *prev).value();
      *prev = x;
      return p;
    };
  };
}

StreamFactory ks_source(int n0, KsOoc ooc, std::uint64_t seed) {
  if (n0 <= 10) throw std::invalid_argument("n0 must exceed 10 so sample sizes stay positive");
  return [=](std::uint64_t rep) -> PValueStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    auto baseline = std::make_shared<std::vector<double>>();
    baseline->reserve(static_cast<std::size_t>(n0));
    for (int i = 0; i < n0; ++i) baseline->push_back(rng->next_normal());
    return [rng, baseline, n0, ooc]() {
      const int nt = rng->next_int(n0 - 10, n0 + 10);
      TwoSampleData data;
      data.baseline = *baseline;
      data.current.reserve(static_cast<std::size_t>(nt));
      using F = KsOoc::Family;
      double step_mean = 0.0, step_sd = 1.0;
      if (ooc.family == F::dyn_mean) step_mean = std::sqrt(ooc.param) * rng->next_normal();
      if (ooc.family == F::dyn_var)
        step_sd = std::sqrt(chisq(*rng, static_cast<int>(ooc.param)));
      for (int i = 0; i < nt; ++i) {
        double x;
        switch (ooc.family) {
          case F::none:
            x = rng->next_normal();
            break;
          case F::shift:
            x = ooc.param + rng->next_normal();
            break;
          case F::scale:
            x = std::sqrt(ooc.param) * rng->next_normal();
            break;
          case F::cauchy:
            x = rng->next_cauchy();
            break;
          case F::dyn_mean:
            x = step_mean + rng->next_normal();
            break;
          case F::dyn_var:
            x = step_sd * rng->next_normal();
            break;
          default:
            throw std::logic_error("unknown family");
        }
        data.current.push_back(x);
      }
      return ks_two_sample_p(data).p.value();
    };
  };
}

DirectionalFactory mv_normal_source(double delta, double rho, std::uint64_t seed) {
  const Chol3 chol(rho);
  return [=](std::uint64_t rep) -> DirectionalStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    const std::array<double, 3> mu = {delta, 0.0, -delta};
    return [rng, chol, mu]() {
      const auto z = chol.sample(*rng);
      DirectionalPValues dp;
      for (int j = 0; j < 3; ++j) {
        const double x = mu[static_cast<std::size_t>(j)] + z[static_cast<std::size_t>(j)];
        dp.p_le.push_back(norm_cdf(x));
        dp.p_ge.push_back(norm_sf(x));
      }
      return dp;
    };
  };
}

DirectionalFactory mv_cauchy_source(double delta, double rho, int n0, std::uint64_t seed) {
  if (n0 <= 10) throw std::invalid_argument("n0 must exceed 10 so sample sizes stay positive");
  const Chol3 chol(rho);
  return [=](std::uint64_t rep) -> DirectionalStream {
    auto rng = std::make_shared<Rng>(seed, rep << 3);
    auto draw = [chol](Rng& r, const std::array<double, 3>& loc) {
      const auto g = chol.sample(r);
      const double scale = 1.0 / std::sqrt(r.next_chisq1());
      return std::array<double, 3>{loc[0] + g[0] * scale, loc[1] + g[1] * scale,
                                   loc[2] + g[2] * scale};
    };
    auto baseline = std::make_shared<std::array<std::vector<double>, 3>>();
    for (int i = 0; i < n0; ++i) {
      const auto x = draw(*rng, {0.0, 0.0, 0.0});
      for (int j = 0; j < 3; ++j) (*baseline)[static_cast<std::size_t>(j)].push_back(x[static_cast<std::size_t>(j)]);
    }
    const std::array<double, 3> mu = {delta, 0.0, -delta};
    return [rng, baseline, draw, mu, n0]() {
      const int nt = rng->next_int(n0 - 10, n0 + 10);
      std::array<std::vector<double>, 3> current;
      for (int i = 0; i < nt; ++i) {
        const auto x = draw(*rng, mu);
        for (int j = 0; j < 3; ++j) current[static_cast<std::size_t>(j)].push_back(x[static_cast<std::size_t>(j)]);
      }
      DirectionalPValues dp;
      for (int j = 0; j < 3; ++j) {
        TwoSampleData data{(*baseline)[static_cast<std::size_t>(j)], current[static_cast<std::size_t>(j)]};
        dp.p_ge.push_back(mann_whitney_one_sided_p(data, ShiftDirection::greater).p.value());
        dp.p_le.push_back(mann_whitney_one_sided_p(data, ShiftDirection::less).p.value());
      }
      return dp;
    };
  };
}

StreamFactory aggregate_stream(DirectionalFactory source, AggregateMethod method) {
  return [source = std::move(source), method](std::uint64_t rep) -> PValueStream {
    auto stream = std::make_shared<DirectionalStream>(source(rep));
    return [stream, method]() {
      const DirectionalPValues dp = (*stream)();
      std::vector<double> two_sided;
      two_sided.reserve(dp.dimension());
      for (std::size_t j = 0; j < dp.dimension(); ++j)
        two_sided.push_back(two_sided_combine(PValue(dp.p_le[j]), PValue(dp.p_ge[j])).value());
      return aggregate_p(two_sided, method).value();
    };
  };
}

}  // namespace pvchart
