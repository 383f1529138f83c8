#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "pvchart/ewma.hpp"
#include "pvchart/rng.hpp"

using namespace pvchart;

namespace {

// Adaptive Simpson quadrature, used as an independent integration oracle.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(b), f(m), tol, 48);
}

}  // namespace

TEST_CASE("smoothing weights") {
  const auto w3 = ewma_weights(0.5, 3).weights();
  REQUIRE(w3.size() == 3);
  CHECK(w3[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(w3[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(w3[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ewma_weights(0.5, 1).weights() == std::vector<double>{1.0});
  const auto w2 = ewma_weights(0.1, 2).weights();
  CHECK(w2[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(w2[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(ewma_weights(0.5, 0), std::invalid_argument);
}

TEST_CASE("variant constants") {
  CHECK(q_constant(QVariant::q_tilde, 0.9, 1.0, 1) == doctest::Approx(1.0 / 0.9).epsilon(1e-14));
  CHECK(q_constant(QVariant::q, 0.5, 1.0, 1) == 1.0);
  CHECK(q_constant(QVariant::q_bar, 0.25, 2.0, 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(q_constant(QVariant::q_bar, 0.5, 0.5, 1), std::invalid_argument);
}

TEST_CASE("first steps of the three variants") {
  EwmaState q(QVariant::q, 0.5, 1.0);
  CHECK(q.step(PValue(0.1)) == doctest::Approx(0.1).epsilon(1e-12));

  EwmaState qt(QVariant::q_tilde, 0.5, 1.0);
  CHECK(qt.step(PValue(0.1)) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(qt.step(PValue(0.2)) == doctest::Approx(0.3).epsilon(1e-12));

  EwmaState qb(QVariant::q_bar, 0.5, 1.0);
  CHECK(qb.step(PValue(0.1)) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(qb.step(PValue(0.2)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("recursion equals the explicit weighted mean") {
  Rng rng(23, 0);
  struct Cell {
    QVariant variant;
    double lambda, r;
  };
  const std::vector<Cell> cells = {{QVariant::q, 0.3, 2.0},      {QVariant::q, 0.5, -0.9},
                                   {QVariant::q_tilde, 0.2, 1.0}, {QVariant::q_tilde, 0.8, -0.5},
                                   {QVariant::q_bar, 0.9, 1.0},   {QVariant::q_bar, 0.4, 3.0}};
  for (const Cell& cell : cells) {
    EwmaState state(cell.variant, cell.lambda, cell.r);
    std::vector<double> p;
    for (int t = 1; t <= 50; ++t) {
      p.push_back(0.01 + 0.99 * rng.next_unit());
      const double by_recursion = state.step(PValue(p.back()));
      const double mean = generalized_mean(cell.r, ewma_weights(cell.lambda, t), p);
      const double expected = q_constant(cell.variant, cell.lambda, cell.r, t) * mean;
      CHECK(by_recursion == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("state value equals the explicit weighted power sum") {
  Rng rng(59, 0);
  for (double lambda : {0.2, 0.5, 0.8}) {
    for (double r : {-0.5, 1.0, 2.0}) {
      EwmaState state(QVariant::q_tilde, lambda, r);
      std::vector<double> p;
      for (int t = 1; t <= 40; ++t) {
        p.push_back(0.05 + 0.9 * rng.next_unit());
        state.step(PValue(p.back()));
        const auto w = ewma_weights(lambda, t).weights();
        double direct = 0.0;
        for (int s = 0; s < t; ++s)
          direct += w[static_cast<std::size_t>(s)] * std::pow(p[static_cast<std::size_t>(s)], r);
        CHECK(state.s_value() == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("time-homogeneous variant dominates the time-dependent one") {
  Rng rng(29, 0);
  for (double lambda : {0.1, 0.4, 0.7}) {
    for (double r : {-0.5, 1.0, 2.0}) {
      EwmaState q(QVariant::q, lambda, r);
      EwmaState qt(QVariant::q_tilde, lambda, r);
      for (int t = 0; t < 40; ++t) {
        const PValue p(rng.next_unit());
        CHECK(qt.step(p) >= q.step(p) - 1e-14);
      }
    }
  }
}

TEST_CASE("time-homogeneous variant dominates the running minimum") {
  Rng rng(31, 0);
  for (double r : {-0.9, 0.5, 1.0}) {
    EwmaState qt(QVariant::q_tilde, 0.25, r);
    double min_p = 1.0;
    for (int t = 0; t < 100; ++t) {
      const double p = rng.next_unit();
      min_p = std::min(min_p, p);
      CHECK(qt.step(PValue(p)) >= min_p - 1e-12);
    }
  }
}

TEST_CASE("variants coincide for heavy smoothing after the first step") {
  Rng rng(37, 0);
  for (double lambda : {0.5, 0.8}) {
    for (double r : {1.0, 2.5}) {
      EwmaState q(QVariant::q, lambda, r);
      EwmaState qt(QVariant::q_tilde, lambda, r);
      EwmaState qb(QVariant::q_bar, lambda, r);
      const double p1 = rng.next_unit();
      const double q1 = q.step(PValue(p1));
      const double qt1 = qt.step(PValue(p1));
      const double qb1 = qb.step(PValue(p1));
      CHECK(q1 == p1);
      CHECK(qt1 == qb1);
      CHECK(qt1 == doctest::Approx(std::pow(lambda, -1.0 / r) * p1).epsilon(1e-13));
      for (int t = 2; t <= 30; ++t) {
        const PValue p(rng.next_unit());
        const double a = q.step(p), b = qt.step(p), c = qb.step(p);
        CHECK(a == b);
        CHECK(b == c);
      }
    }
  }
}

TEST_CASE("settling time of the time-dependent constant") {
  CHECK(q_constant_settling_time(0.5) == 2);
  CHECK(q_constant_settling_time(0.9) == 2);
  // smallest t with 0.9^(t-1) <= 0.1
  CHECK(q_constant_settling_time(0.1) == 23);
  for (double lambda : {0.1, 0.3, 0.5}) {
    const std::int64_t settle = q_constant_settling_time(lambda);
    CHECK(q_constant(QVariant::q, lambda, 2.0, settle) ==
          q_constant(QVariant::q_tilde, lambda, 2.0, settle));
    CHECK(q_constant(QVariant::q, lambda, 2.0, settle + 5) ==
          q_constant(QVariant::q_tilde, lambda, 2.0, settle + 5));
  }
  // before settling the time-dependent constant is strictly smaller
  CHECK(q_constant(QVariant::q, 0.1, 2.0, 1) < q_constant(QVariant::q_tilde, 0.1, 2.0, 1));
}

TEST_CASE("zero p-values pin the chart at zero when r < 0") {
  EwmaState state(QVariant::q_tilde, 0.5, -0.5);
  CHECK(state.step(PValue(0.5)) > 0.0);
  CHECK(state.step(PValue(0.0)) == 0.0);
  CHECK(state.step(PValue(0.9)) == 0.0);  // the zero stays in the window forever
}

TEST_CASE("calibrator values and admissibility integral") {
  CHECK(calibrate_p_to_e(0.5, PValue(0.25)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(calibrate_p_to_e(0.5, PValue(1.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::isinf(calibrate_p_to_e(0.5, PValue(0.0))));
  CHECK_THROWS_AS(calibrate_p_to_e(1.0, PValue(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_p_to_e(0.0, PValue(0.5)), std::invalid_argument);

  // integral of the calibrator over [0,1] equals 1; substitute p = q^m to
  // remove the endpoint singularity before quadrature
  for (double beta : {0.2, 0.5, 0.8}) {
    const int m = static_cast<int>(std::ceil(2.0 / beta));
    auto transformed = [beta, m](double q) {
      if (q == 0.0) return 0.0;
      const double p = std::pow(q, m);
      return calibrate_p_to_e(beta, PValue(p)) * m * std::pow(q, m - 1);
    };
    CHECK(integrate(transformed, 0.0, 1.0, 1e-11) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("e-value chart recursion and capping") {
  EValueState state(0.5, 0.5);
  CHECK(state.step(PValue(0.25)).value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state.e_value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state.step(PValue(0.25)).value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state.e_value() == doctest::Approx(1.0).epsilon(1e-12));

  // one high p-value gives a small e-value: output capped at 1
  EValueState weak(0.5, 0.5);
  CHECK(weak.step(PValue(1.0)).value() == 1.0);  // E = 0.5, 1/E = 2 -> cap
  CHECK(weak.e_value() == doctest::Approx(0.5).epsilon(1e-12));

  EValueState zero(0.5, 0.5);
  CHECK(zero.step(PValue(0.0)).value() == 0.0);
}

TEST_CASE("smoothed e-values keep null expectation at most one") {
  Rng rng(41, 0);
  const int reps = 20000;
  double total = 0.0;
  double total_sq = 0.0;
  for (int i = 0; i < reps; ++i) {
    EValueState state(0.4, 0.5);
    double last = 0.0;
    for (int t = 0; t < 10; ++t) {
      state.step(PValue(rng.next_unit()));
      last = state.e_value();
    }
    total += last;
    total_sq += last * last;
  }
  const double mean = total / reps;
  const double var = total_sq / reps - mean * mean;
  const double se = std::sqrt(var / reps);
  CHECK(mean <= 1.0 + 3.0 * se);
}
