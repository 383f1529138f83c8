#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

namespace pvchart {

// A p-value in [0,1]. Inputs outside the interval by more than kTol are
// rejected; inputs within kTol (e.g. Phi round-off) are clamped silently.
class PValue {
 public:
  static constexpr double kTol = 1e-12;

  explicit PValue(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("p-value must be finite");
    if (v < -kTol || v > 1.0 + kTol) throw std::invalid_argument("p-value outside [0,1]");
    value_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }

  double value() const { return value_; }

 private:
  double value_;
};

// Shewhart-type alarm rule: alarm when the chart statistic is <= alpha;
// run-length quantities refer to the time of the k-th alarm.
struct AlarmRule {
  double alpha;
  int k = 1;

  AlarmRule(double alpha_, int k_ = 1) : alpha(alpha_), k(k_) {
    if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0,1]");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
  }
};

// One time step of a chart: the uncapped statistic is kept so tests can see
// how much mass a variant puts above 1 before clamping.
struct ChartStatistic {
  std::int64_t time;
  double raw;
  PValue clamped;
  bool alarm;
};

struct RawChart {};

struct QEwma {
  double lambda;
  double r;
};

struct QTildeEwma {
  double lambda;
  double r;
};

struct QBarEwma {
  double lambda;
  double r;
};

struct EValueEwma {
  double lambda;
  double beta;
};

using ChartKind = std::variant<RawChart, QEwma, QTildeEwma, QBarEwma, EValueEwma>;

inline void validate_merge_exponent(double r) {
  if (!(r > -1.0) || r == 0.0) throw std::invalid_argument("exponent r must be > -1 and != 0");
}

inline void validate_kind(const ChartKind& kind) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RawChart>) {
          return;
        } else if constexpr (std::is_same_v<T, EValueEwma>) {
          if (!(k.lambda > 0.0 && k.lambda < 1.0))
            throw std::invalid_argument("lambda must be in (0,1)");
          if (!(k.beta > 0.0 && k.beta < 1.0))
            throw std::invalid_argument("beta must be in (0,1)");
        } else {
          if (!(k.lambda > 0.0 && k.lambda < 1.0))
            throw std::invalid_argument("lambda must be in (0,1)");
          validate_merge_exponent(k.r);
          if constexpr (std::is_same_v<T, QBarEwma>) {
            if (k.r < 1.0)
              throw std::invalid_argument("conditionally valid chart requires r >= 1");
          }
        }
      },
      kind);
}

}  // namespace pvchart
