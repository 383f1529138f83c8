#pragma once

#include <optional>

#include "pvchart/core.hpp"
#include "pvchart/ewma.hpp"

namespace pvchart {

// Uniform front-end over all chart kinds. Single-writer; value-semantic and
// movable across threads. Once finalised, further steps are an error.
class ChartState {
 public:
  explicit ChartState(ChartKind kind) : kind_(kind) {
    validate_kind(kind);
    if (const auto* q = std::get_if<QEwma>(&kind))
      ewma_.emplace(QVariant::q, q->lambda, q->r);
    else if (const auto* qt = std::get_if<QTildeEwma>(&kind))
      ewma_.emplace(QVariant::q_tilde, qt->lambda, qt->r);
    else if (const auto* qb = std::get_if<QBarEwma>(&kind))
      ewma_.emplace(QVariant::q_bar, qb->lambda, qb->r);
    else if (const auto* e = std::get_if<EValueEwma>(&kind))
      evalue_.emplace(e->lambda, e->beta);
  }

  ChartStatistic step(PValue p, const AlarmRule& rule) {
    if (finalised_) throw std::logic_error("chart state already finalised");
    double raw;
    if (ewma_)
      raw = ewma_->step(p);
    else if (evalue_)
      raw = evalue_->step(p).value();
    else
      raw = p.value();
    ++t_;
    const PValue clamped(std::min(1.0, raw));
    return ChartStatistic{t_, raw, clamped, clamped.value() <= rule.alpha};
  }

  void finalise() { finalised_ = true; }
  bool finalised() const { return finalised_; }
  std::int64_t time() const { return t_; }
  const ChartKind& kind() const { return kind_; }

 private:
  ChartKind kind_;
  std::optional<EwmaState> ewma_;
  std::optional<EValueState> evalue_;
  std::int64_t t_ = 0;
  bool finalised_ = false;
};

inline ChartStatistic chart_step(ChartState& state, PValue p, const AlarmRule& rule) {
  return state.step(p, rule);
}

}  // namespace pvchart
