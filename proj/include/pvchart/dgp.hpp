#pragma once

#include <cstdint>
#include <functional>

#include "pvchart/localize.hpp"
#include "pvchart/run_length.hpp"

namespace pvchart {

// Seeded scenario generators. Every factory returns one deterministic
// substream per replication index; all randomness flows from the seed.

StreamFactory iid_uniform_source(std::uint64_t seed);

// X_t ~ N(0,1), p_t = 2*(1 - Phi(|X_t|)): exactly uniform p-values in control.
StreamFactory one_phase_normal_source(std::uint64_t seed);

// A single reference draw X_0 is reused against every monitoring draw, so the
// p-values are super-uniform but dependent through X_0.
StreamFactory two_phase_normal_source(std::uint64_t seed);

enum class Ar1PValue { marginal, sup };

// Stationary AR(1) X_t = delta + ar_coeff*X_{t-1} + eps_t with unit marginal
// variance. `marginal` charts 2*(1 - Phi(|X_t|)); `sup` charts the
// coefficient-free one-lag statistic. Both derive from the same path.
StreamFactory ar1_source(double ar_coeff, double delta, Ar1PValue which, std::uint64_t seed);

struct KsOoc {
  enum class Family { none, shift, scale, cauchy, dyn_mean, dyn_var };
  Family family = Family::none;
  double param = 0.0;  // shift mean, scale variance, dyn_mean variance, dyn_var dof
};

// Two-phase distribution monitoring: one N(0,1) baseline of size n0, then per
// step a sample of size DiscUnif[n0-10, n0+10] from the in-control or
// out-of-control law, charted through the two-sample KS p-value.
StreamFactory ks_source(int n0, KsOoc ooc, std::uint64_t seed);

using DirectionalStream = std::function<DirectionalPValues()>;
using DirectionalFactory = std::function<DirectionalStream(std::uint64_t rep)>;

// Three-coordinate normal vector with equicorrelation rho and mean
// (delta, 0, -delta); coordinate-wise one-sided p-values Phi(Z) / 1 - Phi(Z).
DirectionalFactory mv_normal_source(double delta, double rho, std::uint64_t seed);

// Two-phase multivariate Cauchy (location (delta, 0, -delta), equicorrelated
// scale), with one-sided rank-test p-values per coordinate against a Phase-I
// baseline of size n0.
DirectionalFactory mv_cauchy_source(double delta, double rho, int n0, std::uint64_t seed);

// Adapts a directional source into a scalar stream of aggregate p-values.
StreamFactory aggregate_stream(DirectionalFactory source, AggregateMethod method);

}  // namespace pvchart
