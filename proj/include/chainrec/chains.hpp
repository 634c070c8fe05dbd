#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "chainrec/curve.hpp"
#include "chainrec/semiflow.hpp"

namespace chainrec {

// Outcome of checking a candidate chain against the flow at tolerance eps.
// For curves, argmax_t / argmax_tau locate the worst probe; for point chains
// argmax_hop does.  passed means every probed defect was strictly below eps
// (and, for point chains, every hop time met the floor).
struct DefectReport {
  double max_defect = 0.0;
  double argmax_t = 0.0;
  double argmax_tau = 0.0;
  int argmax_hop = -1;
  bool passed = false;
  bool time_floor_ok = true;
  std::size_t checked_pairs = 0;
};

constexpr double kDefaultTauStep = 1.0 / 16.0;

// Checks d(curve(t+tau), F^tau(curve(t))) < eps over all sample times t and
// tau on the grid {0, tau_step, ..., 1} with t + tau <= duration.
DefectReport validate_shadow(const Curve& curve, const SemiflowSpec& spec,
                             double eps, double tau_step = kDefaultTauStep);
DefectReport validate_shadow_reference(const Curve& curve, const SemiflowSpec& spec,
                                       double eps, double tau_step = kDefaultTauStep);

// Checks every hop time >= t_min and every hop defect d(F^{t_k}(c_k), c_{k+1}) < eps.
DefectReport validate_conley(const ConleyChain& chain, const SemiflowSpec& spec,
                             double eps, double t_min);

// Concatenation of exact flow segments through the chain's points, sampled at
// step h, with a declared jump at every segment boundary.  Every hop time
// must be >= 1 so each jump is bridged by a single sub-unit window.
Curve conley_to_shadow(const ConleyChain& chain, const SemiflowSpec& spec, double h);

// Endpoint error of a unit-time pseudo-orbit after m hops: reports
// e_m = d(F^m(x_0), x_m), passed iff e_m < eta.
DefectReport block_unit_chain(const std::vector<Point>& points,
                              const SemiflowSpec& spec, double eta);

// Per-hop budget that keeps the m-hop endpoint error below eta:
// min(modulus delta for eta/m, eta/(2m)).  Returns 0 when the modulus
// estimate fails; callers must treat 0 as failure.
double blocking_delta(const SemiflowSpec& spec, int m, double eta, const Rng& rng,
                      int modulus_samples = 2000);

struct ShorteningFailed : std::runtime_error {
  ShorteningFailed() : std::runtime_error("loop shortening found no admissible window") {}
};

struct ShortenResult {
  Curve curve;
  double tau_star;  // width of the terminal window the truncation may use
};

// Truncates an eps-loop at target_T and resets the endpoint to the loop's
// base point; the result validates at 4*eps.  target_T must lie in
// (T - tau_star, T), where tau_star is the widest terminal window on which
// the curve is continuous and stays eps-close to its limit value.
ShortenResult shorten_loop(const Curve& curve, const SemiflowSpec& spec, double eps,
                           double target_T);

struct WrapBudgetExhausted : std::runtime_error {
  WrapBudgetExhausted()
      : std::runtime_error("no loop sample landed near the target within the wrap budget") {}
};

// Appends unit-time samples of the endlessly repeated loop to the chain until
// one lands within eps of the loop's base point (at index >= min_index).  The
// first appended hop takes first_hop_time.  If the loop duration is within
// 1e-9 of a rational with denominator <= 32 it is first nudged shorter so the
// wrap phases equidistribute.
ConleyChain extend_via_loop(const ConleyChain& partial, const Curve& loop,
                            const SemiflowSpec& spec, double eps, int max_wraps,
                            double first_hop_time = 1.0, int min_index = 1);

// Unit-samples the curve, bridges a fractional tail through a loop at the
// endpoint, and collapses runs of ceil(t_min) unit legs into single hops (the
// final short run merges into its predecessor).  The result validates at
// (eps, t_min) provided the curve's shadow defect met the blocking budget
// min(blocking_delta(spec, ceil(t_min), eps/2), eps/2).
ConleyChain shadow_to_conley(const Curve& curve, const std::optional<Curve>& loop_at_y,
                             const SemiflowSpec& spec, double eps, double t_min,
                             int max_wraps = 10000);

}  // namespace chainrec
