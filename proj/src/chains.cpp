#include "chainrec/chains.hpp"

#include <algorithm>
#include <cmath>

namespace chainrec {

namespace {

std::vector<double> make_tau_grid(double tau_step) {
  if (!(tau_step > 0.0) || tau_step > 1.0 + 1e-12)
    throw std::invalid_argument("validate_shadow: tau_step must be in (0, 1]");
  std::vector<double> taus;
  for (double t = 0.0; t < 1.0 - 1e-12; t += tau_step) taus.push_back(t);
  taus.push_back(1.0);
  return taus;
}

DefectReport validate_shadow_impl(const Curve& curve, const SemiflowSpec& spec,
                                  double eps, double tau_step, bool parallel) {
  if (curve.duration() < 1.0 - 1e-12)
    throw std::invalid_argument("validate_shadow: curve duration must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("validate_shadow: eps must be > 0");
  const auto taus = make_tau_grid(tau_step);
  const double T = curve.duration();
  const auto& times = curve.times();
  const int n = int(curve.size());

  std::vector<double> worst(n, -1.0);
  std::vector<double> worst_tau(n, 0.0);
  std::vector<long> pairs(n, 0);

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double t = times[i];
    std::vector<double> local_taus;
    for (double tau : taus)
      if (t + tau <= T + 1e-12) local_taus.push_back(tau);
    if (local_taus.empty()) continue;
    const auto images = evaluate_grid(spec, curve.points()[i], local_taus);
    double w = -1.0, wt = 0.0;
    for (size_t k = 0; k < local_taus.size(); ++k) {
      const Point expected = curve.value_at(std::min(t + local_taus[k], T));
      const double d = spec.metric.distance(expected, images[k]);
      if (d > w) {
        w = d;
        wt = local_taus[k];
      }
    }
    worst[i] = w;
    worst_tau[i] = wt;
    pairs[i] = long(local_taus.size());
  }

  DefectReport rep;
  for (int i = 0; i < n; ++i) {
    rep.checked_pairs += std::size_t(pairs[i]);
    if (worst[i] > rep.max_defect) {
      rep.max_defect = worst[i];
      rep.argmax_t = times[i];
      rep.argmax_tau = worst_tau[i];
    }
  }
  rep.passed = rep.max_defect < eps;
  return rep;
}

}  // namespace

DefectReport validate_shadow(const Curve& curve, const SemiflowSpec& spec,
                             double eps, double tau_step) {
  return validate_shadow_impl(curve, spec, eps, tau_step, true);
}

DefectReport validate_shadow_reference(const Curve& curve, const SemiflowSpec& spec,
                                       double eps, double tau_step) {
  return validate_shadow_impl(curve, spec, eps, tau_step, false);
}

DefectReport validate_conley(const ConleyChain& chain, const SemiflowSpec& spec,
                             double eps, double t_min) {
  if (!(eps > 0.0)) throw std::invalid_argument("validate_conley: eps must be > 0");
  DefectReport rep;
  for (size_t k = 0; k < chain.hops(); ++k) {
    if (chain.times[k] < t_min - 1e-12) rep.time_floor_ok = false;
    const Point image = evaluate(spec, chain.times[k], chain.points[k]);
    const double d = spec.metric.distance(image, chain.points[k + 1]);
    ++rep.checked_pairs;
    if (d > rep.max_defect) {
      rep.max_defect = d;
      rep.argmax_hop = int(k);
    }
  }
  rep.passed = rep.time_floor_ok && rep.max_defect < eps;
  return rep;
}

Curve conley_to_shadow(const ConleyChain& chain, const SemiflowSpec& spec, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("conley_to_shadow: h must be > 0");
  for (double t : chain.times)
    if (t < 1.0 - 1e-12)
      throw std::invalid_argument("conley_to_shadow: every hop time must be >= 1");

  std::vector<double> times;
  std::vector<Point> points;
  std::vector<std::size_t> jumps;

  double T_i = 0.0;
  for (size_t i = 0; i < chain.hops(); ++i) {
    // in-segment sample offsets, strictly before the boundary
    std::vector<double> offsets;
    for (double s = 0.0; s < chain.times[i] - 1e-9; s += h) offsets.push_back(s);
    const auto vals = evaluate_grid(spec, chain.points[i], offsets);
    for (size_t k = 0; k < offsets.size(); ++k) {
      times.push_back(T_i + offsets[k]);
      points.push_back(vals[k]);
    }
    T_i += chain.times[i];
    // boundary sample carries the next chain point (post-jump value)
    jumps.push_back(times.size());
    times.push_back(T_i);
    points.push_back(chain.points[i + 1]);
  }

  const double budget = 10.0 * h * std::max(spec.v_max, 1.0);
  return Curve(std::move(times), std::move(points), std::move(jumps), spec.metric,
               h + 1e-9, budget);
}

DefectReport block_unit_chain(const std::vector<Point>& points,
                              const SemiflowSpec& spec, double eta) {
  if (points.size() < 2)
    throw std::invalid_argument("block_unit_chain: need at least two points");
  const int m = int(points.size()) - 1;
  const Point end = evaluate(spec, double(m), points.front());
  DefectReport rep;
  rep.max_defect = spec.metric.distance(end, points.back());
  rep.argmax_hop = m;
  rep.checked_pairs = 1;
  rep.passed = rep.max_defect < eta;
  return rep;
}

double blocking_delta(const SemiflowSpec& spec, int m, double eta, const Rng& rng,
                      int modulus_samples) {
  if (m < 1) throw std::invalid_argument("blocking_delta: m must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("blocking_delta: eta must be > 0");
  const ModulusTable table =
      estimate_modulus(spec, {eta / m}, modulus_samples, rng);
  const double uc = table.delta[0];
  if (uc <= 0.0) return 0.0;
  return std::min(uc, eta / (2.0 * m));
}

ShortenResult shorten_loop(const Curve& curve, const SemiflowSpec& spec, double eps,
                           double target_T) {
  const double T = curve.duration();
  if (spec.metric.distance(curve.points().front(), curve.points().back()) > 1e-9)
    throw std::invalid_argument("shorten_loop: curve is not a loop");

  // Limit value approached from the left; with a declared terminal jump the
  // last pre-jump sample stands in for it.
  const std::size_t last = curve.size() - 1;
  std::size_t limit_idx = last;
  if (curve.is_jump(last)) limit_idx = last - 1;
  const Point& limit = curve.points()[limit_idx];

  // Widest terminal window: continuous (no interior jump marks) and
  // eps-close to the limit value.  Moving the window start below index i
  // crosses the gap ending at t_i, which a jump mark at i forbids.
  std::size_t i_min = limit_idx;
  while (i_min > 0 && !curve.is_jump(i_min) &&
         spec.metric.distance(curve.points()[i_min - 1], limit) < eps)
    --i_min;
  const double tau_star = T - curve.times()[i_min];
  if (!(tau_star > 0.0)) throw ShorteningFailed();

  if (!(target_T > T - tau_star) || !(target_T < T))
    throw std::invalid_argument("shorten_loop: target_T outside (T - tau*, T)");
  if (target_T < 1.0 - 1e-12)
    throw std::invalid_argument("shorten_loop: target_T must be >= 1");

  std::vector<double> times;
  std::vector<Point> points;
  std::vector<std::size_t> jumps;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < curve.size() && curve.times()[i] < target_T - 1e-12; ++i) {
    times.push_back(curve.times()[i]);
    points.push_back(curve.points()[i]);
    if (curve.is_jump(i)) jumps.push_back(i);
    if (i) max_gap = std::max(max_gap, times[i] - times[i - 1]);
  }
  jumps.push_back(times.size());
  times.push_back(target_T);
  points.push_back(curve.points().front());
  max_gap = std::max(max_gap, times.back() - times[times.size() - 2]);

  const double budget = 10.0 * max_gap * std::max(spec.v_max, 1.0);
  Curve out(std::move(times), std::move(points), std::move(jumps), spec.metric,
            max_gap + 1e-9, budget);
  return ShortenResult{std::move(out), tau_star};
}

namespace {

// True if T is within 1e-9 of p/q for some q <= 32.
bool near_low_rational(double T) {
  for (int q = 1; q <= 32; ++q) {
    const double scaled = T * q;
    if (std::abs(scaled - std::round(scaled)) <= 1e-9 * q) return true;
  }
  return false;
}

Curve irrationalize_loop(const Curve& loop, const SemiflowSpec& spec, double eps) {
  Curve current = loop;
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (!near_low_rational(current.duration())) return current;
    const double T = current.duration();
    // golden-ratio sized nudge; shrink until it fits the admissible window
    const double xi =
        std::min(0.01, (T - 1.0) * 0.5) * 0.6180339887498949 / (1.0 + attempt);
    if (xi <= 1e-9) break;
    try {
      current = shorten_loop(current, spec, eps, T - xi).curve;
    } catch (const std::invalid_argument&) {
      continue;  // nudge too large for the terminal window; retry smaller
    }
  }
  if (near_low_rational(current.duration()))
    throw std::invalid_argument(
        "extend_via_loop: could not move loop duration off a low rational");
  return current;
}

}  // namespace

ConleyChain extend_via_loop(const ConleyChain& partial, const Curve& loop,
                            const SemiflowSpec& spec, double eps, int max_wraps,
                            double first_hop_time, int min_index) {
  if (loop.duration() < 1.0 - 1e-12)
    throw std::invalid_argument("extend_via_loop: loop duration must be >= 1");
  if (spec.metric.distance(loop.points().front(), loop.points().back()) > 1e-9)
    throw std::invalid_argument("extend_via_loop: loop endpoints do not match");

  const Curve use = irrationalize_loop(loop, spec, eps);
  const double Tp = use.duration();
  const Point& y = use.points().front();

  std::vector<Point> pts = partial.points;
  std::vector<double> ts = partial.times;
  const long budget = long(max_wraps) * long(std::ceil(Tp));
  for (long n = 1; n <= budget; ++n) {
    const double phase = std::fmod(double(n), Tp);
    Point p = use.value_at(phase);
    ts.push_back(n == 1 ? first_hop_time : 1.0);
    pts.push_back(p);
    if (n >= min_index && spec.metric.distance(pts.back(), y) < eps)
      return ConleyChain(std::move(pts), std::move(ts));
  }
  throw WrapBudgetExhausted();
}

ConleyChain shadow_to_conley(const Curve& curve, const std::optional<Curve>& loop_at_y,
                             const SemiflowSpec& spec, double eps, double t_min,
                             int max_wraps) {
  if (!(eps > 0.0)) throw std::invalid_argument("shadow_to_conley: eps must be > 0");
  const double T = curve.duration();
  const long M = long(std::floor(T + 1e-9));
  const double theta = T - double(M);  // fractional tail in [0, 1)
  const int m = std::max(1, int(std::ceil(t_min - 1e-12)));

  // unit samples p_i = curve(i)
  std::vector<Point> pts;
  std::vector<double> ts;
  for (long i = 0; i <= M; ++i) {
    pts.push_back(curve.value_at(double(i)));
    if (i) ts.push_back(1.0);
  }

  const bool fractional = theta > 1e-9;
  const bool short_of_legs = long(ts.size()) < m;
  ConleyChain unit_chain(std::move(pts), std::move(ts));

  if (fractional || short_of_legs) {
    if (!loop_at_y)
      throw std::invalid_argument(
          "shadow_to_conley: a loop at the endpoint is required (fractional "
          "duration or too few unit legs for t_min)");
    const Point y = curve.value_at(T);
    if (spec.metric.distance(loop_at_y->points().front(), y) > 1e-6)
      throw std::invalid_argument("shadow_to_conley: loop is not anchored at the curve endpoint");
    const double first_hop = fractional ? 1.0 + theta : 1.0;
    const int min_index = int(std::max<long>(1, m - long(unit_chain.hops())));
    unit_chain = extend_via_loop(unit_chain, *loop_at_y, spec, eps, max_wraps,
                                 first_hop, min_index);
  }

  // collapse runs of m legs; the final short run merges into its predecessor
  const long legs = long(unit_chain.hops());
  const long full = legs / m;
  std::vector<Point> out_pts = {unit_chain.points.front()};
  std::vector<double> out_ts;
  long leg = 0;
  for (long b = 0; b < full; ++b) {
    long count = m;
    if (b == full - 1) count += legs % m;  // merge remainder
    double dt = 0.0;
    for (long k = 0; k < count; ++k, ++leg) dt += unit_chain.times[leg];
    out_pts.push_back(unit_chain.points[leg]);
    out_ts.push_back(dt);
  }
  return ConleyChain(std::move(out_pts), std::move(out_ts));
}

}  // namespace chainrec
