#include "chainrec/semiflow.hpp"

#include <algorithm>
#include <cmath>

namespace chainrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double poly_eval_term(const PolyTerm& term, const Point& x) {
  double v = term.coeff;
  for (size_t i = 0; i < term.exponents.size(); ++i) {
    for (int e = 0; e < term.exponents[i]; ++e) v *= x[i];
  }
  return v;
}

Point builtin_field(const std::string& name, const Point& x) {
  if (name == "rightward") return {1.0 - x[0]};
  if (name == "circle") return {1.0};
  if (name == "circle_rest") return {1.0 - std::cos(x[0])};
  if (name == "doublewell1d") return {x[0] - x[0] * x[0] * x[0]};
  if (name == "gradwell2d") return {x[0] - x[0] * x[0] * x[0], -x[1]};
  throw std::invalid_argument("unknown built-in system: " + name);
}

double circle_rest_flow(double theta, double t) {
  // theta' = 1 - cos(theta): cot(theta_t/2) = cot(theta_0/2) - t.
  double th = std::fmod(theta, kTwoPi);
  if (th < 0) th += kTwoPi;
  if (th == 0.0) return 0.0;
  const double u = std::cos(th / 2.0) / std::sin(th / 2.0);
  return 2.0 * std::atan2(1.0, u - t);
}

Point analytic_flow(const SemiflowSpec& spec, double t, const Point& x) {
  const std::string& n = spec.name;
  if (n == "rightward") return {1.0 - (1.0 - x[0]) * std::exp(-t)};
  if (n == "circle") {
    double th = std::fmod(x[0] + t, kTwoPi);
    if (th < 0) th += kTwoPi;
    return {th};
  }
  if (n == "circle_rest") return {circle_rest_flow(x[0], t)};
  if (n == "doublewell1d") {
    const double em = std::exp(-2.0 * t);
    return {x[0] / std::sqrt(em + x[0] * x[0] * (1.0 - em))};
  }
  if (n == "gradwell2d") {
    const double em = std::exp(-2.0 * t);
    return {x[0] / std::sqrt(em + x[0] * x[0] * (1.0 - em)), x[1] * std::exp(-t)};
  }
  throw std::invalid_argument("unknown analytic system: " + n);
}

void wrap_into_domain(const SemiflowSpec& spec, Point& x) {
  for (int i = 0; i < spec.dim(); ++i)
    if (spec.metric.wraps(i)) x[i] = spec.metric.wrap_coord(x[i], spec.domain[i].lo, i);
}

// One classical RK4 step of the autonomous field.
void rk4_step(const SemiflowSpec& spec, Point& x, double h) {
  const int d = int(x.size());
  Point k1 = vector_field(spec, x);
  Point tmp(d);
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  Point k2 = vector_field(spec, tmp);
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  Point k3 = vector_field(spec, tmp);
  for (int i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
  Point k4 = vector_field(spec, tmp);
  for (int i = 0; i < d; ++i)
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Integrate forward by dt, checking the domain after every substep.
// t_base only feeds the escape report.
void ode_advance(const SemiflowSpec& spec, Point& x, double dt, double t_base) {
  if (dt <= 0.0) return;
  const int n = std::max(1, int(std::ceil(dt / spec.ode_step - 1e-12)));
  const double h = dt / n;
  for (int s = 0; s < n; ++s) {
    rk4_step(spec, x, h);
    wrap_into_domain(spec, x);
    for (int i = 0; i < spec.dim(); ++i) {
      if (spec.metric.wraps(i)) continue;
      const double lo = spec.domain[i].lo, hi = spec.domain[i].hi;
      if (x[i] < lo - 1e-9 || x[i] > hi + 1e-9)
        throw DomainEscape(t_base + (s + 1) * h, x);
      x[i] = std::clamp(x[i], lo, hi);
    }
  }
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "rightward", "circle", "circle_rest", "doublewell1d", "gradwell2d"};
  return names;
}

SemiflowSpec builtin_semiflow(const std::string& name, SpecKind kind,
                              double ode_step) {
  SemiflowSpec s;
  s.kind = kind;
  s.name = name;
  s.ode_step = ode_step;
  if (name == "rightward") {
    s.domain = {{0.0, 1.0}};
    s.metric = Metric::euclidean(1);
    s.v_max = 1.0;
    s.lipschitz = 1.0;
    s.fixed_points = {{1.0}};
  } else if (name == "circle") {
    s.domain = {{0.0, kTwoPi}};
    s.metric = Metric::torus({kTwoPi});
    s.v_max = 1.0;
    s.lipschitz = 0.0;
  } else if (name == "circle_rest") {
    s.domain = {{0.0, kTwoPi}};
    s.metric = Metric::torus({kTwoPi});
    s.v_max = 2.0;
    s.lipschitz = 1.0;
    s.fixed_points = {{0.0}};
  } else if (name == "doublewell1d") {
    s.domain = {{-2.0, 2.0}};
    s.metric = Metric::euclidean(1);
    s.v_max = 6.0;
    s.lipschitz = 11.0;
    s.fixed_points = {{-1.0}, {0.0}, {1.0}};
  } else if (name == "gradwell2d") {
    s.domain = {{-2.0, 2.0}, {-2.0, 2.0}};
    s.metric = Metric::euclidean(2);
    s.v_max = 6.4;
    s.lipschitz = 11.0;
    s.fixed_points = {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  } else {
    throw std::invalid_argument("unknown built-in system: " + name);
  }
  return s;
}

SemiflowSpec custom_ode(PolyField field, BoxDomain domain, Metric metric,
                        double v_max, std::optional<double> lipschitz,
                        double ode_step) {
  SemiflowSpec s;
  s.kind = SpecKind::ode;
  s.name = "custom";
  s.poly = std::move(field);
  s.domain = std::move(domain);
  s.metric = std::move(metric);
  s.v_max = v_max;
  s.lipschitz = lipschitz;
  s.ode_step = ode_step;
  if (s.poly.size() != s.domain.size())
    throw std::invalid_argument("custom field dimension does not match domain");
  for (const auto& terms : s.poly)
    for (const auto& t : terms) {
      if (t.exponents.size() != s.domain.size())
        throw std::invalid_argument("custom field term has wrong exponent count");
      for (int e : t.exponents)
        if (e < 0 || e > 4)
          throw std::invalid_argument("custom field exponents must be in [0,4]");
    }
  return s;
}

BoxDomain attractor_hull(const SemiflowSpec& spec) {
  const std::string& n = spec.name;
  if (n == "rightward") return {{1.0, 1.0}};
  if (n == "circle" || n == "circle_rest") return spec.domain;
  if (n == "doublewell1d") return {{-1.0, 1.0}};
  if (n == "gradwell2d") return {{-1.0, 1.0}, {0.0, 0.0}};
  throw std::invalid_argument("no attractor hull registered for: " + n);
}

Point vector_field(const SemiflowSpec& spec, const Point& x) {
  if (spec.name != "custom") return builtin_field(spec.name, x);
  Point out(spec.dim(), 0.0);
  for (int i = 0; i < spec.dim(); ++i)
    for (const PolyTerm& t : spec.poly[i]) out[i] += poly_eval_term(t, x);
  return out;
}

Point evaluate(const SemiflowSpec& spec, double t, const Point& x) {
  check_point(x, spec.dim(), "evaluate");
  if (t < 0.0) throw std::invalid_argument("evaluate: t must be >= 0");
  Point y = x;
  wrap_into_domain(spec, y);
  if (!inside_domain(spec.domain, y, 1e-9))
    throw DomainEscape(0.0, y);
  if (t == 0.0) return y;
  if (spec.kind == SpecKind::analytic) return analytic_flow(spec, t, y);
  ode_advance(spec, y, t, 0.0);
  return y;
}

std::vector<Point> evaluate_grid(const SemiflowSpec& spec, const Point& x,
                                 const std::vector<double>& times) {
  std::vector<Point> out;
  out.reserve(times.size());
  if (spec.kind == SpecKind::analytic) {
    for (double t : times) out.push_back(evaluate(spec, t, x));
    return out;
  }
  Point y = x;
  wrap_into_domain(spec, y);
  if (!inside_domain(spec.domain, y, 1e-9)) throw DomainEscape(0.0, y);
  double cur = 0.0;
  for (double t : times) {
    if (t < cur - 1e-12)
      throw std::invalid_argument("evaluate_grid: times must be ascending");
    ode_advance(spec, y, t - cur, cur);
    cur = t;
    out.push_back(y);
  }
  return out;
}

double ModulusTable::delta_for(double eta_query) const {
  for (size_t i = 0; i < eta.size(); ++i)
    if (std::abs(eta[i] - eta_query) <= 1e-12 * std::max(1.0, std::abs(eta_query)))
      return delta[i];
  throw std::invalid_argument("modulus table has no entry for requested eta");
}

namespace {

struct PairProbe {
  Point z, w;
  bool ok = false;
};

// Deterministic pair keyed by (rng, candidate index, pair index).
PairProbe sample_pair(const SemiflowSpec& spec, double delta, const Rng& base,
                      std::uint64_t key) {
  Rng r = base.fork(key);
  PairProbe probe;
  const int d = spec.dim();
  for (int attempt = 0; attempt < 64; ++attempt) {
    Point z(d), w(d);
    for (int i = 0; i < d; ++i)
      z[i] = r.uniform(spec.domain[i].lo, spec.domain[i].hi);
    // uniform radius in (0, delta); direction via normals
    Point dir(d);
    double norm = 0.0;
    for (int i = 0; i < d; ++i) {
      dir[i] = r.normal();
      norm += dir[i] * dir[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    const double rad = delta * std::max(1e-9, r.uniform());
    bool inside = true;
    for (int i = 0; i < d; ++i) {
      w[i] = z[i] + rad * dir[i] / norm;
      if (spec.metric.wraps(i)) {
        w[i] = spec.metric.wrap_coord(w[i], spec.domain[i].lo, i);
      } else if (w[i] < spec.domain[i].lo || w[i] > spec.domain[i].hi) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    probe.z = std::move(z);
    probe.w = std::move(w);
    probe.ok = true;
    return probe;
  }
  return probe;
}

std::vector<double> tau_grid() {
  std::vector<double> taus;
  for (int k = 0; k <= 16; ++k) taus.push_back(k / 16.0);
  return taus;
}

// Max image distance over the tau grid; negative if the pair flowed out of
// the domain (skipped).
double pair_worst(const SemiflowSpec& spec, const PairProbe& probe,
                  const std::vector<double>& taus) {
  try {
    const auto imz = evaluate_grid(spec, probe.z, taus);
    const auto imw = evaluate_grid(spec, probe.w, taus);
    double worst = 0.0;
    for (size_t k = 0; k < taus.size(); ++k)
      worst = std::max(worst, spec.metric.distance(imz[k], imw[k]));
    return worst;
  } catch (const DomainEscape&) {
    return -1.0;
  }
}

ModulusTable estimate_modulus_impl(const SemiflowSpec& spec,
                                   std::vector<double> etas, int n_samples,
                                   const Rng& rng, bool parallel) {
  if (etas.empty()) throw std::invalid_argument("estimate_modulus: empty eta list");
  for (size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0))
      throw std::invalid_argument("estimate_modulus: etas must be positive");
    if (i > 0 && etas[i] < etas[i - 1])
      throw std::invalid_argument("estimate_modulus: etas must be sorted");
  }
  const auto taus = tau_grid();
  constexpr double kGridRatio = 0.9;
  constexpr int kGridCount = 80;

  ModulusTable table;
  table.eta = etas;
  table.delta.assign(etas.size(), 0.0);
  table.worst_ratio.assign(etas.size(), 0.0);

  for (size_t ei = 0; ei < etas.size(); ++ei) {
    const double eta = etas[ei];
    double accepted = 0.0, accepted_worst = 0.0;
    double cand = eta;
    for (int ci = 0; ci < kGridCount; ++ci, cand *= kGridRatio) {
      bool all_ok = true;
      double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst) \
    reduction(&& : all_ok) if (parallel)
      for (int p = 0; p < n_samples; ++p) {
        const std::uint64_t key =
            (std::uint64_t(ei) << 40) ^ (std::uint64_t(ci) << 24) ^ std::uint64_t(p);
        PairProbe probe = sample_pair(spec, cand, rng, key);
        if (!probe.ok) continue;
        const double w = pair_worst(spec, probe, taus);
        if (w < 0.0) continue;  // escaped; counted as skipped
        worst = std::max(worst, w);
        if (w >= eta) all_ok = false;
      }
      if (all_ok) {
        accepted = cand;
        accepted_worst = worst;
        break;
      }
    }
    table.delta[ei] = accepted;
    table.worst_ratio[ei] = eta > 0.0 ? accepted_worst / eta : 0.0;
    // monotone nondecreasing in eta
    if (ei > 0 && table.delta[ei] < table.delta[ei - 1]) {
      table.delta[ei] = table.delta[ei - 1];
      table.worst_ratio[ei] = std::max(table.worst_ratio[ei], table.worst_ratio[ei - 1]);
    }
  }
  return table;
}

}  // namespace

ModulusTable estimate_modulus(const SemiflowSpec& spec, std::vector<double> etas,
                              int n_samples, const Rng& rng) {
  return estimate_modulus_impl(spec, std::move(etas), n_samples, rng, true);
}

ModulusTable estimate_modulus_reference(const SemiflowSpec& spec,
                                        std::vector<double> etas, int n_samples,
                                        const Rng& rng) {
  return estimate_modulus_impl(spec, std::move(etas), n_samples, rng, false);
}

}  // namespace chainrec
