#include "chainrec/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainrec {

ControlSignal ControlSignal::constant(Point value, double duration) {
  ControlSignal s;
  s.kind_ = Kind::constant;
  s.value_ = std::move(value);
  s.duration_ = duration;
  if (!(duration > 0.0)) throw std::invalid_argument("signal: duration must be > 0");
  return s;
}

ControlSignal ControlSignal::piecewise(std::vector<double> breakpoints,
                                       std::vector<Point> values, double duration) {
  ControlSignal s;
  s.kind_ = Kind::piecewise_constant;
  s.breaks_ = std::move(breakpoints);
  s.values_ = std::move(values);
  s.duration_ = duration;
  if (!(duration > 0.0)) throw std::invalid_argument("signal: duration must be > 0");
  if (s.values_.size() != s.breaks_.size() + 1)
    throw std::invalid_argument("signal: need one value per piece (breaks + 1)");
  for (size_t i = 0; i < s.breaks_.size(); ++i) {
    if (s.breaks_[i] <= 0.0 || s.breaks_[i] >= duration)
      throw std::invalid_argument("signal: breakpoints must lie inside (0, duration)");
    if (i && s.breaks_[i] <= s.breaks_[i - 1])
      throw std::invalid_argument("signal: breakpoints must increase");
  }
  const size_t d = s.values_.front().size();
  for (const Point& v : s.values_)
    if (v.size() != d) throw std::invalid_argument("signal: inconsistent dimensions");
  return s;
}

ControlSignal ControlSignal::sinusoidal(Point amplitude, double frequency,
                                        double duration) {
  ControlSignal s;
  s.kind_ = Kind::sinusoidal;
  s.value_ = std::move(amplitude);
  s.frequency_ = frequency;
  s.duration_ = duration;
  if (!(duration > 0.0)) throw std::invalid_argument("signal: duration must be > 0");
  return s;
}

int ControlSignal::dim() const {
  return kind_ == Kind::piecewise_constant ? int(values_.front().size())
                                           : int(value_.size());
}

Point ControlSignal::value(double t) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::piecewise_constant: {
      const size_t piece =
          std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin();
      return values_[piece];
    }
    case Kind::sinusoidal: {
      Point out(value_.size());
      const double s = std::sin(6.283185307179586 * frequency_ * t);
      for (size_t i = 0; i < out.size(); ++i) out[i] = value_[i] * s;
      return out;
    }
  }
  return {};
}

double ControlSignal::norm(double t) const {
  double s = 0.0;
  for (double c : value(t)) s += c * c;
  return std::sqrt(s);
}

double ControlSignal::integral_norm(double a, double b) const {
  if (b <= a) return 0.0;
  // knots: quadrature cells never straddle a breakpoint
  std::vector<double> knots = {a};
  for (double bp : breaks_)
    if (bp > a + 1e-15 && bp < b - 1e-15) knots.push_back(bp);
  knots.push_back(b);
  double total = 0.0;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k], hi = knots[k + 1];
    const int n = std::max(1, int(std::ceil((hi - lo) / 1e-3 - 1e-12)));
    const double h = (hi - lo) / n;
    // evaluate just inside piece boundaries so piecewise values are exact
    double sum = 0.5 * (norm(lo + 1e-12) + norm(hi - 1e-12));
    for (int i = 1; i < n; ++i) sum += norm(lo + i * h);
    total += sum * h;
  }
  return total;
}

double ControlSignal::worst_unit_window() const {
  double worst = 0.0;
  if (duration_ < 1.0) return integral_norm(0.0, duration_);
  for (double t = 0.0; t <= duration_ - 1.0 + 1e-12; t += 0.01)
    worst = std::max(worst, integral_norm(t, std::min(t + 1.0, duration_)));
  return worst;
}

double gronwall_budget(double eps, double lipschitz) {
  if (!(eps > 0.0)) throw std::invalid_argument("gronwall_budget: eps must be > 0");
  if (lipschitz < 0.0)
    throw std::invalid_argument("gronwall_budget: Lipschitz constant must be >= 0");
  return eps * std::exp(-lipschitz);
}

double gronwall_deviation_bound(const ControlSignal& u, double lipschitz, double tau,
                                double t) {
  if (tau < 0.0 || tau > 1.0 + 1e-12)
    throw std::invalid_argument("gronwall_deviation_bound: tau must be in [0,1]");
  return std::exp(lipschitz * tau) * u.integral_norm(t, t + tau);
}

namespace {

// RK4 step of the time-dependent field g(z) + u(t).
void rk4_step_controlled(const SemiflowSpec& spec, const ControlSignal& u, Point& z,
                         double t, double h) {
  const int d = int(z.size());
  auto f = [&](double tt, const Point& zz) {
    Point v = vector_field(spec, zz);
    const Point uu = u.value(tt);
    for (int i = 0; i < d; ++i) v[i] += uu[i];
    return v;
  };
  Point k1 = f(t, z);
  Point tmp(d);
  for (int i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
  Point k2 = f(t + 0.5 * h, tmp);
  for (int i = 0; i < d; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
  Point k3 = f(t + 0.5 * h, tmp);
  for (int i = 0; i < d; ++i) tmp[i] = z[i] + h * k3[i];
  Point k4 = f(t + h, tmp);
  for (int i = 0; i < d; ++i)
    z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

PerturbedOrbit perturbed_orbit(const SemiflowSpec& spec, const ControlSignal& u,
                               const Point& x0, double T, double h) {
  if (spec.kind != SpecKind::ode)
    throw std::invalid_argument("perturbed_orbit: spec must be ode kind");
  if (!spec.lipschitz)
    throw std::invalid_argument("perturbed_orbit: spec needs a Lipschitz constant");
  if (T < 1.0 - 1e-12)
    throw std::invalid_argument("perturbed_orbit: duration must be >= 1");
  if (u.duration() < T - 1e-12)
    throw std::invalid_argument("perturbed_orbit: signal shorter than the orbit");
  check_point(x0, spec.dim(), "perturbed_orbit");
  if (u.dim() != spec.dim())
    throw std::invalid_argument("perturbed_orbit: signal dimension mismatch");

  const long n_samples = std::lround(T / h);
  if (std::abs(n_samples * h - T) > 1e-9)
    throw std::invalid_argument("perturbed_orbit: T must be a multiple of h");

  std::vector<double> times;
  std::vector<Point> points;
  Point z = x0;
  for (int i = 0; i < spec.dim(); ++i)
    if (spec.metric.wraps(i)) z[i] = spec.metric.wrap_coord(z[i], spec.domain[i].lo, i);
  if (!inside_domain(spec.domain, z, 1e-9)) throw DomainEscape(0.0, z);
  times.push_back(0.0);
  points.push_back(z);

  for (long s = 0; s < n_samples; ++s) {
    const double a = s * h, b = (s + 1) * h;
    // substep knots: at most ode_step wide, split at signal breakpoints
    std::vector<double> knots = {a};
    const int n = std::max(1, int(std::ceil(h / spec.ode_step - 1e-12)));
    for (int k = 1; k <= n; ++k) knots.push_back(a + h * k / n);
    if (u.kind() == ControlSignal::Kind::piecewise_constant) {
      for (double bp : u.breakpoints())
        if (bp > a + 1e-12 && bp < b - 1e-12) knots.push_back(bp);
      std::sort(knots.begin(), knots.end());
      knots.erase(std::unique(knots.begin(), knots.end(),
                              [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                  knots.end());
    }
    for (size_t k = 0; k + 1 < knots.size(); ++k) {
      rk4_step_controlled(spec, u, z, knots[k], knots[k + 1] - knots[k]);
      for (int i = 0; i < spec.dim(); ++i) {
        if (spec.metric.wraps(i)) {
          z[i] = spec.metric.wrap_coord(z[i], spec.domain[i].lo, i);
          continue;
        }
        if (z[i] < spec.domain[i].lo - 1e-9 || z[i] > spec.domain[i].hi + 1e-9)
          throw DomainEscape(knots[k + 1], z);
        z[i] = std::clamp(z[i], spec.domain[i].lo, spec.domain[i].hi);
      }
    }
    times.push_back(b);
    points.push_back(z);
  }

  const double budget = 10.0 * h * std::max({spec.v_max, 1.0});
  Curve curve(std::move(times), std::move(points), {}, spec.metric, h + 1e-9, budget);
  return PerturbedOrbit{std::move(curve), u.worst_unit_window()};
}

}  // namespace chainrec
