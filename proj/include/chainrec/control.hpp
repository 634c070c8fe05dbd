#pragma once

#include <string>
#include <vector>

#include "chainrec/curve.hpp"
#include "chainrec/semiflow.hpp"

namespace chainrec {

// Probe signal u(t) added to a vector field.  Piecewise-constant signals are
// right-continuous at their breakpoints; quadrature splits at breakpoints so
// the recorded integrals are exact for them.
class ControlSignal {
 public:
  enum class Kind { constant, piecewise_constant, sinusoidal };

  static ControlSignal constant(Point value, double duration);
  static ControlSignal piecewise(std::vector<double> breakpoints,
                                 std::vector<Point> values, double duration);
  static ControlSignal sinusoidal(Point amplitude, double frequency, double duration);

  Kind kind() const { return kind_; }
  double duration() const { return duration_; }
  int dim() const;

  Point value(double t) const;
  double norm(double t) const;

  // Trapezoid quadrature of ||u|| at step <= 1e-3, split at breakpoints.
  double integral_norm(double a, double b) const;
  // max over t in {0, 0.01, ...} of the window integral over [t, t+1]
  double worst_unit_window() const;
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  Kind kind_;
  double duration_ = 0.0;
  Point value_;                     // constant / amplitude
  std::vector<double> breaks_;      // piecewise
  std::vector<Point> values_;       // piecewise
  double frequency_ = 0.0;          // sinusoidal
};

// Unit-window budget eps * e^{-L} that certifies a perturbed solution as an
// eps-chain on a field with Lipschitz constant L.
double gronwall_budget(double eps, double lipschitz);

// Analytic deviation bound e^{L tau} * int_t^{t+tau} ||u||.
double gronwall_deviation_bound(const ControlSignal& u, double lipschitz, double tau,
                                double t);

struct PerturbedOrbit {
  Curve curve;
  double worst_window_integral;
};

// Integrates dz/dt = field(z) + u(t) from x0 for duration T, sampling every
// h.  Requires an ode-kind spec with a declared Lipschitz constant.  Budget
// violations are not errors; callers compare worst_window_integral against
// gronwall_budget themselves.
PerturbedOrbit perturbed_orbit(const SemiflowSpec& spec, const ControlSignal& u,
                               const Point& x0, double T, double h);

}  // namespace chainrec
