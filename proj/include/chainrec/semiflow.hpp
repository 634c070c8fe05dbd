#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainrec/geometry.hpp"
#include "chainrec/rng.hpp"

namespace chainrec {

enum class SpecKind { analytic, ode };

// One monomial per entry: coeff * prod_i x_i^exponents[i].
struct PolyTerm {
  double coeff = 0.0;
  std::vector<int> exponents;
};
// Per output dimension.
using PolyField = std::vector<std::vector<PolyTerm>>;

/// Evaluable forward-time system: a named closed-form flow, the fixed-step
/// RK4 twin of a named vector field, or a user polynomial field.
struct SemiflowSpec {
  SpecKind kind = SpecKind::analytic;
  std::string name;  // built-in name, or "custom" for ode-with-coefficients
  BoxDomain domain;
  Metric metric = Metric::euclidean(1);
  double v_max = 1.0;
  std::optional<double> lipschitz;
  double ode_step = 1e-3;
  PolyField poly;  // custom only
  std::vector<Point> fixed_points;

  int dim() const { return int(domain.size()); }
};

// Built-ins, each with a closed form and a matching integrated twin:
//   rightward    dx/dt = 1 - x          on [0,1]
//   circle       dt/dt = 1              on the 2pi torus
//   circle_rest  d0/dt = 1 - cos(theta) on the 2pi torus
//   doublewell1d dx/dt = x - x^3        on [-2,2]
//   gradwell2d   (x - x^3, -y)          on [-2,2]^2
const std::vector<std::string>& builtin_names();
SemiflowSpec builtin_semiflow(const std::string& name,
                              SpecKind kind = SpecKind::analytic,
                              double ode_step = 1e-3);
SemiflowSpec custom_ode(PolyField field, BoxDomain domain, Metric metric,
                        double v_max, std::optional<double> lipschitz,
                        double ode_step = 1e-3);
// Axis-aligned hull of the global attractor (degenerate axes allowed).
BoxDomain attractor_hull(const SemiflowSpec& spec);

struct DomainEscape : std::runtime_error {
  double exit_time;
  Point last;
  DomainEscape(double t, Point p)
      : std::runtime_error("trajectory left the domain at t=" + std::to_string(t)),
        exit_time(t),
        last(std::move(p)) {}
};

Point vector_field(const SemiflowSpec& spec, const Point& x);
Point evaluate(const SemiflowSpec& spec, double t, const Point& x);
// Flow from x sampled at an ascending time grid (single integration pass for
// the ode kind).  times must start at values >= 0.
std::vector<Point> evaluate_grid(const SemiflowSpec& spec, const Point& x,
                                 const std::vector<double>& times);

// Sampled uniform-continuity modulus: for each eta, the largest candidate
// delta such that sampled pairs closer than delta stay eta-close under the
// flow for all tau in [0,1] (grid step 1/16).  delta = 0 means no candidate
// passed; callers must treat that as failure.
struct ModulusTable {
  std::vector<double> eta;
  std::vector<double> delta;
  std::vector<double> worst_ratio;  // max observed image distance / eta

  double delta_for(double eta_query) const;
};

ModulusTable estimate_modulus(const SemiflowSpec& spec, std::vector<double> etas,
                              int n_samples, const Rng& rng);
// Serial reference implementation (same contract, naive loop).
ModulusTable estimate_modulus_reference(const SemiflowSpec& spec,
                                        std::vector<double> etas, int n_samples,
                                        const Rng& rng);

}  // namespace chainrec
