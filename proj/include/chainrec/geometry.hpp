#pragma once

#include <string>
#include <vector>

namespace chainrec {

// Phase-space point.  Kept as a plain coordinate vector; validity checks
// happen at the construction boundaries (curves, chains, specs).
using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Axis-aligned compact domain.
using BoxDomain = std::vector<Interval>;

bool point_finite(const Point& p);
void check_point(const Point& p, int dim, const char* where);
bool inside_domain(const BoxDomain& dom, const Point& p, double slack = 0.0);

// Distance on the phase space: plain Euclidean, or a flat torus where each
// axis wraps with its own period.
class Metric {
 public:
  static Metric euclidean(int dim);
  static Metric torus(std::vector<double> periods);

  double distance(const Point& a, const Point& b) const;

  bool wraps(int axis) const { return periods_[axis] > 0.0; }
  double period(int axis) const { return periods_[axis]; }
  int dim() const { return int(periods_.size()); }
  bool is_torus() const;
  const char* kind_name() const;

  // Signed shortest displacement from a to b along one axis.
  double axis_delta(double a, double b, int axis) const;
  // Wrap a coordinate into [lo, lo + period) on wrapping axes.
  double wrap_coord(double x, double lo, int axis) const;

 private:
  explicit Metric(std::vector<double> periods) : periods_(std::move(periods)) {}
  std::vector<double> periods_;  // per axis; <= 0 means non-wrapping
};

double metric_distance(const Metric& m, const Point& a, const Point& b);

}  // namespace chainrec
