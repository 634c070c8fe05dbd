#include "chainrec/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace chainrec {

bool point_finite(const Point& p) {
  for (double c : p)
    if (!std::isfinite(c)) return false;
  return true;
}

void check_point(const Point& p, int dim, const char* where) {
  if (int(p.size()) != dim)
    throw std::invalid_argument(std::string(where) + ": point dimension " +
                                std::to_string(p.size()) + ", expected " +
                                std::to_string(dim));
  if (!point_finite(p))
    throw std::invalid_argument(std::string(where) + ": non-finite coordinate");
}

bool inside_domain(const BoxDomain& dom, const Point& p, double slack) {
  if (p.size() != dom.size()) return false;
  for (size_t i = 0; i < dom.size(); ++i)
    if (p[i] < dom[i].lo - slack || p[i] > dom[i].hi + slack) return false;
  return true;
}

Metric Metric::euclidean(int dim) {
  return Metric(std::vector<double>(size_t(dim), 0.0));
}

Metric Metric::torus(std::vector<double> periods) {
  for (double p : periods)
    if (!(p > 0.0)) throw std::invalid_argument("torus metric: period must be > 0");
  return Metric(std::move(periods));
}

bool Metric::is_torus() const {
  for (double p : periods_)
    if (p > 0.0) return true;
  return false;
}

const char* Metric::kind_name() const { return is_torus() ? "torus" : "euclidean"; }

double Metric::axis_delta(double a, double b, int axis) const {
  double d = b - a;
  if (periods_[axis] > 0.0) {
    d = std::remainder(d, periods_[axis]);  // -> [-P/2, P/2]
  }
  return d;
}

double Metric::wrap_coord(double x, double lo, int axis) const {
  if (periods_[axis] <= 0.0) return x;
  const double p = periods_[axis];
  double y = std::fmod(x - lo, p);
  if (y < 0.0) y += p;
  return lo + y;
}

double Metric::distance(const Point& a, const Point& b) const {
  if (a.size() != b.size() || int(a.size()) != dim())
    throw std::invalid_argument("metric_distance: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    double d = std::abs(b[i] - a[i]);
    if (periods_[i] > 0.0) {
      d = std::fmod(d, periods_[i]);
      d = std::min(d, periods_[i] - d);
    }
    s += d * d;
  }
  return std::sqrt(s);
}

double metric_distance(const Metric& m, const Point& a, const Point& b) {
  return m.distance(a, b);
}

}  // namespace chainrec
