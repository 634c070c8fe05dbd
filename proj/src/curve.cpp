#include "chainrec/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chainrec {

Curve::Curve(std::vector<double> times, std::vector<Point> points,
             std::vector<std::size_t> jump_marks, Metric metric, double h_max,
             double continuity_budget)
    : times_(std::move(times)),
      points_(std::move(points)),
      jumps_(std::move(jump_marks)),
      metric_(std::move(metric)) {
  if (times_.size() != points_.size() || times_.size() < 2)
    throw std::invalid_argument("curve: need matching times/points, at least 2 samples");
  if (std::abs(times_.front()) > 1e-12)
    throw std::invalid_argument("curve: first sample time must be 0");
  if (times_.back() < 1.0 - 1e-12)
    throw std::invalid_argument("curve: duration must be >= 1");
  const int d = int(points_.front().size());
  for (const Point& p : points_) check_point(p, d, "curve");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i + 1] > times_[i]))
      throw std::invalid_argument("curve: sample times must increase strictly");
    if (times_[i + 1] - times_[i] > h_max + 1e-12)
      throw std::invalid_argument("curve: sample spacing exceeds h_max at index " +
                                  std::to_string(i));
  }
  std::sort(jumps_.begin(), jumps_.end());
  jumps_.erase(std::unique(jumps_.begin(), jumps_.end()), jumps_.end());
  for (std::size_t j : jumps_)
    if (j == 0 || j >= times_.size())
      throw std::invalid_argument("curve: jump mark out of range");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (is_jump(i + 1)) continue;
    if (metric_.distance(points_[i], points_[i + 1]) > continuity_budget)
      throw std::invalid_argument(
          "curve: undeclared discontinuity between samples " + std::to_string(i) +
          " and " + std::to_string(i + 1));
  }
}

bool Curve::is_jump(std::size_t index) const {
  return std::binary_search(jumps_.begin(), jumps_.end(), index);
}

Point Curve::value_at(double t) const {
  const double T = times_.back();
  if (t <= times_.front() + 1e-12) return points_.front();
  if (t >= T - 1e-12) return points_.back();
  // t_k <= t < t_{k+1}
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = std::size_t(it - times_.begin()) - 1;
  if (std::abs(t - times_[k]) <= 1e-9) return points_[k];
  if (std::abs(times_[k + 1] - t) <= 1e-9) return points_[k + 1];
  if (is_jump(k + 1)) return points_[k];  // hold the left branch up to the jump
  const double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
  const Point& a = points_[k];
  const Point& b = points_[k + 1];
  Point out(a.size());
  for (int i = 0; i < int(a.size()); ++i)
    out[i] = a[i] + s * metric_.axis_delta(a[i], b[i], i);
  return out;
}

ConleyChain::ConleyChain(std::vector<Point> pts, std::vector<double> ts)
    : points(std::move(pts)), times(std::move(ts)) {
  if (points.size() < 2)
    throw std::invalid_argument("chain: need at least two points");
  if (times.size() != points.size() - 1)
    throw std::invalid_argument("chain: need exactly one hop time per hop");
  const int d = int(points.front().size());
  for (const Point& p : points) check_point(p, d, "chain");
  for (double t : times)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("chain: hop times must be positive");
}

double ConleyChain::total_time() const {
  double s = 0.0;
  for (double t : times) s += t;
  return s;
}

ChainParams::ChainParams(double eps, double tmin) : epsilon(eps), t_min(tmin) {
  if (!(eps > 0.0)) throw std::invalid_argument("chain params: epsilon must be > 0");
  if (tmin < 0.0) throw std::invalid_argument("chain params: t_min must be >= 0");
}

}  // namespace chainrec
