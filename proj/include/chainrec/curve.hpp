#pragma once

#include <cstddef>
#include <vector>

#include "chainrec/geometry.hpp"

namespace chainrec {

// Piecewise-continuous candidate chain, stored as time-stamped samples.
// A jump mark at index j declares a discontinuity at time t_j: the sample at
// j holds the post-jump (right-limit) value, and the curve is taken constant
// at the previous sample on (t_{j-1}, t_j).  Between unmarked samples the
// curve is interpolated linearly (shortest arc on wrapping axes).
class Curve {
 public:
  Curve(std::vector<double> times, std::vector<Point> points,
        std::vector<std::size_t> jump_marks, Metric metric, double h_max,
        double continuity_budget);

  double duration() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<std::size_t>& jump_marks() const { return jumps_; }
  const Metric& metric() const { return metric_; }
  int dim() const { return int(points_.front().size()); }

  bool is_jump(std::size_t index) const;
  Point value_at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Point> points_;
  std::vector<std::size_t> jumps_;  // sorted
  Metric metric_;
};

// Classical chain: points c_0..c_n with hop times t_0..t_{n-1}.  Hop times
// are only required positive here; any floor T is checked by the validator,
// so one chain value can be tested against several parameter pairs.
struct ConleyChain {
  std::vector<Point> points;
  std::vector<double> times;

  ConleyChain(std::vector<Point> pts, std::vector<double> ts);
  std::size_t hops() const { return times.size(); }
  double total_time() const;
};

struct ChainParams {
  double epsilon = 0.0;
  double t_min = 0.0;

  ChainParams(double eps, double tmin);
};

}  // namespace chainrec
