#pragma once

#include <cstdint>
#include <vector>

#include "chainrec/geometry.hpp"
#include "chainrec/semiflow.hpp"

namespace chainrec {

using BoxIndex = long;
// Sorted, duplicate-free set of box indices.
using BoxSet = std::vector<BoxIndex>;

// Uniform box tiling of an axis-aligned compact domain.  Boxes are
// half-open [lo + k*w, lo + (k+1)*w) except the last along each axis, which
// includes the upper face.  Wrapping axes follow the metric.
class BoxGrid {
 public:
  BoxGrid(BoxDomain domain, std::vector<int> subdivisions, Metric metric);

  int dim() const { return int(domain_.size()); }
  BoxIndex count() const { return total_; }
  const BoxDomain& domain() const { return domain_; }
  const std::vector<int>& subdivisions() const { return subdiv_; }
  const Metric& metric() const { return metric_; }
  double width(int axis) const { return width_[axis]; }
  double diameter() const { return diameter_; }

  std::vector<int> multi_index(BoxIndex b) const;
  BoxIndex flat_index(const std::vector<int>& mi) const;

  Point center(BoxIndex b) const;
  Interval axis_range(BoxIndex b, int axis) const;
  // -1 when the point lies outside a non-wrapping axis range.
  BoxIndex box_of(const Point& p) const;

  // Metric distance from a point to the box (as a set).
  double dist_to_box(const Point& p, BoxIndex b) const;
  // All boxes whose set-distance to p is < r.
  std::vector<BoxIndex> boxes_within(const Point& p, double r) const;

  // Deterministic per-box sample points: center, then corners, then seeded
  // interior points if more are requested.  n = 0 means corners + center.
  std::vector<Point> samples(BoxIndex b, int n, const Rng& rng) const;

 private:
  BoxDomain domain_;
  std::vector<int> subdiv_;
  std::vector<double> width_;
  Metric metric_;
  double diameter_ = 0.0;
  BoxIndex total_ = 0;
};

BoxSet sorted_boxset(std::vector<BoxIndex> v);
bool boxset_contains(const BoxSet& s, BoxIndex b);

// Boxes whose closure intersects the given axis-aligned hull.
BoxSet boxes_meeting(const BoxGrid& grid, const BoxDomain& hull);

// All boxes whose center lies within eps + diam/2 of some box of the set.
BoxSet epsilon_neighborhood(const BoxGrid& grid, const BoxSet& boxes, double eps);

struct ForwardHull {
  BoxSet boxes;
  bool closed;  // box-set map reached a fixed point before the horizon
};

// Iterated box cover of the sampled time-`step` flow images, until closure
// or until horizon time is exhausted.
ForwardHull forward_hull(const SemiflowSpec& spec, const BoxGrid& grid,
                         const BoxSet& start, double horizon, double step);

}  // namespace chainrec
