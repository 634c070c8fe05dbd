#include "chainrec/boxgrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainrec {

BoxGrid::BoxGrid(BoxDomain domain, std::vector<int> subdivisions, Metric metric)
    : domain_(std::move(domain)), subdiv_(std::move(subdivisions)), metric_(std::move(metric)) {
  if (domain_.empty() || subdiv_.size() != domain_.size())
    throw std::invalid_argument("grid: need one subdivision count per axis");
  if (metric_.dim() != int(domain_.size()))
    throw std::invalid_argument("grid: metric dimension mismatch");
  total_ = 1;
  double d2 = 0.0;
  for (size_t i = 0; i < domain_.size(); ++i) {
    if (!(domain_[i].hi > domain_[i].lo))
      throw std::invalid_argument("grid: degenerate axis");
    if (subdiv_[i] < 1) throw std::invalid_argument("grid: subdivisions must be >= 1");
    width_.push_back((domain_[i].hi - domain_[i].lo) / subdiv_[i]);
    total_ *= subdiv_[i];
    double w = width_[i];
    if (metric_.wraps(int(i))) w = std::min(w, metric_.period(int(i)) - w);
    d2 += w * w;
  }
  diameter_ = std::sqrt(d2);
}

std::vector<int> BoxGrid::multi_index(BoxIndex b) const {
  std::vector<int> mi(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    mi[i] = int(b % subdiv_[i]);
    b /= subdiv_[i];
  }
  return mi;
}

BoxIndex BoxGrid::flat_index(const std::vector<int>& mi) const {
  BoxIndex b = 0;
  for (int i = 0; i < dim(); ++i) b = b * subdiv_[i] + mi[i];
  return b;
}

Point BoxGrid::center(BoxIndex b) const {
  const auto mi = multi_index(b);
  Point c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = domain_[i].lo + (mi[i] + 0.5) * width_[i];
  return c;
}

Interval BoxGrid::axis_range(BoxIndex b, int axis) const {
  const auto mi = multi_index(b);
  return {domain_[axis].lo + mi[axis] * width_[axis],
          domain_[axis].lo + (mi[axis] + 1) * width_[axis]};
}

BoxIndex BoxGrid::box_of(const Point& p) const {
  std::vector<int> mi(dim());
  for (int i = 0; i < dim(); ++i) {
    double x = p[i];
    if (metric_.wraps(i)) x = metric_.wrap_coord(x, domain_[i].lo, i);
    if (x < domain_[i].lo - 1e-12 || x > domain_[i].hi + 1e-12) return -1;
    int k = int(std::floor((x - domain_[i].lo) / width_[i]));
    k = std::clamp(k, 0, subdiv_[i] - 1);
    mi[i] = k;
  }
  return flat_index(mi);
}

double BoxGrid::dist_to_box(const Point& p, BoxIndex b) const {
  const auto mi = multi_index(b);
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double lo = domain_[i].lo + mi[i] * width_[i];
    const double hi = lo + width_[i];
    double d;
    if (metric_.wraps(i)) {
      const double x = metric_.wrap_coord(p[i], domain_[i].lo, i);
      if (x >= lo && x <= hi) {
        d = 0.0;
      } else {
        const double P = metric_.period(i);
        auto circ = [P](double a, double b2) {
          double dd = std::fmod(std::abs(a - b2), P);
          return std::min(dd, P - dd);
        };
        d = std::min(circ(x, lo), circ(x, hi));
      }
    } else {
      d = std::max({domain_[i].lo + mi[i] * width_[i] - p[i],
                    p[i] - (domain_[i].lo + (mi[i] + 1) * width_[i]), 0.0});
    }
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<BoxIndex> BoxGrid::boxes_within(const Point& p, double r) const {
  // per-axis candidate index windows
  std::vector<std::vector<int>> axis_idx(dim());
  for (int i = 0; i < dim(); ++i) {
    const double w = width_[i];
    if (metric_.wraps(i)) {
      const double x = metric_.wrap_coord(p[i], domain_[i].lo, i);
      const int k0 = std::clamp(int(std::floor((x - domain_[i].lo) / w)), 0,
                                subdiv_[i] - 1);
      const int span = int(std::ceil(r / w)) + 1;
      if (2 * span + 1 >= subdiv_[i]) {
        for (int k = 0; k < subdiv_[i]; ++k) axis_idx[i].push_back(k);
      } else {
        for (int d = -span; d <= span; ++d) {
          int k = (k0 + d) % subdiv_[i];
          if (k < 0) k += subdiv_[i];
          axis_idx[i].push_back(k);
        }
      }
    } else {
      const int klo = std::max(0, int(std::floor((p[i] - r - domain_[i].lo) / w)));
      const int khi =
          std::min(subdiv_[i] - 1, int(std::floor((p[i] + r - domain_[i].lo) / w)));
      for (int k = klo; k <= khi; ++k) axis_idx[i].push_back(k);
    }
    if (axis_idx[i].empty()) return {};
  }
  // odometer over the per-axis windows
  std::vector<BoxIndex> out;
  std::vector<size_t> pos(dim(), 0);
  std::vector<int> mi(dim());
  while (true) {
    for (int i = 0; i < dim(); ++i) mi[i] = axis_idx[i][pos[i]];
    const BoxIndex b = flat_index(mi);
    if (dist_to_box(p, b) < r) out.push_back(b);
    int axis = dim() - 1;
    while (axis >= 0 && ++pos[axis] == axis_idx[axis].size()) pos[axis--] = 0;
    if (axis < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point> BoxGrid::samples(BoxIndex b, int n, const Rng& rng) const {
  const auto mi = multi_index(b);
  std::vector<Point> pts;
  // center first, then corners in lexicographic order
  pts.push_back(center(b));
  const int corners = 1 << dim();
  for (int mask = 0; mask < corners; ++mask) {
    Point p(dim());
    for (int i = 0; i < dim(); ++i) {
      const double lo = domain_[i].lo + mi[i] * width_[i];
      p[i] = (mask >> i) & 1 ? lo + width_[i] : lo;
    }
    pts.push_back(p);
  }
  const int def = corners + 1;
  if (n <= 0 || n == def) return pts;
  if (n < def) {
    pts.resize(size_t(n));
    return pts;
  }
  Rng r = rng.fork(0x5eedull ^ std::uint64_t(b));
  while (int(pts.size()) < n) {
    Point p(dim());
    for (int i = 0; i < dim(); ++i) {
      const double lo = domain_[i].lo + mi[i] * width_[i];
      p[i] = r.uniform(lo, lo + width_[i]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

BoxSet sorted_boxset(std::vector<BoxIndex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool boxset_contains(const BoxSet& s, BoxIndex b) {
  return std::binary_search(s.begin(), s.end(), b);
}

BoxSet boxes_meeting(const BoxGrid& grid, const BoxDomain& hull) {
  if (int(hull.size()) != grid.dim())
    throw std::invalid_argument("boxes_meeting: hull dimension mismatch");
  std::vector<std::vector<int>> axis_idx(grid.dim());
  for (int i = 0; i < grid.dim(); ++i) {
    const double w = grid.width(i);
    const double lo = grid.domain()[i].lo;
    const int klo =
        std::clamp(int(std::floor((hull[i].lo - lo) / w)), 0, grid.subdivisions()[i] - 1);
    const int khi =
        std::clamp(int(std::floor((hull[i].hi - lo) / w)), 0, grid.subdivisions()[i] - 1);
    for (int k = std::max(0, klo - 1); k <= std::min(grid.subdivisions()[i] - 1, khi + 1);
         ++k) {
      // closed-box intersection test
      const double blo = lo + k * w, bhi = blo + w;
      if (bhi >= hull[i].lo - 1e-12 && blo <= hull[i].hi + 1e-12)
        axis_idx[i].push_back(k);
    }
    if (axis_idx[i].empty()) return {};
  }
  std::vector<BoxIndex> out;
  std::vector<size_t> pos(grid.dim(), 0);
  std::vector<int> mi(grid.dim());
  while (true) {
    for (int i = 0; i < grid.dim(); ++i) mi[i] = axis_idx[i][pos[i]];
    out.push_back(grid.flat_index(mi));
    int axis = grid.dim() - 1;
    while (axis >= 0 && ++pos[axis] == axis_idx[axis].size()) pos[axis--] = 0;
    if (axis < 0) break;
  }
  return sorted_boxset(std::move(out));
}

BoxSet epsilon_neighborhood(const BoxGrid& grid, const BoxSet& boxes, double eps) {
  if (eps < 0.0) throw std::invalid_argument("epsilon_neighborhood: eps must be >= 0");
  const double r = eps + grid.diameter() / 2.0;
  std::vector<char> mark(size_t(grid.count()), 0);
  for (BoxIndex b : boxes) {
    // candidate centers c with dist(c, box b) < r: center windows around b
    const Point c = grid.center(b);
    const double reach = r + grid.diameter();  // covers center offsets within the box
    for (BoxIndex cand : grid.boxes_within(c, reach)) {
      if (mark[size_t(cand)]) continue;
      if (grid.dist_to_box(grid.center(cand), b) < r) mark[size_t(cand)] = 1;
    }
  }
  BoxSet out;
  for (BoxIndex b = 0; b < grid.count(); ++b)
    if (mark[size_t(b)]) out.push_back(b);
  return out;
}

ForwardHull forward_hull(const SemiflowSpec& spec, const BoxGrid& grid,
                         const BoxSet& start, double horizon, double step) {
  if (!(horizon > 0.0)) throw std::invalid_argument("forward_hull: horizon must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("forward_hull: step must be > 0");
  std::vector<char> in(size_t(grid.count()), 0);
  for (BoxIndex b : start) in[size_t(b)] = 1;
  std::vector<BoxIndex> frontier(start.begin(), start.end());
  const long layers = long(std::floor(horizon / step + 1e-9));
  Rng rng(0);
  bool closed = false;
  for (long layer = 0; layer < layers; ++layer) {
    std::vector<BoxIndex> next;
    for (BoxIndex b : frontier) {
      for (const Point& x : grid.samples(b, 0, rng)) {
        Point y;
        try {
          y = evaluate(spec, step, x);
        } catch (const DomainEscape&) {
          continue;
        }
        const BoxIndex t = grid.box_of(y);
        if (t >= 0 && !in[size_t(t)]) {
          in[size_t(t)] = 1;
          next.push_back(t);
        }
      }
    }
    if (next.empty()) {
      // every member box has been expanded and produced nothing new, so the
      // set is a fixed point of the sampled box map
      closed = true;
      break;
    }
    frontier = std::move(next);
  }
  BoxSet out;
  for (BoxIndex b = 0; b < grid.count(); ++b)
    if (in[size_t(b)]) out.push_back(b);
  return ForwardHull{std::move(out), closed};
}

}  // namespace chainrec
