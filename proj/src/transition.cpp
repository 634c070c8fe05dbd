#include "chainrec/transition.hpp"

#include <algorithm>
#include <cmath>

#include "chainrec/json_io.hpp"

namespace chainrec {

const char* semantics_name(const Semantics& s) {
  return std::holds_alternative<ShadowSemantics>(s) ? "shadow" : "conley";
}

double semantics_eps(const Semantics& s) {
  if (const auto* c = std::get_if<ConleySemantics>(&s)) return c->eps;
  return std::get<ShadowSemantics>(s).eps;
}

bool TransitionGraph::has_edge(BoxIndex u, BoxIndex v) const {
  const auto& row = succ[size_t(u)];
  return std::binary_search(row.begin(), row.end(), v);
}

long TransitionGraph::edge_count() const {
  long n = 0;
  for (const auto& row : succ) n += long(row.size());
  return n;
}

namespace {

std::vector<double> hop_time_grid(double t_min, int time_samples) {
  std::vector<double> ts;
  for (int j = 0; j < time_samples; ++j)
    ts.push_back(t_min + t_min * double(j) / double(time_samples - 1));
  return ts;
}

struct BuildConfig {
  std::vector<double> times;   // flow times probed per sample
  double eps;
  bool shadow_self_edges;      // center-motion rule (shadow only)
  int samples_per_box;
  bool parallel;
  bool full_scan;              // reference: test every target box
};

TransitionGraph build_graph(const SemiflowSpec& spec, const BoxGrid& grid,
                            Semantics semantics, const BuildConfig& cfg,
                            const Rng& rng, const std::vector<char>* mask) {
  const BoxIndex n = grid.count();
  TransitionGraph g{grid, semantics, {}, cfg.samples_per_box, spec.ode_step, 0};
  g.succ.assign(size_t(n), {});
  const double radius = cfg.eps + grid.diameter() / 2.0;
  std::vector<long> escaped(size_t(n), 0);

#pragma omp parallel for schedule(dynamic, 16) if (cfg.parallel)
  for (BoxIndex b = 0; b < n; ++b) {
    if (mask && !(*mask)[size_t(b)]) continue;
    std::vector<BoxIndex> targets;
    for (const Point& x : grid.samples(b, cfg.samples_per_box, rng)) {
      std::vector<Point> images;
      try {
        images = evaluate_grid(spec, x, cfg.times);
      } catch (const DomainEscape&) {
        ++escaped[size_t(b)];
        continue;
      }
      for (const Point& y : images) {
        if (cfg.full_scan) {
          for (BoxIndex t = 0; t < n; ++t)
            if (grid.dist_to_box(y, t) < radius) targets.push_back(t);
        } else {
          for (BoxIndex t : grid.boxes_within(y, radius)) targets.push_back(t);
        }
      }
    }
    if (cfg.shadow_self_edges) {
      const Point c = grid.center(b);
      try {
        const Point img = evaluate(spec, 1.0, c);
        if (spec.metric.distance(img, c) < cfg.eps) targets.push_back(b);
      } catch (const DomainEscape&) {
        ++escaped[size_t(b)];
      }
    }
    if (mask) {
      targets.erase(std::remove_if(targets.begin(), targets.end(),
                                   [&](BoxIndex t) { return !(*mask)[size_t(t)]; }),
                    targets.end());
    }
    g.succ[size_t(b)] = sorted_boxset(std::move(targets));
  }

  for (BoxIndex b = 0; b < n; ++b) g.escaped_samples += escaped[size_t(b)];
  return g;
}

}  // namespace

TransitionGraph shadow_transition_graph(const SemiflowSpec& spec, const BoxGrid& grid,
                                        double eps, int samples_per_box,
                                        const Rng& rng, const std::vector<char>* mask) {
  if (!(eps > 0.0)) throw std::invalid_argument("shadow graph: eps must be > 0");
  BuildConfig cfg{{1.0}, eps, true, samples_per_box, true, false};
  return build_graph(spec, grid, ShadowSemantics{eps}, cfg, rng, mask);
}

TransitionGraph conley_transition_graph(const SemiflowSpec& spec, const BoxGrid& grid,
                                        double eps, double t_min, int time_samples,
                                        int samples_per_box, const Rng& rng,
                                        const std::vector<char>* mask) {
  if (!(eps > 0.0)) throw std::invalid_argument("conley graph: eps must be > 0");
  if (t_min < 1.0) throw std::invalid_argument("conley graph: t_min must be >= 1");
  if (time_samples < 2)
    throw std::invalid_argument("conley graph: need at least 2 time samples");
  BuildConfig cfg{hop_time_grid(t_min, time_samples), eps, false, samples_per_box,
                  true, false};
  return build_graph(spec, grid, ConleySemantics{eps, t_min, time_samples}, cfg, rng,
                     mask);
}

TransitionGraph shadow_transition_graph_reference(const SemiflowSpec& spec,
                                                  const BoxGrid& grid, double eps,
                                                  int samples_per_box, const Rng& rng) {
  BuildConfig cfg{{1.0}, eps, true, samples_per_box, false, true};
  return build_graph(spec, grid, ShadowSemantics{eps}, cfg, rng, nullptr);
}

TransitionGraph conley_transition_graph_reference(const SemiflowSpec& spec,
                                                  const BoxGrid& grid, double eps,
                                                  double t_min, int time_samples,
                                                  int samples_per_box, const Rng& rng) {
  BuildConfig cfg{hop_time_grid(t_min, time_samples), eps, false, samples_per_box,
                  false, true};
  return build_graph(spec, grid, ConleySemantics{eps, t_min, time_samples}, cfg, rng,
                     nullptr);
}

std::string graph_to_json(const TransitionGraph& g) {
  std::string s = "{\"n\":" + std::to_string(g.grid.count()) + ",\"edges\":[";
  bool first = true;
  for (BoxIndex u = 0; u < g.grid.count(); ++u)
    for (BoxIndex v : g.succ[size_t(u)]) {
      if (!first) s += ',';
      first = false;
      s += '[';
      s += std::to_string(u);
      s += ',';
      s += std::to_string(v);
      s += ']';
    }
  s += "]}";
  return s;
}

std::string graph_to_dot(const TransitionGraph& g) {
  std::string s = "digraph transition {\n  label=\"semantics=";
  s += semantics_name(g.semantics);
  s += " eps=";
  s += fmt_double(semantics_eps(g.semantics));
  s += "\";\n";
  for (BoxIndex u = 0; u < g.grid.count(); ++u)
    for (BoxIndex v : g.succ[size_t(u)]) {
      s += "  b" + std::to_string(u) + " -> b" + std::to_string(v) + ";\n";
    }
  s += "}\n";
  return s;
}

}  // namespace chainrec
