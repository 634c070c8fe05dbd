#pragma once

#include <string>
#include <variant>
#include <vector>

#include "chainrec/boxgrid.hpp"

namespace chainrec {

struct ConleySemantics {
  double eps;
  double t_min;
  int time_samples;
};

struct ShadowSemantics {
  double eps;
};

using Semantics = std::variant<ConleySemantics, ShadowSemantics>;

const char* semantics_name(const Semantics& s);
double semantics_eps(const Semantics& s);

// Box-index digraph outer-approximating reachability at tolerance eps.
// Edges are sorted and duplicate-free; construction is parallel over source
// boxes and the merged result does not depend on the worker count.
struct TransitionGraph {
  BoxGrid grid;
  Semantics semantics;
  std::vector<std::vector<BoxIndex>> succ;
  int samples_per_box = 0;
  double flow_step = 0.0;
  long escaped_samples = 0;

  bool has_edge(BoxIndex u, BoxIndex v) const;
  long edge_count() const;
};

// Unit-time hop graph: edge b -> b' iff some sample of b lands, under F^1,
// within eps + diam/2 of b'.  Boxes whose center moves less than eps under
// F^1 get a self-edge.  An optional mask restricts sources and targets.
TransitionGraph shadow_transition_graph(const SemiflowSpec& spec, const BoxGrid& grid,
                                        double eps, int samples_per_box,
                                        const Rng& rng,
                                        const std::vector<char>* mask = nullptr);

// Hop-time graph: edge b -> b' iff some sample of b lands, under F^t for some
// t in the arithmetic grid of [t_min, 2 t_min], within eps + diam/2 of b'.
TransitionGraph conley_transition_graph(const SemiflowSpec& spec, const BoxGrid& grid,
                                        double eps, double t_min, int time_samples,
                                        int samples_per_box, const Rng& rng,
                                        const std::vector<char>* mask = nullptr);

// Serial full-scan reference builders (no candidate windows); used as the
// oracle the parallel kernels are tested against.
TransitionGraph shadow_transition_graph_reference(const SemiflowSpec& spec,
                                                  const BoxGrid& grid, double eps,
                                                  int samples_per_box, const Rng& rng);
TransitionGraph conley_transition_graph_reference(const SemiflowSpec& spec,
                                                  const BoxGrid& grid, double eps,
                                                  double t_min, int time_samples,
                                                  int samples_per_box, const Rng& rng);

// {"n":N,"edges":[[u,v],...]} with edges sorted lexicographically.
std::string graph_to_json(const TransitionGraph& g);
std::string graph_to_dot(const TransitionGraph& g);

}  // namespace chainrec
