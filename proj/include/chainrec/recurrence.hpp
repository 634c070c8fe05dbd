#pragma once

#include <string>
#include <vector>

#include "chainrec/transition.hpp"

namespace chainrec {

// Strongly connected components of an adjacency list (iterative Tarjan).
// Components are renumbered so that ids ascend with the smallest contained
// vertex, making the partition deterministic.
struct SccPartition {
  std::vector<int> comp;                    // vertex -> component id
  std::vector<std::vector<int>> members;    // component id -> sorted vertices
};

SccPartition strongly_connected_components(const std::vector<std::vector<BoxIndex>>& succ);
SccPartition strongly_connected_components(const TransitionGraph& graph);

// Boxes in a nontrivial SCC or carrying a self-edge.
BoxSet recurrent_boxes(const TransitionGraph& graph);

// Condensation restricted to recurrent components; edge M -> N iff N is
// reachable from M in the full transition graph (M != N).
struct ChainGraph {
  std::vector<std::vector<BoxIndex>> nodes;  // sorted boxes per node
  std::vector<std::pair<int, int>> edges;    // sorted (from, to) node ids
  std::vector<bool> recurrent;               // all true by construction
  Semantics semantics;
};

ChainGraph chain_graph(const TransitionGraph& graph);

// Reachability with path length >= 1 (a self-edge counts).
bool downstream(const TransitionGraph& graph, BoxIndex from, BoxIndex to);
BoxSet downstream_set(const TransitionGraph& graph, BoxIndex from);

struct CompareParams {
  double eps_conley = 0.0;
  double eps_shadow = 0.0;
  double t_min = 2.0;
  int time_samples = 5;
  int samples_per_box = 0;
  std::uint64_t seed = 0;
};

// Side-by-side run of both semantics on one grid: recurrent sets compared
// exactly, node partitions up to relabeling, condensation edges via node
// box-set identity, and the downstream relation on common recurrent pairs.
struct EquivalenceReport {
  bool recurrent_match = false;
  bool node_match = false;
  bool edge_match = false;
  bool downstream_match = false;
  std::vector<BoxIndex> sym_diff;
  CompareParams params;
  std::string system;
  std::vector<int> subdivisions;

  bool all_match() const { return recurrent_match && node_match && edge_match; }
};

EquivalenceReport compare_semantics(const SemiflowSpec& spec, const BoxGrid& grid,
                                    const CompareParams& params);
// Same comparison on graphs the caller already built.
EquivalenceReport compare_graphs(const SemiflowSpec& spec,
                                 const TransitionGraph& shadow_graph,
                                 const TransitionGraph& conley_graph,
                                 const CompareParams& params);

struct ContainmentReport {
  bool passed = false;
  BoxSet reachable;
  BoxSet allowed;
  std::vector<BoxIndex> violations;
};

// Shadow-reachable set of an attractor cover must stay within one fattening
// layer (eps + one box diameter) of the cover.
ContainmentReport attractor_invariance_check(const SemiflowSpec& spec,
                                             const BoxGrid& grid, double eps,
                                             const BoxSet& attractor_cover,
                                             int samples_per_box, const Rng& rng);

struct RestrictionReport {
  bool passed = false;
  bool recurrent_ok = false;
  bool nodes_ok = false;
  bool edges_ok = false;
};

// Conley pipeline on the full grid versus on the eps-fattened attractor
// cover; recurrent sets, node partitions and condensation edges must agree
// on the common boxes.
RestrictionReport restriction_check(const SemiflowSpec& spec, const BoxGrid& grid,
                                    double eps, double t_min, int time_samples,
                                    const BoxSet& attractor_cover,
                                    int samples_per_box, const Rng& rng);

std::string chain_graph_to_dot(const ChainGraph& cg, const BoxGrid& grid);
std::string chain_graph_to_json(const ChainGraph& cg);
std::string report_to_json(const EquivalenceReport& r);
std::string recurrent_csv(const ChainGraph& cg, const BoxGrid& grid);

}  // namespace chainrec
