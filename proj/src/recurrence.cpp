#include "chainrec/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "chainrec/json_io.hpp"

namespace chainrec {

namespace {

// Iterative Tarjan; recursion would overflow on path-like graphs.
struct TarjanState {
  const std::vector<std::vector<BoxIndex>>& succ;
  std::vector<int> index, low, comp;
  std::vector<char> on_stack;
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;

  explicit TarjanState(const std::vector<std::vector<BoxIndex>>& s)
      : succ(s),
        index(s.size(), -1),
        low(s.size(), 0),
        comp(s.size(), -1),
        on_stack(s.size(), 0) {}

  void run(int root) {
    struct Frame {
      int v;
      size_t child;
    };
    std::vector<Frame> frames = {{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < succ[size_t(f.v)].size()) {
        const int w = int(succ[size_t(f.v)][f.child++]);
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == f.v) break;
          }
          ++next_comp;
        }
        const int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
};

}  // namespace

SccPartition strongly_connected_components(const std::vector<std::vector<BoxIndex>>& succ) {
  TarjanState st(succ);
  for (int v = 0; v < int(succ.size()); ++v)
    if (st.index[v] < 0) st.run(v);

  // renumber components by smallest contained vertex
  const int nc = st.next_comp;
  std::vector<int> min_vertex(nc, int(succ.size()));
  for (int v = 0; v < int(succ.size()); ++v)
    min_vertex[st.comp[v]] = std::min(min_vertex[st.comp[v]], v);
  std::vector<int> order(nc);
  for (int c = 0; c < nc; ++c) order[c] = c;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return min_vertex[a] < min_vertex[b]; });
  std::vector<int> relabel(nc);
  for (int i = 0; i < nc; ++i) relabel[order[i]] = i;

  SccPartition p;
  p.comp.resize(succ.size());
  p.members.assign(size_t(nc), {});
  for (int v = 0; v < int(succ.size()); ++v) {
    p.comp[v] = relabel[st.comp[v]];
    p.members[size_t(p.comp[v])].push_back(v);
  }
  return p;
}

SccPartition strongly_connected_components(const TransitionGraph& graph) {
  return strongly_connected_components(graph.succ);
}

BoxSet recurrent_boxes(const TransitionGraph& graph) {
  const SccPartition p = strongly_connected_components(graph.succ);
  BoxSet out;
  for (const auto& comp : p.members) {
    if (comp.size() >= 2) {
      for (int v : comp) out.push_back(v);
    } else if (graph.has_edge(comp[0], comp[0])) {
      out.push_back(comp[0]);
    }
  }
  return sorted_boxset(std::move(out));
}

namespace {

// Condensation DAG; reachability is computed only from recurrent components
// (there are few of those), by BFS over the component graph.
struct Condensed {
  SccPartition part;
  std::vector<char> comp_recurrent;
  std::vector<std::vector<int>> comp_succ;        // deduped DAG edges
  std::vector<int> recurrent_comps;               // ids of recurrent components
  std::vector<std::vector<char>> reach;           // per recurrent comp, length >= 1

  bool reaches(int from_comp, int to_comp) const {
    for (size_t i = 0; i < recurrent_comps.size(); ++i)
      if (recurrent_comps[i] == from_comp) return reach[i][size_t(to_comp)] != 0;
    return false;
  }
};

Condensed condense(const TransitionGraph& graph) {
  Condensed c{strongly_connected_components(graph.succ), {}, {}, {}, {}};
  const int nc = int(c.part.members.size());
  c.comp_recurrent.assign(size_t(nc), 0);
  for (int k = 0; k < nc; ++k) {
    const auto& m = c.part.members[size_t(k)];
    if (m.size() >= 2 || graph.has_edge(m[0], m[0])) {
      c.comp_recurrent[size_t(k)] = 1;
      c.recurrent_comps.push_back(k);
    }
  }
  c.comp_succ.assign(size_t(nc), {});
  for (BoxIndex u = 0; u < BoxIndex(graph.succ.size()); ++u)
    for (BoxIndex v : graph.succ[size_t(u)]) {
      const int cu = c.part.comp[size_t(u)], cv = c.part.comp[size_t(v)];
      c.comp_succ[size_t(cu)].push_back(cv);
    }
  for (auto& row : c.comp_succ) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  for (int k : c.recurrent_comps) {
    std::vector<char> seen(size_t(nc), 0);
    std::vector<int> queue;
    for (int v : c.comp_succ[size_t(k)])
      if (!seen[size_t(v)]) {
        seen[size_t(v)] = 1;
        queue.push_back(v);
      }
    for (size_t h = 0; h < queue.size(); ++h)
      for (int v : c.comp_succ[size_t(queue[h])])
        if (!seen[size_t(v)]) {
          seen[size_t(v)] = 1;
          queue.push_back(v);
        }
    c.reach.push_back(std::move(seen));
  }
  return c;
}

}  // namespace

ChainGraph chain_graph(const TransitionGraph& graph) {
  const Condensed c = condense(graph);
  const int nc = int(c.part.members.size());
  ChainGraph cg;
  cg.semantics = graph.semantics;
  std::vector<int> node_of(size_t(nc), -1);
  for (int k = 0; k < nc; ++k) {
    if (!c.comp_recurrent[size_t(k)]) continue;
    node_of[size_t(k)] = int(cg.nodes.size());
    std::vector<BoxIndex> boxes(c.part.members[size_t(k)].begin(),
                                c.part.members[size_t(k)].end());
    cg.nodes.push_back(std::move(boxes));
    cg.recurrent.push_back(true);
  }
  for (int u : c.recurrent_comps) {
    for (int v : c.recurrent_comps) {
      if (u == v) continue;
      if (c.reaches(u, v)) cg.edges.emplace_back(node_of[size_t(u)], node_of[size_t(v)]);
    }
  }
  std::sort(cg.edges.begin(), cg.edges.end());
  return cg;
}

bool downstream(const TransitionGraph& graph, BoxIndex from, BoxIndex to) {
  if (from < 0 || from >= graph.grid.count() || to < 0 || to >= graph.grid.count())
    throw std::invalid_argument("downstream: box index out of range");
  // BFS from the successors of `from`
  std::vector<char> seen(graph.succ.size(), 0);
  std::vector<BoxIndex> queue;
  for (BoxIndex v : graph.succ[size_t(from)]) {
    if (v == to) return true;
    if (!seen[size_t(v)]) {
      seen[size_t(v)] = 1;
      queue.push_back(v);
    }
  }
  for (size_t h = 0; h < queue.size(); ++h)
    for (BoxIndex v : graph.succ[size_t(queue[h])]) {
      if (v == to) return true;
      if (!seen[size_t(v)]) {
        seen[size_t(v)] = 1;
        queue.push_back(v);
      }
    }
  return false;
}

BoxSet downstream_set(const TransitionGraph& graph, BoxIndex from) {
  std::vector<char> seen(graph.succ.size(), 0);
  std::vector<BoxIndex> queue;
  for (BoxIndex v : graph.succ[size_t(from)])
    if (!seen[size_t(v)]) {
      seen[size_t(v)] = 1;
      queue.push_back(v);
    }
  for (size_t h = 0; h < queue.size(); ++h)
    for (BoxIndex v : graph.succ[size_t(queue[h])])
      if (!seen[size_t(v)]) {
        seen[size_t(v)] = 1;
        queue.push_back(v);
      }
  BoxSet out;
  for (BoxIndex b = 0; b < BoxIndex(seen.size()); ++b)
    if (seen[size_t(b)]) out.push_back(b);
  return out;
}

namespace {

std::set<std::vector<BoxIndex>> node_family(const ChainGraph& cg) {
  std::set<std::vector<BoxIndex>> fam;
  for (const auto& n : cg.nodes) fam.insert(n);
  return fam;
}

// Edges as (min box of source node, min box of target node).
std::set<std::pair<BoxIndex, BoxIndex>> edge_family(const ChainGraph& cg) {
  std::set<std::pair<BoxIndex, BoxIndex>> fam;
  for (const auto& [u, v] : cg.edges)
    fam.insert({cg.nodes[size_t(u)].front(), cg.nodes[size_t(v)].front()});
  return fam;
}

}  // namespace

EquivalenceReport compare_semantics(const SemiflowSpec& spec, const BoxGrid& grid,
                                    const CompareParams& params) {
  const Rng rng(params.seed);
  const TransitionGraph gs = shadow_transition_graph(spec, grid, params.eps_shadow,
                                                     params.samples_per_box, rng);
  const TransitionGraph gc =
      conley_transition_graph(spec, grid, params.eps_conley, params.t_min,
                              params.time_samples, params.samples_per_box, rng);
  return compare_graphs(spec, gs, gc, params);
}

EquivalenceReport compare_graphs(const SemiflowSpec& spec,
                                 const TransitionGraph& gs,
                                 const TransitionGraph& gc,
                                 const CompareParams& params) {
  EquivalenceReport rep;
  rep.params = params;
  rep.system = spec.name;
  rep.subdivisions = gs.grid.subdivisions();

  const BoxSet rs = recurrent_boxes(gs);
  const BoxSet rc = recurrent_boxes(gc);
  std::set_symmetric_difference(rs.begin(), rs.end(), rc.begin(), rc.end(),
                                std::back_inserter(rep.sym_diff));
  rep.recurrent_match = rep.sym_diff.empty();

  const ChainGraph cgs = chain_graph(gs);
  const ChainGraph cgc = chain_graph(gc);
  rep.node_match = node_family(cgs) == node_family(cgc);
  rep.edge_match = rep.node_match && edge_family(cgs) == edge_family(cgc);

  // downstream relation on pairs of boxes recurrent under both semantics
  BoxSet common;
  std::set_intersection(rs.begin(), rs.end(), rc.begin(), rc.end(),
                        std::back_inserter(common));
  const Condensed cs = condense(gs);
  const Condensed cc = condense(gc);
  rep.downstream_match = true;
  for (BoxIndex a : common) {
    for (BoxIndex b : common) {
      const int ca = cs.part.comp[size_t(a)], cb = cs.part.comp[size_t(b)];
      const int da = cc.part.comp[size_t(a)], db = cc.part.comp[size_t(b)];
      const bool down_s = (ca == cb) || cs.reaches(ca, cb);
      const bool down_c = (da == db) || cc.reaches(da, db);
      if (down_s != down_c) {
        rep.downstream_match = false;
        break;
      }
    }
    if (!rep.downstream_match) break;
  }
  return rep;
}

ContainmentReport attractor_invariance_check(const SemiflowSpec& spec,
                                             const BoxGrid& grid, double eps,
                                             const BoxSet& attractor_cover,
                                             int samples_per_box, const Rng& rng) {
  const TransitionGraph g =
      shadow_transition_graph(spec, grid, eps, samples_per_box, rng);
  std::vector<char> seen(g.succ.size(), 0);
  std::vector<BoxIndex> queue;
  for (BoxIndex b : attractor_cover)
    if (!seen[size_t(b)]) {
      seen[size_t(b)] = 1;
      queue.push_back(b);
    }
  for (size_t h = 0; h < queue.size(); ++h)
    for (BoxIndex v : g.succ[size_t(queue[h])])
      if (!seen[size_t(v)]) {
        seen[size_t(v)] = 1;
        queue.push_back(v);
      }
  ContainmentReport rep;
  for (BoxIndex b = 0; b < BoxIndex(seen.size()); ++b)
    if (seen[size_t(b)]) rep.reachable.push_back(b);
  rep.allowed = epsilon_neighborhood(grid, attractor_cover, eps + grid.diameter());
  std::set_difference(rep.reachable.begin(), rep.reachable.end(), rep.allowed.begin(),
                      rep.allowed.end(), std::back_inserter(rep.violations));
  rep.passed = rep.violations.empty();
  return rep;
}

RestrictionReport restriction_check(const SemiflowSpec& spec, const BoxGrid& grid,
                                    double eps, double t_min, int time_samples,
                                    const BoxSet& attractor_cover,
                                    int samples_per_box, const Rng& rng) {
  const BoxSet sub = epsilon_neighborhood(grid, attractor_cover, eps);
  std::vector<char> mask(size_t(grid.count()), 0);
  for (BoxIndex b : sub) mask[size_t(b)] = 1;

  const TransitionGraph full = conley_transition_graph(
      spec, grid, eps, t_min, time_samples, samples_per_box, rng);
  const TransitionGraph restricted = conley_transition_graph(
      spec, grid, eps, t_min, time_samples, samples_per_box, rng, &mask);

  RestrictionReport rep;
  const BoxSet r_full = recurrent_boxes(full);
  BoxSet r_full_common;
  for (BoxIndex b : r_full)
    if (mask[size_t(b)]) r_full_common.push_back(b);
  const BoxSet r_sub = recurrent_boxes(restricted);
  rep.recurrent_ok = r_full_common == r_sub && r_full.size() == r_full_common.size();

  const ChainGraph cg_full = chain_graph(full);
  const ChainGraph cg_sub = chain_graph(restricted);
  rep.nodes_ok = node_family(cg_full) == node_family(cg_sub);
  rep.edges_ok = rep.nodes_ok && edge_family(cg_full) == edge_family(cg_sub);
  rep.passed = rep.recurrent_ok && rep.nodes_ok && rep.edges_ok;
  return rep;
}

std::string chain_graph_to_dot(const ChainGraph& cg, const BoxGrid& grid) {
  std::string s = "digraph chaingraph {\n  label=\"semantics=";
  s += semantics_name(cg.semantics);
  s += " eps=";
  s += fmt_double(semantics_eps(cg.semantics));
  s += "\";\n";
  for (size_t i = 0; i < cg.nodes.size(); ++i) {
    const Point c = grid.center(cg.nodes[i].front());
    std::string label = "(";
    for (size_t k = 0; k < c.size(); ++k) {
      if (k) label += ',';
      label += fmt_double(c[k]);
    }
    label += ')';
    s += "  n" + std::to_string(i) + " [shape=ellipse,label=\"" + label + "\"];\n";
  }
  for (const auto& [u, v] : cg.edges)
    s += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
  s += "}\n";
  return s;
}

std::string chain_graph_to_json(const ChainGraph& cg) {
  std::string s = "{\"semantics\":\"";
  s += semantics_name(cg.semantics);
  s += "\",\"nodes\":[";
  for (size_t i = 0; i < cg.nodes.size(); ++i) {
    if (i) s += ',';
    s += "{\"boxes\":[";
    for (size_t k = 0; k < cg.nodes[i].size(); ++k) {
      if (k) s += ',';
      s += std::to_string(cg.nodes[i][k]);
    }
    s += "],\"recurrent\":true}";
  }
  s += "],\"edges\":[";
  for (size_t i = 0; i < cg.edges.size(); ++i) {
    if (i) s += ',';
    s += '[' + std::to_string(cg.edges[i].first) + ',' +
         std::to_string(cg.edges[i].second) + ']';
  }
  s += "]}";
  return s;
}

std::string report_to_json(const EquivalenceReport& r) {
  std::string s = "{\"recurrent_match\":";
  s += r.recurrent_match ? "true" : "false";
  s += ",\"sym_diff\":[";
  for (size_t i = 0; i < r.sym_diff.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(r.sym_diff[i]);
  }
  s += "],\"node_match\":";
  s += r.node_match ? "true" : "false";
  s += ",\"edge_match\":";
  s += r.edge_match ? "true" : "false";
  s += ",\"downstream_match\":";
  s += r.downstream_match ? "true" : "false";
  s += ",\"params\":{\"system\":\"" + r.system + "\",\"subdivisions\":[";
  for (size_t i = 0; i < r.subdivisions.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(r.subdivisions[i]);
  }
  s += "],\"eps_conley\":" + fmt_double(r.params.eps_conley);
  s += ",\"eps_shadow\":" + fmt_double(r.params.eps_shadow);
  s += ",\"t_min\":" + fmt_double(r.params.t_min);
  s += ",\"time_samples\":" + std::to_string(r.params.time_samples);
  s += ",\"samples_per_box\":" + std::to_string(r.params.samples_per_box);
  s += ",\"seed\":" + std::to_string(r.params.seed);
  s += "}}";
  return s;
}

std::string recurrent_csv(const ChainGraph& cg, const BoxGrid& grid) {
  std::string s = "box_index";
  for (int i = 0; i < grid.dim(); ++i) s += ",center_" + std::to_string(i);
  s += ",node_id,semantics\n";
  // rows sorted by box index
  std::vector<std::pair<BoxIndex, int>> rows;
  for (size_t n = 0; n < cg.nodes.size(); ++n)
    for (BoxIndex b : cg.nodes[n]) rows.emplace_back(b, int(n));
  std::sort(rows.begin(), rows.end());
  for (const auto& [b, n] : rows) {
    s += std::to_string(b);
    const Point c = grid.center(b);
    for (double x : c) {
      s += ',';
      s += fmt_double(x);
    }
    s += ',' + std::to_string(n) + ',';
    s += semantics_name(cg.semantics);
    s += '\n';
  }
  return s;
}

}  // namespace chainrec
