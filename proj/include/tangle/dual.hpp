#pragma once

// Dual-graph machinery: minimal intersection numbers of curves in the square
// with the diagram, computed as shortest paths in the face-adjacency dual.
//
// Nodes are the faces of the arrangement plus one node per boundary terminal.
// Crossing a diagram edge costs 1 (unless overridden); moving between a
// terminal and its incident face costs 0. The outer face has no incident
// arcs and is therefore never entered.

#include <deque>
#include <functional>

#include "arrange.hpp"

namespace tangle {

struct DualGraph {
    struct Arc {
        int to = -1;
        int cost = 0;
        int via_edge = -1;  // diagram edge crossed, or -1 for terminal contact
    };
    int n_faces = 0;
    int n_terminals = 0;
    std::vector<std::vector<Arc>> adj;

    int terminal_node(int t) const { return n_faces + t; }
};

// edge_cost maps a diagram edge id to 0 or 1 (default: every edge costs 1).
inline DualGraph build_dual(const Arrangement& a,
                            const std::function<int(int)>& edge_cost = nullptr) {
    DualGraph g;
    g.n_faces = a.n_faces();
    g.n_terminals = int(a.terminals.size());
    g.adj.assign(g.n_faces + g.n_terminals, {});
    for (int e = 0; e < int(a.d.edges.size()); ++e) {
        int h = 2 * e;
        if (h >= a.m.n_diagram_halves || !a.m.half_present[h]) continue;
        int f1 = a.m.face_of_half[h];
        int f2 = a.m.face_of_half[twin(h)];
        int c = edge_cost ? edge_cost(e) : 1;
        g.adj[f1].push_back({f2, c, e});
        g.adj[f2].push_back({f1, c, e});
    }
    for (int t = 0; t < g.n_terminals; ++t) {
        int f = a.terminals[t].inner_face;
        g.adj[g.terminal_node(t)].push_back({f, 0, -1});
        g.adj[f].push_back({g.terminal_node(t), 0, -1});
    }
    return g;
}

struct DualPath {
    bool found = false;
    int cost = -1;
    std::vector<int> nodes;          // node sequence, source to target
    std::vector<int> crossed_edges;  // diagram edges crossed by the cost-1 steps, in order
};

// Multi-source 0/1-cost shortest path (deque BFS) with path reconstruction.
inline DualPath dual_shortest(const DualGraph& g, const std::vector<int>& sources,
                              const std::vector<int>& targets) {
    const int INF = 1 << 29;
    int n = int(g.adj.size());
    std::vector<int> dist(n, INF), par_node(n, -1), par_via(n, -2);
    std::deque<int> dq;
    for (int s : sources) {
        if (dist[s] == 0) continue;
        dist[s] = 0;
        dq.push_front(s);
    }
    std::vector<char> is_target(n, 0);
    for (int t : targets) is_target[t] = 1;
    while (!dq.empty()) {
        int u = dq.front();
        dq.pop_front();
        for (const auto& arc : g.adj[u]) {
            int nd = dist[u] + arc.cost;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                par_node[arc.to] = u;
                par_via[arc.to] = arc.via_edge;
                if (arc.cost == 0)
                    dq.push_front(arc.to);
                else
                    dq.push_back(arc.to);
            }
        }
    }
    DualPath p;
    int best = -1;
    for (int t : targets)
        if (dist[t] < INF && (best < 0 || dist[t] < dist[best])) best = t;
    if (best < 0) return p;
    p.found = true;
    p.cost = dist[best];
    int cur = best;
    while (cur >= 0) {
        p.nodes.push_back(cur);
        if (par_node[cur] >= 0 && par_via[cur] >= 0) p.crossed_edges.push_back(par_via[cur]);
        cur = par_node[cur];
    }
    std::reverse(p.nodes.begin(), p.nodes.end());
    std::reverse(p.crossed_edges.begin(), p.crossed_edges.end());
    return p;
}

namespace detail {

inline std::vector<int> terminal_nodes_on(const Arrangement& a, const DualGraph& g, Side s) {
    std::vector<int> ns;
    for (int t = 0; t < int(a.terminals.size()); ++t)
        if (a.terminals[t].side == s) ns.push_back(g.terminal_node(t));
    return ns;
}

}  // namespace detail

// Shortest dual path from the H+ terminals to the H- terminals.
inline DualPath min_vert_path(const Arrangement& a) {
    DualGraph g = build_dual(a);
    return dual_shortest(g, detail::terminal_nodes_on(a, g, Side::Hp),
                         detail::terminal_nodes_on(a, g, Side::Hm));
}

inline int min_vert(const Arrangement& a) {
    DualPath p = min_vert_path(a);
    if (!p.found) throw Error("min_vert: no dual path found");
    return p.cost;
}

inline int min_vert(const Diagram& d) { return min_vert(arrange(d)); }

// Shortest dual path between two boundary regions (1-based L indices).
inline int min_ij(const Arrangement& a, int i, int j) {
    if (i < 1 || i > a.n_regions() || j < 1 || j > a.n_regions())
        throw Error("min_ij: region index out of range");
    DualGraph g = build_dual(a);
    DualPath p = dual_shortest(g, {g.terminal_node(a.region_terminal[i])},
                               {g.terminal_node(a.region_terminal[j])});
    if (!p.found) throw Error("min_ij: no dual path found");
    return p.cost;
}

inline int min_ij(const Diagram& d, int i, int j) { return min_ij(arrange(d), i, j); }

inline std::vector<std::vector<int>> v_matrix(const Diagram& d) {
    Arrangement a = arrange(d);
    int m = a.n_regions();
    std::vector<std::vector<int>> v(m, std::vector<int>(m, 0));
    for (int i = 1; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) v[i - 1][j - 1] = v[j - 1][i - 1] = min_ij(a, i, j);
    return v;
}

// Shortest ray: from the faces at the critical point to any boundary
// terminal, within an arrangement (usually a half-filtered one).
inline DualPath min_ray_path(const Arrangement& a) {
    int o = a.d.find_o();
    if (o < 0) throw Error("min_ray: no critical point");
    if (a.m.arot[o].empty()) throw Error("min_ray: critical point dropped by the filter");
    DualGraph g = build_dual(a);
    std::vector<int> sources = a.faces_at(o);
    std::vector<int> targets;
    for (int t = 0; t < int(a.terminals.size()); ++t) targets.push_back(g.terminal_node(t));
    return dual_shortest(g, sources, targets);
}

// Minimal ray crossing count of one half of a subdivided diagram.
inline int min_ray(const Diagram& d, HalfTag half) {
    if (half == HalfTag::None) throw Error("min_ray: half must be plus or minus");
    Arrangement a =
        arrange(d, half == HalfTag::Plus ? HalfFilter::PlusOnly : HalfFilter::MinusOnly);
    DualPath p = min_ray_path(a);
    if (!p.found) throw Error("min_ray: no dual path found");
    return p.cost;
}

}  // namespace tangle
