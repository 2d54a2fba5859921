#pragma once

// Diagnostic pictures.  The diagram is laid out by barycentric relaxation on
// its augmented map: square corners and boundary endpoints are pinned to the
// unit square, and every other vertex, edge midpoint, and interior face node
// relaxes to the average of its neighbours.  Coordinates carry no meaning
// beyond legibility; the output bytes are a deterministic function of the
// diagram.  Strands are drawn one edge at a time as shallow curves through
// the edge's midpoint, the under strand of every crossing is clipped short on
// both sides, and the two halves of a subdivided diagram get distinct stroke
// classes.

#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "arrange.hpp"

namespace tangle {

struct RenderOptions {
    int size = 640;         // canvas edge, pixels
    int margin = 40;        // frame inset, pixels
    int iterations = 600;   // relaxation sweeps
    int samples = 16;       // points per drawn edge
    double gap = 0.18;      // curve fraction clipped at an under-crossing end
};

// One drawn strand piece: the sampled points of a single diagram edge.
struct Stroke {
    int edge = -1;
    HalfTag tag = HalfTag::None;
    std::vector<std::pair<double, double>> pts;  // canvas coordinates
};

// The layout itself, exposed so checks can measure the picture.
struct RenderGeometry {
    RenderOptions opt;
    std::vector<Stroke> strokes;
    std::vector<std::pair<double, double>> vertex_pos;  // by vertex id; (-1,-1) undrawn
    std::vector<int> endpoint_ids, crit_ids;            // drawn marker vertices
    int dropped_loops = 0;  // floating components the map leaves out
};

namespace renderdetail {

inline std::pair<double, double> lerp(std::pair<double, double> a, std::pair<double, double> b,
                                      double t) {
    return {a.first + (b.first - a.first) * t, a.second + (b.second - a.second) * t};
}

}  // namespace renderdetail

inline RenderGeometry layout(const Diagram& d, const RenderOptions& opt = {}) {
    require_valid(d, "render");
    Arrangement a = arrange(d);
    const auto& m = a.m;

    // Relaxation nodes: map nodes (diagram vertices and corners), then one
    // midpoint per diagram edge, then one node per interior face.
    int n_nodes = int(m.arot.size());
    int n_edges = int(d.edges.size());
    int n_faces = int(m.face_walks.size());
    auto mid_id = [&](int e) { return n_nodes + e; };
    auto face_id = [&](int f) { return n_nodes + n_edges + f; };
    int total = n_nodes + n_edges + n_faces;

    std::vector<std::pair<double, double>> pos(total, {0.5, 0.5});
    std::vector<char> pinned(total, 0);

    // Pin the corners, then every boundary endpoint at an even spacing along
    // its wall, read straight off the counterclockwise boundary sequence.
    const std::pair<double, double> cpos[4] = {{0, 1}, {0, 0}, {1, 0}, {1, 1}};
    for (int c = 0; c < 4; ++c) {
        pos[m.corner[c]] = cpos[c];
        pinned[m.corner[c]] = 1;
    }
    const auto& bn = m.boundary_nodes;
    int nb = int(bn.size());
    for (int i = 0; i < nb; ++i) {
        if (!m.node_is_corner[bn[i]]) continue;
        int cfrom = 0;
        while (m.corner[cfrom] != bn[i]) ++cfrom;
        // Endpoints strictly between this corner and the next.
        std::vector<int> run;
        int j = (i + 1) % nb;
        while (!m.node_is_corner[bn[j]]) {
            run.push_back(bn[j]);
            j = (j + 1) % nb;
        }
        int cto = 0;
        while (m.corner[cto] != bn[j]) ++cto;
        for (int t = 0; t < int(run.size()); ++t) {
            pos[run[t]] = renderdetail::lerp(cpos[cfrom], cpos[cto],
                                             double(t + 1) / double(run.size() + 1));
            pinned[run[t]] = 1;
        }
    }

    // Neighbour lists over the barycentric subdivision: vertex-midpoint for
    // every edge end, midpoint-face across each side, and face-node around
    // each interior face walk.  The outer face takes no node, so wall-facing
    // faces anchor to the pinned boundary instead.
    std::vector<std::vector<int>> adj(total);
    auto link = [&](int u, int v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    };
    for (int e = 0; e < n_edges; ++e) {
        if (2 * e + 1 >= int(m.half_present.size()) || !m.half_present[2 * e]) continue;
        link(m.node_of_half[2 * e], mid_id(e));
        link(m.node_of_half[2 * e + 1], mid_id(e));
        for (int h : {2 * e, 2 * e + 1}) {
            int f = m.face_of_half[h];
            if (f != m.outer_face) link(mid_id(e), face_id(f));
        }
    }
    for (int f = 0; f < n_faces; ++f) {
        if (f == m.outer_face) continue;
        for (int h : m.face_walks[f]) link(face_id(f), m.node_of_half[h]);
    }

    // Damped averaging; the damping keeps near-bipartite neighbourhoods from
    // oscillating and the sweep count is fixed, so the result is reproducible.
    std::vector<std::pair<double, double>> nxt(pos);
    for (int it = 0; it < opt.iterations; ++it) {
        for (int u = 0; u < total; ++u) {
            if (pinned[u] || adj[u].empty()) continue;
            double sx = 0, sy = 0;
            for (int v : adj[u]) {
                sx += pos[v].first;
                sy += pos[v].second;
            }
            double n = double(adj[u].size());
            nxt[u] = {0.5 * pos[u].first + 0.5 * sx / n, 0.5 * pos[u].second + 0.5 * sy / n};
        }
        std::swap(pos, nxt);
    }

    // Canvas mapping: unit square, y up, into the margined frame, y down.
    double inner = double(opt.size - 2 * opt.margin);
    auto canvas = [&](std::pair<double, double> p) -> std::pair<double, double> {
        return {opt.margin + p.first * inner, opt.margin + (1.0 - p.second) * inner};
    };

    RenderGeometry g;
    g.opt = opt;
    g.vertex_pos.assign(d.verts.size(), {-1, -1});
    for (int v = 0; v < int(d.verts.size()); ++v) {
        bool kept = v < int(m.node_kept.size()) && m.node_kept[v];
        if (!kept || !d.verts[v].alive) continue;
        g.vertex_pos[v] = canvas(pos[v]);
        if (d.verts[v].kind == VertexKind::Endpoint) g.endpoint_ids.push_back(v);
        if (d.verts[v].kind == VertexKind::CriticalO) g.crit_ids.push_back(v);
    }
    if (m.dropped_floating)
        for (int v = 0; v < int(d.verts.size()); ++v)
            if (d.verts[v].alive && m.vertex_floating[v] && d.verts[v].kind == VertexKind::Joint)
                ++g.dropped_loops;

    // Sample each edge as the quadratic through its relaxed midpoint, clipped
    // where an end meets a crossing on the under layer.
    auto under_at = [&](int h) {
        int v = m.node_of_half[h];
        if (d.verts[v].kind != VertexKind::Crossing) return false;
        int seat = -1;
        for (int i = 0; i < 4; ++i)
            if (d.rot[v][i] == h) seat = i;
        return (seat % 2) != d.verts[v].over_parity;
    };
    for (int e = 0; e < n_edges; ++e) {
        if (2 * e + 1 >= int(m.half_present.size()) || !m.half_present[2 * e]) continue;
        auto p0 = pos[m.node_of_half[2 * e]];
        auto p1 = pos[m.node_of_half[2 * e + 1]];
        auto pm = pos[mid_id(e)];
        // Control point putting the curve through the midpoint at t = 1/2.
        std::pair<double, double> ctrl{2 * pm.first - (p0.first + p1.first) / 2,
                                       2 * pm.second - (p0.second + p1.second) / 2};
        double t0 = under_at(2 * e) ? opt.gap : 0.0;
        double t1 = under_at(2 * e + 1) ? 1.0 - opt.gap : 1.0;
        Stroke s;
        s.edge = e;
        s.tag = d.edges[e].tag;
        for (int i = 0; i < opt.samples; ++i) {
            double t = t0 + (t1 - t0) * double(i) / double(opt.samples - 1);
            auto q0 = renderdetail::lerp(p0, ctrl, t);
            auto q1 = renderdetail::lerp(ctrl, p1, t);
            s.pts.push_back(canvas(renderdetail::lerp(q0, q1, t)));
        }
        g.strokes.push_back(s);
    }
    return g;
}

namespace renderdetail {

inline std::string num(double v) {
    char buf[32];
    if (v > -0.005 && v < 0) v = 0;  // never print -0.00
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace renderdetail

// The SVG document for a layout.
inline std::string render_svg(const RenderGeometry& g) {
    using renderdetail::num;
    const RenderOptions& o = g.opt;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.size << "\" height=\""
      << o.size << "\" viewBox=\"0 0 " << o.size << " " << o.size << "\">\n";
    s << "<style>path{fill:none;stroke-width:2.5;stroke-linecap:round}"
      << ".plus{stroke:#2563eb}.minus{stroke:#dc2626}.arc{stroke:#374151}"
      << ".frame{fill:none;stroke:#9ca3af;stroke-width:1.5}"
      << ".crit{fill:#111827}.end{fill:#6b7280}</style>\n";
    int inner = o.size - 2 * o.margin;
    s << "<rect class=\"frame\" x=\"" << o.margin << "\" y=\"" << o.margin << "\" width=\""
      << inner << "\" height=\"" << inner << "\"/>\n";
    if (g.dropped_loops > 0)
        s << "<!-- " << g.dropped_loops << " floating loop node(s) not drawn -->\n";
    for (const auto& st : g.strokes) {
        const char* cls = st.tag == HalfTag::Plus    ? "plus"
                          : st.tag == HalfTag::Minus ? "minus"
                                                     : "arc";
        s << "<path class=\"" << cls << "\" d=\"M " << num(st.pts[0].first) << " "
          << num(st.pts[0].second);
        for (std::size_t i = 1; i < st.pts.size(); ++i)
            s << " L " << num(st.pts[i].first) << " " << num(st.pts[i].second);
        s << "\"/>\n";
    }
    for (int v : g.crit_ids)
        s << "<circle class=\"crit\" cx=\"" << num(g.vertex_pos[v].first) << "\" cy=\""
          << num(g.vertex_pos[v].second) << "\" r=\"4\"/>\n";
    for (int v : g.endpoint_ids)
        s << "<circle class=\"end\" cx=\"" << num(g.vertex_pos[v].first) << "\" cy=\""
          << num(g.vertex_pos[v].second) << "\" r=\"3\"/>\n";
    s << "</svg>\n";
    return s.str();
}

inline std::string render_svg(const Diagram& d, const RenderOptions& opt = {}) {
    return render_svg(layout(d, opt));
}

}  // namespace tangle
