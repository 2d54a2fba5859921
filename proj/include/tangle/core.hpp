#pragma once

// Core data model: tangle diagrams as rotation-system planar maps on a square.
//
// A diagram lives in a square whose boundary carries labeled endpoints.
// Vertices are crossings (degree 4, with an over/under branch), endpoints
// (degree 1, pinned to a side of the square by (side, rank)), at most one
// critical point "o" (degree 2), and joints (degree 2, invisible).
// Edges are stored as pairs of half-edges; half-edge ids are 2*e and 2*e+1.
// Each vertex stores the counterclockwise cyclic order of its half-edges.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tangle {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class Side { Hp, Vm, Hm, Vp };

inline const char* side_name(Side s) {
    switch (s) {
        case Side::Hp: return "Hp";
        case Side::Vm: return "Vm";
        case Side::Hm: return "Hm";
        case Side::Vp: return "Vp";
    }
    return "?";
}

// Order of sides along the counterclockwise boundary walk starting at the
// top-left corner: down V-, right along H-, up V+, leftward along H+.
inline int side_ccw_order(Side s) {
    switch (s) {
        case Side::Vm: return 0;
        case Side::Hm: return 1;
        case Side::Vp: return 2;
        case Side::Hp: return 3;
    }
    return -1;
}

inline std::optional<Side> side_from_name(const std::string& n) {
    if (n == "Hp") return Side::Hp;
    if (n == "Vm") return Side::Vm;
    if (n == "Hm") return Side::Hm;
    if (n == "Vp") return Side::Vp;
    return std::nullopt;
}

enum class VertexKind { Crossing, Endpoint, CriticalO, Joint };
enum class HalfTag { None, Plus, Minus };
enum class CompKind { Strand, Loop };

struct Vertex {
    VertexKind kind = VertexKind::Joint;
    int over_parity = -1;  // crossings only: 0 -> slots {0,2} over, 1 -> {1,3}
    Side side = Side::Hp;  // endpoints only
    int rank = 0;          // endpoints only; any int, strictly ordered per side
    bool alive = true;
};

struct Edge {
    CompKind comp_kind = CompKind::Strand;
    int comp_id = -1;
    HalfTag tag = HalfTag::None;
    bool alive = true;
};

inline int twin(int h) { return h ^ 1; }
inline int edge_of(int h) { return h >> 1; }

struct DiagramType {
    int n1 = 0, n2 = 0, n3 = 0, n4 = 0;  // endpoints on H+, V-, H-, V+
    bool operator==(const DiagramType&) const = default;
};

struct Diagram {
    std::vector<Vertex> verts;
    std::vector<std::vector<int>> rot;  // per-vertex CCW half-edge ids
    std::vector<Edge> edges;

    int add_vertex(Vertex v) {
        verts.push_back(v);
        rot.emplace_back();
        return int(verts.size()) - 1;
    }
    int add_endpoint(Side s, int rank) {
        Vertex v;
        v.kind = VertexKind::Endpoint;
        v.side = s;
        v.rank = rank;
        return add_vertex(v);
    }
    int add_crossing(int over_parity) {
        Vertex v;
        v.kind = VertexKind::Crossing;
        v.over_parity = over_parity;
        return add_vertex(v);
    }
    int add_joint() { return add_vertex(Vertex{}); }
    int add_o() {
        Vertex v;
        v.kind = VertexKind::CriticalO;
        return add_vertex(v);
    }

    // Allocates an edge record; caller places halves 2e and 2e+1 into rotations.
    int add_edge_record(HalfTag tag) {
        Edge e;
        e.tag = tag;
        edges.push_back(e);
        return int(edges.size()) - 1;
    }

    // Builder convenience: connect u to w, appending halves at the end of both
    // rotations (suitable while constructing a diagram in CCW order).
    int connect(int u, int w, HalfTag tag = HalfTag::None) {
        int e = add_edge_record(tag);
        rot[u].push_back(2 * e);
        rot[w].push_back(2 * e + 1);
        return e;
    }

    int n_verts_alive() const {
        int n = 0;
        for (const auto& v : verts) n += v.alive ? 1 : 0;
        return n;
    }
    int n_edges_alive() const {
        int n = 0;
        for (const auto& e : edges) n += e.alive ? 1 : 0;
        return n;
    }

    // vertex id holding half-edge h, or -1 (table indexed by half id)
    std::vector<int> half_vertex_table() const {
        std::vector<int> t(edges.size() * 2, -1);
        for (int v = 0; v < int(verts.size()); ++v) {
            if (!verts[v].alive) continue;
            for (int h : rot[v]) t[h] = v;
        }
        return t;
    }

    int find_o() const {
        for (int v = 0; v < int(verts.size()); ++v)
            if (verts[v].alive && verts[v].kind == VertexKind::CriticalO) return v;
        return -1;
    }

    std::vector<int> endpoints_ccw() const {
        std::vector<int> eps;
        for (int v = 0; v < int(verts.size()); ++v)
            if (verts[v].alive && verts[v].kind == VertexKind::Endpoint) eps.push_back(v);
        std::sort(eps.begin(), eps.end(), [&](int a, int b) {
            int sa = side_ccw_order(verts[a].side), sb = side_ccw_order(verts[b].side);
            if (sa != sb) return sa < sb;
            return verts[a].rank < verts[b].rank;
        });
        return eps;
    }

    int rot_index_of(int v, int h) const {
        for (int i = 0; i < int(rot[v].size()); ++i)
            if (rot[v][i] == h) return i;
        throw Error("half-edge not in rotation of vertex " + std::to_string(v));
    }
};

inline DiagramType type_of(const Diagram& d) {
    DiagramType t;
    for (const auto& v : d.verts) {
        if (!v.alive || v.kind != VertexKind::Endpoint) continue;
        switch (v.side) {
            case Side::Hp: ++t.n1; break;
            case Side::Vm: ++t.n2; break;
            case Side::Hm: ++t.n3; break;
            case Side::Vp: ++t.n4; break;
        }
    }
    return t;
}

inline int crossing_count(const Diagram& d) {
    int n = 0;
    for (const auto& v : d.verts) n += (v.alive && v.kind == VertexKind::Crossing) ? 1 : 0;
    return n;
}

// ---------------------------------------------------------------------------
// Component decomposition (derived from the walk structure).

struct Component {
    CompKind kind = CompKind::Strand;
    HalfTag tag = HalfTag::None;        // uniform edge tag, or None if mixed/untagged
    std::vector<int> halves;            // outward halves in traversal order
    std::vector<int> edge_ids;          // edges in traversal order
    int ep_from = -1, ep_to = -1;       // strand endpoints (vertex ids)
};

namespace detail {

// Strand/loop walk step: entering vertex w through half h_in (h_in in rot[w]),
// return the half we leave through, or -1 if w terminates the walk.
inline int walk_through(const Diagram& d, int w, int h_in) {
    const Vertex& v = d.verts[w];
    if (v.kind == VertexKind::Endpoint) return -1;
    const auto& r = d.rot[w];
    if (v.kind == VertexKind::Crossing) {
        int i = d.rot_index_of(w, h_in);
        return r[(i + 2) % 4];
    }
    // degree-2: the other half
    if (r.size() != 2) throw Error("degree-2 vertex without 2 halves");
    return r[0] == h_in ? r[1] : r[0];
}

}  // namespace detail

inline std::vector<Component> components(const Diagram& d) {
    std::vector<Component> out;
    auto hv = d.half_vertex_table();
    std::vector<char> used(d.edges.size(), 0);

    auto walk = [&](int start_half, bool is_loop) {
        Component c;
        c.kind = is_loop ? CompKind::Loop : CompKind::Strand;
        int h = start_half;
        if (!is_loop) c.ep_from = hv[h];
        bool first = true;
        while (true) {
            if (is_loop && !first && h == start_half) break;
            first = false;
            int e = edge_of(h);
            used[e] = 1;
            c.halves.push_back(h);
            c.edge_ids.push_back(e);
            int w = hv[twin(h)];
            int nxt = detail::walk_through(d, w, twin(h));
            if (nxt < 0) {
                c.ep_to = w;
                break;
            }
            h = nxt;
        }
        // uniform tag
        HalfTag t = d.edges[c.edge_ids.front()].tag;
        for (int e : c.edge_ids)
            if (d.edges[e].tag != t) { t = HalfTag::None; break; }
        c.tag = t;
        out.push_back(std::move(c));
    };

    for (int v : d.endpoints_ccw()) {
        int h = d.rot[v].empty() ? -1 : d.rot[v][0];
        if (h < 0) throw Error("endpoint with no incident edge");
        if (!used[edge_of(h)]) walk(h, false);
    }
    for (int e = 0; e < int(d.edges.size()); ++e) {
        if (!d.edges[e].alive || used[e]) continue;
        walk(2 * e, true);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Augmented map: diagram plus the square boundary, used for face structure.

enum class HalfFilter { All, PlusOnly, MinusOnly };

namespace detail {

inline bool edge_kept(const Diagram& d, int e, HalfFilter f) {
    if (!d.edges[e].alive) return false;
    switch (f) {
        case HalfFilter::All: return true;
        case HalfFilter::PlusOnly: return d.edges[e].tag == HalfTag::Plus;
        case HalfFilter::MinusOnly: return d.edges[e].tag == HalfTag::Minus;
    }
    return false;
}

// Augmented planar map of the boundary-anchored part of a diagram.
// Nodes: surviving diagram vertices plus 4 corners. Half-edge ids:
// diagram halves keep their ids; boundary halves are appended after.
struct AugMap {
    HalfFilter filter = HalfFilter::All;
    int n_diagram_halves = 0;               // 2 * d->edges.size()
    std::vector<int> corner;                // 4 corner node ids (TL, BL, BR, TR)
    std::vector<std::vector<int>> arot;     // rotation per node (node = vertex id or corner)
    std::vector<int> node_of_half;          // for all halves (diagram + boundary)
    std::vector<char> half_present;         // diagram halves kept
    std::vector<int> bedge_from, bedge_to;  // boundary edges, by boundary node sequence
    std::vector<int> boundary_nodes;        // CCW: TL, V- endpoints, BL, H-, BR, V+, TR, H+
    std::vector<char> node_is_corner;
    std::vector<char> node_kept;            // diagram vertices kept after filtering
    // face tracing results
    std::vector<int> face_of_half;          // face id per present half (diagram + boundary)
    std::vector<std::vector<int>> face_walks;  // halves in walk order
    int outer_face = -1;
    // components not touching the boundary or o (skipped from the map)
    bool dropped_floating = false;
    std::vector<char> vertex_floating;  // per vertex id

    int next_ccw(int node, int h) const {
        const auto& r = arot[node];
        for (int i = 0; i < int(r.size()); ++i)
            if (r[i] == h) return r[(i + 1) % r.size()];
        throw Error("half not in augmented rotation");
    }
    int prev_ccw(int node, int h) const {
        const auto& r = arot[node];
        for (int i = 0; i < int(r.size()); ++i)
            if (r[i] == h) return r[(i + int(r.size()) - 1) % r.size()];
        throw Error("half not in augmented rotation");
    }
};

// Builds the augmented map. Throws only on internal inconsistencies;
// planarity is judged by the caller from the Euler characteristic.
inline AugMap build_augmap(const Diagram& d, HalfFilter filter) {
    AugMap m;
    m.filter = filter;
    m.n_diagram_halves = int(d.edges.size()) * 2;
    m.half_present.assign(m.n_diagram_halves, 0);
    auto hv = d.half_vertex_table();

    // Which diagram vertices survive the filter: endpoints of kept edges,
    // plus crossings/joints/o that keep at least one half; critical_o always
    // stays if it has a kept half or is isolated by the filter but present.
    int n_nodes = int(d.verts.size());
    m.arot.assign(n_nodes, {});
    m.node_kept.assign(n_nodes, 0);
    for (int v = 0; v < n_nodes; ++v) {
        if (!d.verts[v].alive) continue;
        std::vector<int> kept;
        for (int h : d.rot[v])
            if (edge_kept(d, edge_of(h), filter)) kept.push_back(h);
        if (kept.empty()) continue;
        m.arot[v] = kept;  // preserves CCW order
        m.node_kept[v] = 1;
        for (int h : kept) m.half_present[h] = 1;
    }

    // Anchored part: nodes reachable from any kept endpoint. Components with
    // no endpoint are floating; they are dropped from the augmented map (a
    // dual path can always route around them at zero cost).
    m.vertex_floating.assign(n_nodes, 0);
    {
        std::vector<char> seen(n_nodes, 0);
        std::vector<int> stack;
        for (int v = 0; v < n_nodes; ++v)
            if (m.node_kept[v] && d.verts[v].kind == VertexKind::Endpoint) {
                seen[v] = 1;
                stack.push_back(v);
            }
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int h : m.arot[v]) {
                int w = hv[twin(h)];
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (int v = 0; v < n_nodes; ++v) {
            if (m.node_kept[v] && !seen[v]) {
                m.vertex_floating[v] = 1;
                m.dropped_floating = true;
                for (int h : m.arot[v]) m.half_present[h] = 0;
                m.arot[v].clear();
                m.node_kept[v] = 0;
            }
        }
    }

    // Corners TL, BL, BR, TR.
    for (int i = 0; i < 4; ++i) {
        m.corner.push_back(n_nodes);
        m.arot.emplace_back();
        ++n_nodes;
    }
    m.node_is_corner.assign(n_nodes, 0);
    for (int c : m.corner) m.node_is_corner[c] = 1;

    // Boundary cycle in CCW order starting at the top-left corner.
    std::vector<int> eps;
    for (int v = 0; v < int(d.verts.size()); ++v)
        if (m.node_kept[v] && d.verts[v].kind == VertexKind::Endpoint) eps.push_back(v);
    std::sort(eps.begin(), eps.end(), [&](int a, int b) {
        int sa = side_ccw_order(d.verts[a].side), sb = side_ccw_order(d.verts[b].side);
        if (sa != sb) return sa < sb;
        return d.verts[a].rank < d.verts[b].rank;
    });
    auto side_eps = [&](Side s) {
        std::vector<int> r;
        for (int v : eps)
            if (d.verts[v].side == s) r.push_back(v);
        return r;
    };
    m.boundary_nodes.push_back(m.corner[0]);  // TL
    for (int v : side_eps(Side::Vm)) m.boundary_nodes.push_back(v);
    m.boundary_nodes.push_back(m.corner[1]);  // BL
    for (int v : side_eps(Side::Hm)) m.boundary_nodes.push_back(v);
    m.boundary_nodes.push_back(m.corner[2]);  // BR
    for (int v : side_eps(Side::Vp)) m.boundary_nodes.push_back(v);
    m.boundary_nodes.push_back(m.corner[3]);  // TR
    for (int v : side_eps(Side::Hp)) m.boundary_nodes.push_back(v);

    // Boundary edges between consecutive boundary nodes; halves appended
    // after the diagram halves. For edge b: half 2b points CCW-forward
    // (anchored at boundary_nodes[i]), half 2b+1 backward.
    int nb = int(m.boundary_nodes.size());
    m.node_of_half.assign(m.n_diagram_halves + 2 * nb, -1);
    for (int v = 0; v < int(d.verts.size()); ++v)
        for (int h : m.arot[v]) m.node_of_half[h] = v;

    for (int i = 0; i < nb; ++i) {
        int u = m.boundary_nodes[i];
        int w = m.boundary_nodes[(i + 1) % nb];
        int hf = m.n_diagram_halves + 2 * i;      // at u, toward w
        int hb = m.n_diagram_halves + 2 * i + 1;  // at w, toward u
        m.bedge_from.push_back(u);
        m.bedge_to.push_back(w);
        m.node_of_half[hf] = u;
        m.node_of_half[hb] = w;
        // Rotation at endpoints: [diagram stub, boundary-to-prev, boundary-to-next].
        // We append: forward half at u (toward next), backward half at w (toward prev).
        // Order is fixed below once both are known; collect first.
        m.arot[u].push_back(hf);
        m.arot[w].push_back(hb);
    }
    // Fix rotation order at boundary nodes: endpoints carry [stub, prev, next];
    // corners carry their two boundary halves (cyclic order irrelevant at deg 2).
    for (int i = 0; i < nb; ++i) {
        int v = m.boundary_nodes[i];
        if (m.node_is_corner[v]) continue;
        int h_next = m.n_diagram_halves + 2 * i;            // appended forward half at v
        int h_prev = m.n_diagram_halves + 2 * ((i + nb - 1) % nb) + 1;  // backward half at v
        int stub = -1;
        for (int h : m.arot[v])
            if (h < m.n_diagram_halves) { stub = h; break; }
        if (stub < 0) throw Error("boundary endpoint lost its diagram stub");
        m.arot[v] = {stub, h_prev, h_next};
    }

    // Trace faces: next_in_face(h) = prev_ccw(twin(h)) at twin's node.
    int total_halves = m.n_diagram_halves + 2 * nb;
    auto twin_aug = [&](int h) { return h ^ 1; };
    auto present = [&](int h) {
        if (h < m.n_diagram_halves) return m.half_present[h] != 0;
        return true;
    };
    m.face_of_half.assign(total_halves, -1);
    for (int h0 = 0; h0 < total_halves; ++h0) {
        if (!present(h0) || m.face_of_half[h0] >= 0) continue;
        int f = int(m.face_walks.size());
        m.face_walks.emplace_back();
        int h = h0;
        int guard = 0;
        do {
            m.face_of_half[h] = f;
            m.face_walks[f].push_back(h);
            int t = twin_aug(h);
            h = m.prev_ccw(m.node_of_half[t], t);
            if (++guard > total_halves + 4) throw Error("face tracing did not close");
        } while (h != h0);
    }

    // Outer face: the face of the backward half of the first boundary edge
    // (at the node after TL, pointing back up at TL: exterior on its left).
    m.outer_face = m.face_of_half[m.n_diagram_halves + 1];
    return m;
}

inline int augmap_euler(const AugMap& m) {
    int V = 0;
    for (size_t v = 0; v < m.arot.size(); ++v)
        if (!m.arot[v].empty()) ++V;
    int E = 0;
    for (int h = 0; h < m.n_diagram_halves; h += 2)
        if (m.half_present[h]) ++E;
    E += int(m.bedge_from.size());
    int F = int(m.face_walks.size());
    return V - E + F;
}

// Faces of an isolated (floating) cluster from the bare rotation system.
// Returns V - E + F for the cluster.
inline int cluster_euler(const Diagram& d, const std::vector<int>& cluster_verts) {
    std::vector<char> in(d.verts.size(), 0);
    for (int v : cluster_verts) in[v] = 1;
    auto hv = d.half_vertex_table();
    std::map<int, int> face_of;
    int F = 0;
    int E = 0;
    std::set<int> edge_seen;
    for (int v : cluster_verts)
        for (int h : d.rot[v]) {
            if (!edge_seen.count(edge_of(h))) {
                edge_seen.insert(edge_of(h));
                ++E;
            }
            if (face_of.count(h)) continue;
            ++F;
            int cur = h;
            int guard = 0;
            do {
                face_of[cur] = F;
                int t = twin(cur);
                int w = hv[t];
                const auto& r = d.rot[w];
                int i = d.rot_index_of(w, t);
                cur = r[(i + int(r.size()) - 1) % r.size()];
                if (++guard > int(d.edges.size()) * 2 + 4)
                    throw Error("cluster face tracing did not close");
            } while (cur != h);
        }
    return int(cluster_verts.size()) - E + F;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation.

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
    std::string to_string() const {
        std::string s;
        for (const auto& p : problems) {
            s += p;
            s += '\n';
        }
        return s;
    }
};

inline ValidationReport validate(const Diagram& d) {
    ValidationReport r;
    auto bad = [&](const std::string& s) { r.problems.push_back(s); };

    // Degrees, rotation sanity, one critical_o.
    int n_o = 0;
    std::vector<int> half_seen(d.edges.size() * 2, 0);
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (!d.verts[v].alive) continue;
        const Vertex& vx = d.verts[v];
        size_t want = 0;
        switch (vx.kind) {
            case VertexKind::Crossing: want = 4; break;
            case VertexKind::Endpoint: want = 1; break;
            case VertexKind::CriticalO: want = 2; ++n_o; break;
            case VertexKind::Joint: want = 2; break;
        }
        if (d.rot[v].size() != want)
            bad("vertex " + std::to_string(v) + ": degree " + std::to_string(d.rot[v].size()) +
                ", expected " + std::to_string(want));
        if (vx.kind == VertexKind::Crossing && vx.over_parity != 0 && vx.over_parity != 1)
            bad("vertex " + std::to_string(v) + ": crossing without over parity");
        for (int h : d.rot[v]) {
            if (h < 0 || h >= int(d.edges.size()) * 2 || !d.edges[edge_of(h)].alive) {
                bad("vertex " + std::to_string(v) + ": rotation references bad half " +
                    std::to_string(h));
                continue;
            }
            if (half_seen[h]++)
                bad("half-edge " + std::to_string(h) + " appears in two rotations");
        }
    }
    if (n_o > 1) bad("more than one critical point");
    for (int e = 0; e < int(d.edges.size()); ++e) {
        if (!d.edges[e].alive) continue;
        if (!half_seen[2 * e] || !half_seen[2 * e + 1])
            bad("edge " + std::to_string(e) + ": halves not placed in rotations");
    }
    if (!r.ok()) return r;  // structure too broken for the deeper checks

    // Endpoint (side, rank) uniqueness.
    std::set<std::pair<int, int>> pos;
    for (int v = 0; v < int(d.verts.size()); ++v) {
        const Vertex& vx = d.verts[v];
        if (!vx.alive || vx.kind != VertexKind::Endpoint) continue;
        if (!pos.insert({side_ccw_order(vx.side), vx.rank}).second)
            bad("duplicate endpoint position " + std::string(side_name(vx.side)) + " rank " +
                std::to_string(vx.rank));
    }

    // Component labels match the derived decomposition.
    std::vector<Component> comps;
    try {
        comps = components(d);
    } catch (const Error& e) {
        bad(std::string("component walk failed: ") + e.what());
        return r;
    }
    {
        std::vector<char> covered(d.edges.size(), 0);
        for (const auto& c : comps) {
            int declared = d.edges[c.edge_ids.front()].comp_id;
            CompKind dk = d.edges[c.edge_ids.front()].comp_kind;
            if (dk != c.kind)
                bad("component containing edge " + std::to_string(c.edge_ids.front()) +
                    " declared as wrong kind");
            for (int e : c.edge_ids) {
                if (covered[e]) {
                    bad("edge " + std::to_string(e) + " visited by two components");
                }
                covered[e] = 1;
                if (d.edges[e].comp_id != declared || d.edges[e].comp_kind != dk)
                    bad("edge " + std::to_string(e) + ": inconsistent component label");
            }
            if (c.kind == CompKind::Loop) {
                HalfTag t = d.edges[c.edge_ids.front()].tag;
                for (int e : c.edge_ids)
                    if (d.edges[e].tag != t) {
                        bad("loop with mixed half tags");
                        break;
                    }
            }
        }
        for (int e = 0; e < int(d.edges.size()); ++e)
            if (d.edges[e].alive && !covered[e])
                bad("edge " + std::to_string(e) + " not reached by any component walk");
    }
    if (!r.ok()) return r;

    // Planarity of the boundary-anchored part: Euler characteristic of the
    // augmented map must be 2. Floating clusters are checked separately.
    try {
        auto m = detail::build_augmap(d, HalfFilter::All);
        int chi = detail::augmap_euler(m);
        if (chi != 2)
            bad("augmented map is not planar as declared (V-E+F = " + std::to_string(chi) + ")");
        if (m.dropped_floating) {
            // Euler check per floating cluster.
            auto hv = d.half_vertex_table();
            std::vector<char> seen(d.verts.size(), 0);
            for (int v = 0; v < int(d.verts.size()); ++v) {
                if (!m.vertex_floating[v] || seen[v]) continue;
                std::vector<int> cl, stack{v};
                seen[v] = 1;
                while (!stack.empty()) {
                    int x = stack.back();
                    stack.pop_back();
                    cl.push_back(x);
                    for (int h : d.rot[x]) {
                        int w = hv[twin(h)];
                        if (!seen[w]) {
                            seen[w] = 1;
                            stack.push_back(w);
                        }
                    }
                }
                int chi_c = detail::cluster_euler(d, cl);
                if (chi_c != 2)
                    bad("floating cluster at vertex " + std::to_string(v) +
                        " is not planar (V-E+F = " + std::to_string(chi_c) + ")");
            }
        }
    } catch (const Error& e) {
        bad(std::string("augmented map build failed: ") + e.what());
    }
    return r;
}

inline void require_valid(const Diagram& d, const std::string& who) {
    auto r = validate(d);
    if (!r.ok()) throw Error(who + ": invalid diagram:\n" + r.to_string());
}

// ---------------------------------------------------------------------------
// Subdivided tangles: one strand through the critical point, halves tagged.

struct SubdividedInfo {
    int o = -1;                  // critical_o vertex
    int strand_index = -1;       // index into components()
    bool centered = false;       // o present on the strand
    std::vector<int> minus_edges, plus_edges;
};

inline SubdividedInfo subdivided_info(const Diagram& d) {
    SubdividedInfo info;
    info.o = d.find_o();
    if (info.o < 0) return info;
    auto comps = components(d);
    auto hv = d.half_vertex_table();
    for (int i = 0; i < int(comps.size()); ++i) {
        if (comps[i].kind != CompKind::Strand) continue;
        // does the strand pass through o?
        bool before = true;
        std::vector<int> minus, plus;
        bool through = false;
        for (int h : comps[i].halves) {
            if (hv[h] == info.o) {
                before = false;
                through = true;
            }
            (before ? minus : plus).push_back(edge_of(h));
        }
        if (through) {
            info.strand_index = i;
            info.centered = true;
            info.minus_edges = std::move(minus);
            info.plus_edges = std::move(plus);
            break;
        }
    }
    return info;
}

inline ValidationReport validate_subdivided(const Diagram& d) {
    ValidationReport r = validate(d);
    if (!r.ok()) return r;
    auto bad = [&](const std::string& s) { r.problems.push_back(s); };
    auto info = subdivided_info(d);
    if (info.o < 0) {
        bad("no critical point");
        return r;
    }
    auto comps = components(d);
    int strands = 0;
    for (const auto& c : comps) strands += (c.kind == CompKind::Strand) ? 1 : 0;
    if (strands != 1) bad("expected exactly one strand, found " + std::to_string(strands));
    if (info.strand_index < 0) {
        bad("critical point does not lie on the strand");
        return r;
    }
    const auto& strand = comps[info.strand_index];
    const Vertex& from = d.verts[strand.ep_from];
    const Vertex& to = d.verts[strand.ep_to];
    if (!(from.kind == VertexKind::Endpoint && from.side == Side::Hm))
        bad("strand must start at an H- endpoint");
    if (!(to.kind == VertexKind::Endpoint && to.side == Side::Hp))
        bad("strand must end at an H+ endpoint");
    for (int e : info.minus_edges)
        if (d.edges[e].tag != HalfTag::Minus)
            bad("edge " + std::to_string(e) + " before o must be tagged minus");
    for (int e : info.plus_edges)
        if (d.edges[e].tag != HalfTag::Plus)
            bad("edge " + std::to_string(e) + " after o must be tagged plus");
    for (const auto& c : comps)
        if (c.kind == CompKind::Loop && c.tag == HalfTag::None)
            bad("loop without a plus/minus tag");
    return r;
}

// Crossing classification for subdivided diagrams.
struct CrossingCounts {
    int chi = 0, chi_plus = 0, chi_minus = 0, hybrid = 0;
};

inline HalfTag branch_tag(const Diagram& d, int c, int slot) {
    HalfTag a = d.edges[edge_of(d.rot[c][slot])].tag;
    HalfTag b = d.edges[edge_of(d.rot[c][(slot + 2) % 4])].tag;
    if (a != b) return HalfTag::None;
    return a;
}

inline CrossingCounts counts(const Diagram& d) {
    CrossingCounts cc;
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (!d.verts[v].alive || d.verts[v].kind != VertexKind::Crossing) continue;
        ++cc.chi;
        HalfTag a = branch_tag(d, v, 0);
        HalfTag b = branch_tag(d, v, 1);
        if (a == HalfTag::None || b == HalfTag::None)
            throw Error("counts: crossing " + std::to_string(v) + " has untagged branches");
        if (a == b) {
            if (a == HalfTag::Plus)
                ++cc.chi_plus;
            else
                ++cc.chi_minus;
        } else {
            ++cc.hybrid;
        }
    }
    return cc;
}

// True when every hybrid crossing has the plus branch over.
inline bool permitted(const Diagram& d) {
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (!d.verts[v].alive || d.verts[v].kind != VertexKind::Crossing) continue;
        HalfTag a = branch_tag(d, v, 0);
        HalfTag b = branch_tag(d, v, 1);
        if (a == b) continue;
        HalfTag over = (d.verts[v].over_parity == 0) ? a : b;
        if (over != HalfTag::Plus) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// mirror / compose / factors

// Label mirror: swaps over/under at every crossing; everything else is
// unchanged.
inline Diagram mirror(const Diagram& d) {
    Diagram m = d;
    for (auto& v : m.verts)
        if (v.alive && v.kind == VertexKind::Crossing) v.over_parity ^= 1;
    return m;
}

// Drops dead vertices/edges, renumbering densely while preserving order.
inline Diagram compact(const Diagram& d) {
    std::vector<int> vmap(d.verts.size(), -1), emap(d.edges.size(), -1);
    Diagram out;
    for (int v = 0; v < int(d.verts.size()); ++v)
        if (d.verts[v].alive) {
            vmap[v] = int(out.verts.size());
            out.verts.push_back(d.verts[v]);
            out.rot.emplace_back();
        }
    for (int e = 0; e < int(d.edges.size()); ++e)
        if (d.edges[e].alive) {
            emap[e] = int(out.edges.size());
            out.edges.push_back(d.edges[e]);
        }
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (vmap[v] < 0) continue;
        for (int h : d.rot[v])
            out.rot[vmap[v]].push_back(2 * emap[edge_of(h)] + (h & 1));
    }
    return out;
}

// Relabels component ids from the derived decomposition: strands first
// (ordered by their 'from' endpoint in CCW boundary order), then loops.
inline void relabel_components(Diagram& d) {
    auto comps = components(d);
    std::vector<int> order(comps.size());
    for (int i = 0; i < int(order.size()); ++i) order[i] = i;
    auto ep_key = [&](const Component& c) {
        const Vertex& v = d.verts[c.ep_from];
        return std::pair<int, int>(side_ccw_order(v.side), v.rank);
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (comps[a].kind != comps[b].kind) return comps[a].kind == CompKind::Strand;
        if (comps[a].kind == CompKind::Strand) return ep_key(comps[a]) < ep_key(comps[b]);
        int ma = *std::min_element(comps[a].edge_ids.begin(), comps[a].edge_ids.end());
        int mb = *std::min_element(comps[b].edge_ids.begin(), comps[b].edge_ids.end());
        return ma < mb;
    });
    int next_strand = 0, next_loop = 0;
    for (int idx : order) {
        const auto& c = comps[idx];
        int id = (c.kind == CompKind::Strand) ? next_strand++ : next_loop++;
        for (int e : c.edge_ids) {
            d.edges[e].comp_kind = c.kind;
            d.edges[e].comp_id = id;
        }
    }
}

// Joins k0's H+ endpoint and k1's H- endpoint at a fresh critical point;
// k0 becomes the minus half, k1 the plus half.
inline Diagram compose(const Diagram& k0, const Diagram& k1) {
    if (!(type_of(k0) == DiagramType{1, 0, 1, 0}))
        throw Error("compose: first factor is not a knot diagram");
    if (!(type_of(k1) == DiagramType{1, 0, 1, 0}))
        throw Error("compose: second factor is not a knot diagram");
    if (k0.find_o() >= 0 || k1.find_o() >= 0)
        throw Error("compose: factors must not contain a critical point");
    Diagram a = compact(k0), b = compact(k1);
    for (auto& e : a.edges) e.tag = HalfTag::Minus;
    for (auto& e : b.edges) e.tag = HalfTag::Plus;

    Diagram out = a;
    int voff = int(out.verts.size());
    int eoff = int(out.edges.size());
    for (const auto& v : b.verts) {
        out.verts.push_back(v);
        out.rot.emplace_back();
    }
    for (const auto& e : b.edges) out.edges.push_back(e);
    for (int v = 0; v < int(b.verts.size()); ++v)
        for (int h : b.rot[v]) out.rot[voff + v].push_back(2 * (eoff + edge_of(h)) + (h & 1));

    // locate k0's H+ endpoint and k1's H- endpoint (now offset)
    int top0 = -1, bot1 = -1;
    for (int v = 0; v < int(a.verts.size()); ++v)
        if (a.verts[v].kind == VertexKind::Endpoint && a.verts[v].side == Side::Hp) top0 = v;
    for (int v = 0; v < int(b.verts.size()); ++v)
        if (b.verts[v].kind == VertexKind::Endpoint && b.verts[v].side == Side::Hm)
            bot1 = voff + v;
    int h0 = out.rot[top0][0];
    int h1 = out.rot[bot1][0];
    out.verts[top0].kind = VertexKind::CriticalO;
    out.rot[top0] = {h0, h1};
    out.verts[bot1].alive = false;
    out.rot[bot1].clear();
    Diagram res = compact(out);
    relabel_components(res);
    require_valid(res, "compose");
    return res;
}

// Splits a composite subdivided diagram (no hybrid crossings) at o.
inline std::pair<Diagram, Diagram> factors(const Diagram& k) {
    auto rep = validate_subdivided(k);
    if (!rep.ok()) throw Error("factors: not a subdivided diagram:\n" + rep.to_string());
    if (counts(k).hybrid != 0) throw Error("factors: diagram is not composite (hybrid crossing)");
    int o = k.find_o();

    auto part = [&](HalfTag keep) {
        Diagram p = k;
        int po = p.find_o();
        // Drop the other half's edges/vertices.
        for (int e = 0; e < int(p.edges.size()); ++e)
            if (p.edges[e].alive && p.edges[e].tag != keep) p.edges[e].alive = false;
        for (int v = 0; v < int(p.verts.size()); ++v) {
            if (!p.verts[v].alive) continue;
            std::vector<int> keep_h;
            for (int h : p.rot[v])
                if (p.edges[edge_of(h)].alive) keep_h.push_back(h);
            if (v == po) {
                if (keep_h.size() != 1) throw Error("factors: critical point degree mismatch");
                p.verts[v].kind = VertexKind::Endpoint;
                p.verts[v].side = (keep == HalfTag::Minus) ? Side::Hp : Side::Hm;
                p.verts[v].rank = 0;
                p.rot[v] = keep_h;
            } else if (keep_h.empty()) {
                p.verts[v].alive = false;
                p.rot[v].clear();
            } else if (keep_h.size() != p.rot[v].size()) {
                throw Error("factors: crossing with mixed halves in composite diagram");
            }
        }
        for (auto& e : p.edges) e.tag = HalfTag::None;
        Diagram q = compact(p);
        relabel_components(q);
        require_valid(q, "factors");
        return q;
    };
    (void)o;
    return {part(HalfTag::Minus), part(HalfTag::Plus)};
}

// Tags the halves of a knot diagram that already contains a critical point
// (used after surgeries that rebuild a strand through o).
inline void retag_from_o(Diagram& d) {
    auto info = subdivided_info(d);
    if (info.o < 0 || !info.centered) throw Error("retag_from_o: no centered strand");
    for (int e : info.minus_edges) d.edges[e].tag = HalfTag::Minus;
    for (int e : info.plus_edges) d.edges[e].tag = HalfTag::Plus;
}

// ---------------------------------------------------------------------------
// Canonical renumbering: breadth-first from the H- endpoint with the lowest
// rank (fallback: first endpoint in CCW boundary order); floating clusters
// follow, each minimized over its possible starts.

namespace detail {

struct CanonOrder {
    std::vector<int> vmap;  // old vertex -> new
    std::vector<int> emap;  // old edge -> new
    std::vector<int> hmap;  // old half -> new
    std::vector<int> vorder, eorder;
    std::vector<std::vector<int>> new_rot_of_old_vertex;
};

// Deterministic traversal from a seed half (or bare seed vertex).
inline void canon_visit(const Diagram& d, const std::vector<int>& hv, int seed_vertex,
                        int arrival_half, CanonOrder& co) {
    if (co.vmap[seed_vertex] >= 0) return;
    std::vector<std::pair<int, int>> queue;  // (vertex, arrival half or -1)
    size_t qi = 0;
    co.vmap[seed_vertex] = int(co.vorder.size());
    co.vorder.push_back(seed_vertex);
    queue.push_back({seed_vertex, arrival_half});
    while (qi < queue.size()) {
        auto [v, arr] = queue[qi++];
        const auto& r = d.rot[v];
        int start = 0;
        if (arr >= 0) start = d.rot_index_of(v, arr);
        std::vector<int> order;
        for (int i = 0; i < int(r.size()); ++i) order.push_back(r[(start + i) % r.size()]);
        co.new_rot_of_old_vertex[v] = order;
        for (int h : order) {
            int e = edge_of(h);
            if (co.emap[e] < 0) {
                co.emap[e] = int(co.eorder.size());
                co.eorder.push_back(e);
                co.hmap[h] = 2 * co.emap[e];
                co.hmap[twin(h)] = 2 * co.emap[e] + 1;
            }
            int w = hv[twin(h)];
            if (co.vmap[w] < 0) {
                co.vmap[w] = int(co.vorder.size());
                co.vorder.push_back(w);
                queue.push_back({w, twin(h)});
            }
        }
    }
}

}  // namespace detail

inline Diagram canonicalize(const Diagram& d0) {
    Diagram d = compact(d0);
    auto hv = d.half_vertex_table();
    detail::CanonOrder co;
    co.vmap.assign(d.verts.size(), -1);
    co.emap.assign(d.edges.size(), -1);
    co.hmap.assign(d.edges.size() * 2, -1);
    co.new_rot_of_old_vertex.assign(d.verts.size(), {});

    // Anchored seeds: H- endpoints by rank first, then remaining endpoints
    // in CCW boundary order.
    std::vector<int> eps = d.endpoints_ccw();
    std::stable_sort(eps.begin(), eps.end(), [&](int a, int b) {
        bool ha = d.verts[a].side == Side::Hm, hb = d.verts[b].side == Side::Hm;
        if (ha != hb) return ha;
        return false;
    });
    for (int v : eps) detail::canon_visit(d, hv, v, -1, co);

    // Floating clusters: canonical start minimizes the traversal signature.
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (co.vmap[v] >= 0) continue;
        // collect the cluster
        std::vector<int> cl, stack{v};
        std::vector<char> seen(d.verts.size(), 0);
        seen[v] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            cl.push_back(x);
            for (int h : d.rot[x]) {
                int w = hv[twin(h)];
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(cl.begin(), cl.end());
        // candidate starts: every (vertex, arrival-half) in the cluster
        std::string best;
        std::pair<int, int> best_seed{-1, -1};
        for (int x : cl)
            for (int h : d.rot[x]) {
                detail::CanonOrder trial;
                trial.vmap.assign(d.verts.size(), -1);
                trial.emap.assign(d.edges.size(), -1);
                trial.hmap.assign(d.edges.size() * 2, -1);
                trial.new_rot_of_old_vertex.assign(d.verts.size(), {});
                detail::canon_visit(d, hv, x, h, trial);
                // signature: walk new vertex order, encode kind + new half ids
                std::string sig;
                for (int ov : trial.vorder) {
                    sig += char('a' + int(d.verts[ov].kind));
                    if (d.verts[ov].kind == VertexKind::Crossing)
                        sig += char('0' + d.verts[ov].over_parity);
                    for (int oh : trial.new_rot_of_old_vertex[ov]) {
                        sig += std::to_string(trial.hmap[oh]);
                        sig += ',';
                    }
                    sig += ';';
                }
                if (best_seed.first < 0 || sig < best) {
                    best = sig;
                    best_seed = {x, h};
                }
            }
        detail::canon_visit(d, hv, best_seed.first, best_seed.second, co);
    }

    // Rebuild.
    Diagram out;
    out.verts.resize(co.vorder.size());
    out.rot.resize(co.vorder.size());
    out.edges.resize(co.eorder.size());
    for (int nv = 0; nv < int(co.vorder.size()); ++nv) {
        int ov = co.vorder[nv];
        out.verts[nv] = d.verts[ov];
        for (int oh : co.new_rot_of_old_vertex[ov]) out.rot[nv].push_back(co.hmap[oh]);
        if (out.verts[nv].kind == VertexKind::Crossing) {
            // over branch followed the halves; recompute parity in the new order
            int old_slot0 = d.rot[ov][0];
            int pos = 0;
            for (int i = 0; i < 4; ++i)
                if (out.rot[nv][i] == co.hmap[old_slot0]) pos = i;
            // old slot 0 now sits at `pos`; old over parity p means slots {p, p+2}
            out.verts[nv].over_parity = (d.verts[ov].over_parity + pos) % 2;
        }
    }
    for (int ne = 0; ne < int(co.eorder.size()); ++ne) out.edges[ne] = d.edges[co.eorder[ne]];
    relabel_components(out);
    return out;
}

}  // namespace tangle
