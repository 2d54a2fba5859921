#pragma once

// Cutting a centered composite open.  A subdivided composite diagram carries a
// minus half below its critical point and a plus half above it; cutting the
// disk along a ray from the critical point to the boundary unfolds the two
// halves into a nested pair sharing a matched set of side points.  This header
// builds that ray, performs the cut, derives the region matrix of the plus
// arcs over the minus tangle, closes either half back up into a plain knot
// diagram, and batches the per-step bound reports used by the verification
// harness.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "arrange.hpp"
#include "dual.hpp"
#include "matrix.hpp"
#include "moves.hpp"
#include "smoothing.hpp"
#include "tdf.hpp"

namespace tangle {

// A dual walk from the critical point to the boundary.  `edges` lists the
// diagram edges it crosses, tip to boundary; `from_faces[i]` is the face the
// walk stands in when it crosses `edges[i]`.
struct SplittingRay {
    int k_minus = 0;              // minus edges crossed
    int l_plus = 0;               // plus edges crossed
    std::vector<int> edges;       // crossed diagram edges, in order
    std::vector<int> from_faces;  // face before each crossing
    int start_face = -1;          // face at the critical point the walk leaves from
    std::vector<int> nodes;       // dual node sequence, start face to terminal
};

namespace detail {

// The face filling the sector counterclockwise of the minus germ at the
// critical point.  Cutting the disk open, the walk along the new boundary
// sweeps the tip clockwise from the ray, so only a ray leaving through this
// sector puts the minus germ next to the top left corner and the plus germ at
// the head of the left wall.  Every splitting ray is routed through it; the
// restriction costs nothing, because the sector reaches the rest of the
// critical point's minus-side face across plus edges alone.
inline int tip_sector(const Diagram& t, const Arrangement& a, int o) {
    if (t.rot[o].size() != 2) throw Error("splitting ray: critical point degree");
    int g0 = t.rot[o][0], g1 = t.rot[o][1];
    int g_minus = (t.edges[edge_of(g0)].tag == HalfTag::Minus) ? g0 : g1;
    int g_plus = (g_minus == g0) ? g1 : g0;
    if (t.edges[edge_of(g_minus)].tag != HalfTag::Minus ||
        t.edges[edge_of(g_plus)].tag != HalfTag::Plus)
        throw Error("splitting ray: germs are not a minus/plus pair");
    return a.m.face_of_half[twin(g_plus)];
}

// Terminals on the boundary arc counterclockwise from the bottom endpoint to
// the top endpoint.  The ray must reach the boundary on this arc: cutting the
// disk open there leaves the old top as the first boundary feature after the
// left wall, which is where the relabeling expects it.  Landing on the arc
// costs no extra minus crossings, because a walk hugging the boundary past
// the top endpoint only crosses that endpoint's single plus germ.
inline std::vector<int> exit_terminals(const Diagram& t, const Arrangement& a) {
    const auto& bn = a.m.boundary_nodes;
    int nb = int(bn.size());
    int ib = -1, it = -1, neps = 0;
    for (int i = 0; i < nb; ++i) {
        int v = bn[i];
        if (a.m.node_is_corner[v]) continue;
        ++neps;
        if (t.verts[v].side == Side::Hm) ib = i;
        if (t.verts[v].side == Side::Hp) it = i;
    }
    if (neps != 2 || ib < 0 || it < 0)
        throw Error("splitting ray: tangle is not a single bottom-to-top strand");
    std::vector<int> ts;
    for (int i = ib; i != it; i = (i + 1) % nb) ts.push_back(i);
    return ts;
}

}  // namespace detail

// The cheapest splitting ray: fewest minus edges crossed, and among those,
// fewest plus edges.  The walk leaves the tip through the sector after the
// minus germ and lands between the bottom and top endpoints; neither
// restriction costs a minus crossing.  Ties fall to the smallest dual node
// id, so the result is deterministic.
inline SplittingRay minus_splitting_ray(const Diagram& t) {
    int o = t.find_o();
    if (o < 0) throw Error("splitting ray: no critical point");
    Arrangement a = arrange(t);
    if (a.m.arot[o].empty()) throw Error("splitting ray: critical point not in the map");
    DualGraph g = build_dual(a);
    int n = int(g.adj.size());
    std::vector<char> is_sink(n, 0);
    for (int ti : detail::exit_terminals(t, a)) is_sink[g.terminal_node(ti)] = 1;
    const std::pair<int, int> kInf{std::numeric_limits<int>::max(),
                                   std::numeric_limits<int>::max()};
    std::vector<std::pair<int, int>> dist(n, kInf);
    std::vector<int> par_node(n, -1), par_via(n, -2);
    using Item = std::tuple<int, int, int>;  // (minus cost, plus cost, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    {
        int s = detail::tip_sector(t, a, o);
        dist[s] = {0, 0};
        pq.push({0, 0, s});
    }
    while (!pq.empty()) {
        auto [km, lp, u] = pq.top();
        pq.pop();
        if (std::pair<int, int>{km, lp} != dist[u]) continue;
        if (u >= g.n_faces) continue;  // terminals are sinks
        for (const auto& arc : g.adj[u]) {
            std::pair<int, int> nd{km, lp};
            if (arc.via_edge >= 0) {
                HalfTag tag = t.edges[arc.via_edge].tag;
                if (tag == HalfTag::Minus)
                    ++nd.first;
                else if (tag == HalfTag::Plus)
                    ++nd.second;
                else
                    throw Error("splitting ray: untagged edge " + std::to_string(arc.via_edge));
            }
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                par_node[arc.to] = u;
                par_via[arc.to] = arc.via_edge;
                pq.push({nd.first, nd.second, arc.to});
            }
        }
    }
    int best = -1;
    for (int tn = g.n_faces; tn < n; ++tn)
        if (is_sink[tn] && dist[tn] != kInf && (best < 0 || dist[tn] < dist[best])) best = tn;
    if (best < 0) throw Error("splitting ray: boundary unreachable");
    SplittingRay r;
    r.k_minus = dist[best].first;
    r.l_plus = dist[best].second;
    std::vector<std::pair<int, int>> chain;  // (node, arc into it)
    for (int cur = best; cur >= 0; cur = par_node[cur]) chain.push_back({cur, par_via[cur]});
    std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        r.nodes.push_back(chain[i].first);
        if (i > 0 && chain[i].second >= 0) {
            r.edges.push_back(chain[i].second);
            r.from_faces.push_back(chain[i - 1].first);
        }
    }
    r.start_face = r.nodes.front();
    return r;
}

// Rebuilds a splitting-ray walk from the crossed edges alone.  The walk
// starts in the sector after the minus germ and steps across each listed
// edge in order; the edges must chain face to face from there.
inline SplittingRay splitting_ray_from_edges(const Diagram& t, const std::vector<int>& edges) {
    int o = t.find_o();
    if (o < 0) throw Error("splitting ray: no critical point");
    Arrangement a = arrange(t);
    if (a.m.arot[o].empty()) throw Error("splitting ray: critical point not in the map");
    SplittingRay r;
    r.start_face = detail::tip_sector(t, a, o);
    r.nodes.push_back(r.start_face);
    int fcur = r.start_face;
    for (int e : edges) {
        if (e < 0 || e >= int(t.edges.size()) || !t.edges[e].alive)
            throw Error("splitting ray: no edge " + std::to_string(e));
        int h = -1;
        if (a.m.face_of_half[2 * e] == fcur)
            h = 2 * e;
        else if (a.m.face_of_half[twin(2 * e)] == fcur)
            h = twin(2 * e);
        else
            throw Error("splitting ray: edge " + std::to_string(e) +
                        " does not bound the walk's face");
        HalfTag tag = t.edges[e].tag;
        if (tag == HalfTag::Minus)
            ++r.k_minus;
        else if (tag == HalfTag::Plus)
            ++r.l_plus;
        else
            throw Error("splitting ray: untagged edge " + std::to_string(e));
        r.edges.push_back(e);
        r.from_faces.push_back(fcur);
        fcur = a.m.face_of_half[twin(h)];
        r.nodes.push_back(fcur);
    }
    return r;
}

namespace detail {

// Sub-diagram spanned by the edges of one tag.  Crossings keeping exactly one
// passage become joints, vertices keeping nothing die, and a critical point
// keeps its surviving germ.  A crossing may only lose whole passages and a
// joint may not sit between the halves.
inline Diagram half_restrict(const Diagram& d, HalfTag keep) {
    Diagram out = d;
    for (auto& e : out.edges)
        if (e.alive && e.tag != keep) e.alive = false;
    for (int v = 0; v < int(out.verts.size()); ++v) {
        Vertex& vx = out.verts[v];
        if (!vx.alive) continue;
        std::vector<int> kept, kept_pos;
        for (int i = 0; i < int(out.rot[v].size()); ++i)
            if (out.edges[edge_of(out.rot[v][i])].alive) {
                kept.push_back(out.rot[v][i]);
                kept_pos.push_back(i);
            }
        if (kept.empty()) {
            vx.alive = false;
            out.rot[v].clear();
            continue;
        }
        if (vx.kind == VertexKind::Crossing && int(kept.size()) == 2) {
            if (kept_pos[1] - kept_pos[0] != 2)
                throw Error("half restrict: crossing " + std::to_string(v) +
                            " loses half a passage");
            vx.kind = VertexKind::Joint;
            vx.over_parity = 0;
        } else if (vx.kind == VertexKind::Crossing && int(kept.size()) != 4) {
            throw Error("half restrict: crossing " + std::to_string(v) + " loses half a passage");
        } else if (vx.kind == VertexKind::Joint && int(kept.size()) != 2) {
            throw Error("half restrict: joint " + std::to_string(v) + " sits between the halves");
        }
        out.rot[v] = kept;
    }
    return out;
}

}  // namespace detail

// One side point produced by the cut: the edge it split (id in the input
// diagram), the edge's tag, and the ranks of the two copies.
struct CutPoint {
    int edge = -1;
    HalfTag tag = HalfTag::None;
    int vm_rank = 0;
    int vp_rank = 0;
};

// Result of cutting a composite open along a splitting ray.  `combined` holds
// both halves in one diagram with tags kept; `s_minus` and `s_plus` are its
// two tag-restricted sub-diagrams.  With K = (k-1) + l cut points, the left
// side carries ranks 0 (the clipped upper germ) through K+1 (the strand's old
// top endpoint) and the right side ranks 0..K-1; cut i pairs left rank i with
// right rank K-i.
struct CutPair {
    Diagram combined;
    Diagram s_minus;  // type (1, k-1, 1, k-1)
    Diagram s_plus;   // type (0, l+2, 0, l)
    std::vector<CutPoint> matching;  // cut points, tip to boundary
    SplittingRay ray;
    int k = 0;  // 1 + minus edges cut
    int l = 0;  // plus edges cut
};

inline CutPair fan_cut(const Diagram& t, const SplittingRay& ray) {
    require_valid(t, "fan cut");
    {
        ValidationReport rep = validate_subdivided(t);
        if (!rep.ok()) throw Error("fan cut: " + rep.problems.front());
    }
    int o = t.find_o();
    Arrangement a = arrange(t);

    if (ray.edges.size() != ray.from_faces.size())
        throw Error("fan cut: ray edge and face lists disagree");
    int km = 0, lp = 0;
    {
        std::set<int> seen;
        for (int e : ray.edges) {
            if (e < 0 || e >= int(t.edges.size()) || !t.edges[e].alive)
                throw Error("fan cut: ray crosses a missing edge");
            if (!seen.insert(e).second) throw Error("fan cut: ray is not simple");
            HalfTag tag = t.edges[e].tag;
            if (tag == HalfTag::Minus)
                ++km;
            else if (tag == HalfTag::Plus)
                ++lp;
            else
                throw Error("fan cut: ray crosses an untagged edge");
        }
    }
    if (km != min_ray(t, HalfTag::Minus)) throw Error("fan cut: ray is not minimal");
    for (std::size_t i = 0; i < ray.edges.size(); ++i) {
        int e = ray.edges[i];
        if (ray.from_faces[i] != a.m.face_of_half[2 * e] &&
            ray.from_faces[i] != a.m.face_of_half[twin(2 * e)])
            throw Error("fan cut: ray face is not on its edge");
    }
    int f0 = ray.edges.empty() ? ray.start_face : ray.from_faces[0];
    if (f0 != detail::tip_sector(t, a, o))
        throw Error("fan cut: ray must leave through the sector after the minus germ");
    {
        // The walk must chain face to face, and the far side of the last cut
        // must meet the boundary between the bottom and top endpoints.
        int fcur = f0;
        for (std::size_t i = 0; i < ray.edges.size(); ++i) {
            int e = ray.edges[i];
            if (ray.from_faces[i] != fcur) throw Error("fan cut: ray faces do not chain");
            int h_f = (a.m.face_of_half[2 * e] == fcur) ? 2 * e : twin(2 * e);
            fcur = a.m.face_of_half[twin(h_f)];
        }
        bool lands = false;
        for (int ti : detail::exit_terminals(t, a))
            lands |= (a.terminals[ti].inner_face == fcur);
        if (!lands)
            throw Error("fan cut: ray must end between the bottom and top endpoints");
    }

    Diagram w = t;
    std::vector<int> hv = t.half_vertex_table();
    int K = int(ray.edges.size());
    std::vector<CutPoint> matching;
    for (int i = 1; i <= K; ++i) {
        int e = ray.edges[i - 1];
        int f = ray.from_faces[i - 1];
        // The half of e whose left face is f; crossing left to right, the
        // walker's right hand points back at that half's seat.  The piece on
        // the right keeps edge e, its far half moving from v to the right
        // wall; the piece on the left gets a fresh edge seated at v in the
        // old half's slot.
        int h_f = (a.m.face_of_half[2 * e] == f) ? 2 * e : twin(2 * e);
        int v = hv[twin(h_f)];
        int ep_right = w.add_endpoint(Side::Vp, K - i);
        int ep_left = w.add_endpoint(Side::Vm, i);
        int slot = w.rot_index_of(v, twin(h_f));
        int e2 = w.add_edge_record(t.edges[e].tag);
        w.rot[v][slot] = 2 * e2;
        w.rot[ep_left] = {2 * e2 + 1};
        w.rot[ep_right] = {twin(h_f)};
        matching.push_back({e, t.edges[e].tag, i, K - i});
    }

    // Unfold the tip: the strand's old top endpoint joins the left wall below
    // the cuts, the minus germ becomes the new top endpoint, and the plus
    // germ the head of the left wall.
    int old_top = -1;
    for (int vv = 0; vv < int(w.verts.size()); ++vv)
        if (w.verts[vv].alive && w.verts[vv].kind == VertexKind::Endpoint &&
            w.verts[vv].side == Side::Hp)
            old_top = vv;
    if (old_top < 0) throw Error("fan cut: no top endpoint");
    w.verts[old_top].side = Side::Vm;
    w.verts[old_top].rank = K + 1;

    if (w.rot[o].size() != 2) throw Error("fan cut: critical point degree");
    int a0 = w.rot[o][0], a1 = w.rot[o][1];
    int gm = (w.edges[edge_of(a0)].tag == HalfTag::Minus) ? a0 : a1;
    int gp = (gm == a0) ? a1 : a0;
    if (w.edges[edge_of(gm)].tag != HalfTag::Minus || w.edges[edge_of(gp)].tag != HalfTag::Plus)
        throw Error("fan cut: germs are not a minus/plus pair");
    int ep_top = w.add_endpoint(Side::Hp, 0);
    int ep_germ = w.add_endpoint(Side::Vm, 0);
    w.rot[ep_top] = {gm};
    w.rot[ep_germ] = {gp};
    w.verts[o].alive = false;
    w.rot[o].clear();

    CutPair cp;
    cp.ray = ray;
    cp.k = km + 1;
    cp.l = lp;
    cp.matching = std::move(matching);
    cp.combined = compact(w);
    relabel_components(cp.combined);
    require_valid(cp.combined, "fan cut");
    cp.s_minus = compact(detail::half_restrict(cp.combined, HalfTag::Minus));
    relabel_components(cp.s_minus);
    require_valid(cp.s_minus, "fan cut minus half");
    cp.s_plus = compact(detail::half_restrict(cp.combined, HalfTag::Plus));
    relabel_components(cp.s_plus);
    require_valid(cp.s_plus, "fan cut plus half");
    return cp;
}

inline CutPair fan_cut(const Diagram& t) { return fan_cut(t, minus_splitting_ray(t)); }

// Region matrix of a strand system over a tangle.  `t_diagram` must have type
// (1, k-1, 1, k-1): its side points split the left side into regions 1..k
// (top to bottom) and the right side into k+1..2k (bottom to top).  The
// strands of the maximal smoothing of `s_diagram` are counted by the region
// pair holding their endpoints: one per ordered pair for distinct regions,
// two on the diagonal.
inline SymMatrix e_matrix(const Diagram& t_diagram, const Diagram& s_diagram) {
    DiagramType tt = type_of(t_diagram);
    if (tt.n1 != 1 || tt.n3 != 1 || tt.n2 != tt.n4)
        throw Error("e matrix: tangle must have matching side points and one top, one bottom");
    int k = tt.n2 + 1;
    std::vector<int> left, right;
    for (const auto& v : t_diagram.verts) {
        if (!v.alive || v.kind != VertexKind::Endpoint) continue;
        if (v.side == Side::Vm) left.push_back(v.rank);
        if (v.side == Side::Vp) right.push_back(v.rank);
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    auto region_of = [&](Side s, int rank) {
        const std::vector<int>& ranks = (s == Side::Vm) ? left : right;
        auto it = std::lower_bound(ranks.begin(), ranks.end(), rank);
        if (it != ranks.end() && *it == rank)
            throw Error("e matrix: strand rank " + std::to_string(rank) +
                        " collides with a region boundary");
        int below = int(it - ranks.begin());
        return (s == Side::Vm) ? 1 + below : k + 1 + below;
    };
    DiagramType st = type_of(s_diagram);
    if (st.n1 != 0 || st.n3 != 0)
        throw Error("e matrix: strand system may only meet the sides");
    Diagram sstar = (crossing_count(s_diagram) == 0) ? compact(s_diagram)
                                                     : extract_bridge(s_diagram).first;
    SymMatrix e = SymMatrix::zero(2 * k);
    for (const auto& c : components(sstar)) {
        if (c.kind != CompKind::Strand) continue;
        const Vertex& pa = sstar.verts[c.ep_from];
        const Vertex& pb = sstar.verts[c.ep_to];
        int i = region_of(pa.side, pa.rank);
        int j = region_of(pb.side, pb.rank);
        if (i == j)
            e.add_sym(i, i, 2);
        else
            e.add_sym(i, j, 1);
    }
    return e;
}

// Everything the cut certifies about one composite diagram.  Each named flag
// is a verdict, not a precondition: a failing bound is reported, not thrown.
struct BoundReport {
    int chi = 0, chi_plus = 0, chi_minus = 0, hybrid = 0;
    int min_ray_plus = 0, min_ray_minus = 0;
    int k = 0, l = 0;
    int min_vert_s_minus = -1, min_vert_s_plus = -1;
    SymMatrix e = SymMatrix::zero(0);
    CutPair cut;

    bool chi_sum_ok = false;  // crossings split into pure and hybrid
    bool f4_ok = false;       // minus half has the cut pair's tangle type
    bool f5_ok = false;       // the cut moved no crossings
    bool f6_ok = false;       // plus half has the cut pair's arc type
    bool f8_ok = false;       // region matrix satisfies the row-sum law
    bool width_ok = false;    // minus half's top-bottom width equals k-1
    bool lift_ok = false;     // plus half's width dominates its ray cost
    bool v_floor_ok = false;  // region distances dominate the weight matrix
    bool chain_ok = false;    // hybrid >= width(s_plus) + k-1 >= ray+ + ray-

    bool ok() const {
        return chi_sum_ok && f4_ok && f5_ok && f6_ok && f8_ok && width_ok && lift_ok &&
               v_floor_ok && chain_ok;
    }
};

inline BoundReport hybrid_bound_check(const Diagram& t) {
    BoundReport r;
    CrossingCounts cc = counts(t);
    r.chi = cc.chi;
    r.chi_plus = cc.chi_plus;
    r.chi_minus = cc.chi_minus;
    r.hybrid = cc.hybrid;
    r.chi_sum_ok = (r.chi == r.chi_plus + r.chi_minus + r.hybrid);
    r.min_ray_plus = min_ray(t, HalfTag::Plus);
    r.min_ray_minus = min_ray(t, HalfTag::Minus);
    r.cut = fan_cut(t);
    r.k = r.cut.k;
    r.l = r.cut.l;
    r.f4_ok = (type_of(r.cut.s_minus) == DiagramType{1, r.k - 1, 1, r.k - 1});
    r.f6_ok = (type_of(r.cut.s_plus) == DiagramType{0, r.l + 2, 0, r.l});
    CrossingCounts oc = counts(r.cut.combined);
    r.f5_ok = (oc.chi == cc.chi && oc.chi_plus == cc.chi_plus && oc.chi_minus == cc.chi_minus &&
               oc.hybrid == cc.hybrid);
    r.min_vert_s_minus = min_vert(r.cut.s_minus);
    r.min_vert_s_plus = min_vert(r.cut.s_plus);
    r.width_ok = (r.min_vert_s_minus == r.k - 1) && (r.min_ray_minus == r.k - 1);
    r.lift_ok = (r.min_vert_s_plus >= r.min_ray_plus);
    if (r.f4_ok && r.f6_ok) {
        r.e = e_matrix(r.cut.s_minus, r.cut.s_plus);
        r.f8_ok = check_star(r.e).ok;
        std::vector<std::vector<int>> v = v_matrix(r.cut.s_minus);
        SymMatrix wm = w_matrix(r.k);
        bool floor_ok = int(v.size()) == wm.n;
        for (int i = 1; floor_ok && i <= wm.n; ++i)
            for (int j = 1; j <= wm.n; ++j)
                if (v[i - 1][j - 1] < wm.at(i, j)) {
                    floor_ok = false;
                    break;
                }
        r.v_floor_ok = floor_ok;
    }
    r.chain_ok = (r.hybrid >= r.min_vert_s_plus + r.k - 1) &&
                 (r.min_vert_s_plus + r.k - 1 >= r.min_ray_plus + r.min_ray_minus);
    return r;
}

namespace detail {

// Keep one half, then walk a fresh arc from the critical point to the
// boundary along that half's cheapest ray, inserting one crossing per edge
// crossed.  The arc passes over everything or under everything, so the
// closed-up diagram is a plain knot diagram of the kept half.
inline Diagram close_half(const Diagram& t, HalfTag keep, Side land, bool arc_over) {
    {
        require_valid(t, "close up");
        ValidationReport rep = validate_subdivided(t);
        if (!rep.ok()) throw Error("close up: " + rep.problems.front());
    }
    int o = t.find_o();
    CrossingCounts cc = counts(t);
    int expect = (keep == HalfTag::Plus) ? cc.chi_plus : cc.chi_minus;
    Arrangement a =
        arrange(t, keep == HalfTag::Plus ? HalfFilter::PlusOnly : HalfFilter::MinusOnly);
    DualPath p = min_ray_path(a);
    if (!p.found) throw Error("close up: no ray to the boundary");
    std::vector<int> from_faces;
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
        if (p.nodes[i] < a.n_faces() && p.nodes[i + 1] < a.n_faces())
            from_faces.push_back(p.nodes[i]);
    if (int(from_faces.size()) != int(p.crossed_edges.size()))
        throw Error("close up: ray reconstruction mismatch");

    Diagram w = half_restrict(t, keep);
    std::vector<int> hv = w.half_vertex_table();
    if (w.rot[o].size() != 1) throw Error("close up: critical point kept the wrong degree");
    w.verts[o].kind = VertexKind::Joint;
    int e_first = w.add_edge_record(HalfTag::None);
    w.rot[o].push_back(2 * e_first);
    int pending = 2 * e_first + 1;
    for (std::size_t i = 0; i < p.crossed_edges.size(); ++i) {
        int e = p.crossed_edges[i];
        int f = from_faces[i];
        int h_f = (a.m.face_of_half[2 * e] == f) ? 2 * e : twin(2 * e);
        int v = hv[twin(h_f)];
        int x = w.add_crossing(arc_over ? 0 : 1);
        int e2 = w.add_edge_record(w.edges[e].tag);
        int slot = w.rot_index_of(v, twin(h_f));
        w.rot[v][slot] = 2 * e2 + 1;
        int e_out = w.add_edge_record(HalfTag::None);
        // Counterclockwise at the new crossing: arc in, spoke back toward the
        // crossed half's seat, arc out, spoke onward to v.
        w.rot[x] = {pending, twin(h_f), 2 * e_out, 2 * e2};
        pending = 2 * e_out + 1;
    }
    int ep = w.add_endpoint(land, 0);
    w.rot[ep] = {pending};
    for (auto& ed : w.edges) ed.tag = HalfTag::None;
    Diagram out = compact(w);
    relabel_components(out);
    require_valid(out, "close up");
    if (!(type_of(out) == DiagramType{1, 0, 1, 0}))
        throw Error("close up: result is not a knot diagram");
    if (crossing_count(out) != expect + p.cost)
        throw Error("close up: crossing count drifted");
    return out;
}

}  // namespace detail

// Close the plus half up into a knot diagram; the closing arc dives under by
// default.  The minus counterpart keeps the arc on top by default, so free
// loops of the kept half fall off the closure either way.
inline Diagram close_upper(const Diagram& t, bool arc_over = false) {
    return detail::close_half(t, HalfTag::Plus, Side::Hm, arc_over);
}

inline Diagram close_lower(const Diagram& t, bool arc_over = true) {
    return detail::close_half(t, HalfTag::Minus, Side::Hp, arc_over);
}

// One row of the verification harness: the crossing tallies and ray costs of
// a composite diagram, with the bound verdicts spelled out.
struct MainStepReport {
    int step = 0;
    std::uint64_t hash = 0;
    int chi = 0, chi_plus = 0, chi_minus = 0, hybrid = 0;
    int min_ray_plus = 0, min_ray_minus = 0;
    int upper = 0;  // chi_plus + min_ray_plus
    int lower = 0;  // chi_minus + min_ray_minus
    long long c_sum = 0;
    bool chi_sum_ok = false;
    bool hybrid_ge_ok = false;
    bool main_ge_ok = false;
};

inline MainStepReport main_step_report(const Diagram& d, int step, long long c0, long long c1) {
    MainStepReport r;
    r.step = step;
    r.hash = diagram_hash(d);
    CrossingCounts cc = counts(d);
    r.chi = cc.chi;
    r.chi_plus = cc.chi_plus;
    r.chi_minus = cc.chi_minus;
    r.hybrid = cc.hybrid;
    r.min_ray_plus = min_ray(d, HalfTag::Plus);
    r.min_ray_minus = min_ray(d, HalfTag::Minus);
    r.upper = r.chi_plus + r.min_ray_plus;
    r.lower = r.chi_minus + r.min_ray_minus;
    r.c_sum = c0 + c1;
    r.chi_sum_ok = (r.chi == r.chi_plus + r.chi_minus + r.hybrid);
    r.hybrid_ge_ok = (r.hybrid >= r.min_ray_plus + r.min_ray_minus);
    r.main_ge_ok = (r.chi >= r.c_sum);
    return r;
}

// Replays a trace and reports every diagram on it: the seed as step 0, then
// one row per trace step.  `c0`, `c1` are the claimed crossing numbers of the
// two factors.
inline std::vector<MainStepReport> main_inequality_report(const MoveTrace& tr, long long c0,
                                                          long long c1) {
    const Ruleset& rs = Ruleset::by_name(tr.ruleset);
    std::vector<MainStepReport> out;
    Diagram cur = tr.seed;
    out.push_back(main_step_report(cur, 0, c0, c1));
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        if (!tr.steps[i].noop) cur = apply_move(cur, tr.steps[i].site, rs);
        if (diagram_hash(cur) != tr.steps[i].hash)
            throw Error("main report: trace hash mismatch at step " + std::to_string(i + 1));
        out.push_back(main_step_report(cur, int(i) + 1, c0, c1));
    }
    return out;
}

struct MainRunConfig {
    Diagram k0, k1;          // the two factors, plain knot diagrams
    long long c0 = 0, c1 = 0;  // their claimed crossing numbers
    int walks = 1;
    int steps = 10;
    std::uint64_t seed = 0;
    std::string ruleset = "star";
    int max_crossings = 18;
    int threads = 0;  // 0: one per hardware thread, capped at `walks`
};

// Runs `walks` independent random walks from the composite of the factors and
// reports every step.  Walk w uses seed + w, and each walk's work is
// self-contained, so the result does not depend on the thread count.
inline std::vector<std::vector<MainStepReport>> main_inequality_run(const MainRunConfig& cfg) {
    if (cfg.walks < 1) throw Error("main run: need at least one walk");
    Diagram t0 = compose(cfg.k0, cfg.k1);
    const Ruleset& rs = Ruleset::by_name(cfg.ruleset);
    std::vector<std::vector<MainStepReport>> out(cfg.walks);
    std::vector<std::string> errors(cfg.walks);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int w = next.fetch_add(1); w < cfg.walks; w = next.fetch_add(1)) {
            try {
                MoveTrace tr = random_walk(t0, cfg.steps, cfg.seed + std::uint64_t(w), rs, {},
                                           cfg.max_crossings);
                out[w] = main_inequality_report(tr, cfg.c0, cfg.c1);
            } catch (const std::exception& ex) {
                errors[w] = ex.what();
            }
        }
    };
    int nthreads = cfg.threads > 0 ? cfg.threads : int(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, cfg.walks));
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (int w = 0; w < cfg.walks; ++w)
        if (!errors[w].empty())
            throw Error("main run: walk " + std::to_string(w) + ": " + errors[w]);
    return out;
}

// A bound report as a single JSON line mirroring the per-step schema.
inline std::string bound_report_json(const BoundReport& r) {
    std::ostringstream o;
    auto flag = [](bool b) { return b ? "true" : "false"; };
    o << "{\"chi\":" << r.chi << ",\"chi_plus\":" << r.chi_plus
      << ",\"chi_minus\":" << r.chi_minus << ",\"hybrid\":" << r.hybrid
      << ",\"min_ray_plus\":" << r.min_ray_plus << ",\"min_ray_minus\":" << r.min_ray_minus
      << ",\"k\":" << r.k << ",\"l\":" << r.l << ",\"min_vert_s_minus\":" << r.min_vert_s_minus
      << ",\"min_vert_s_plus\":" << r.min_vert_s_plus << ",\"chi_sum_ok\":" << flag(r.chi_sum_ok)
      << ",\"f4_ok\":" << flag(r.f4_ok) << ",\"f5_ok\":" << flag(r.f5_ok)
      << ",\"f6_ok\":" << flag(r.f6_ok) << ",\"f8_ok\":" << flag(r.f8_ok)
      << ",\"width_ok\":" << flag(r.width_ok) << ",\"lift_ok\":" << flag(r.lift_ok)
      << ",\"v_floor_ok\":" << flag(r.v_floor_ok) << ",\"chain_ok\":" << flag(r.chain_ok)
      << ",\"ok\":" << flag(r.ok()) << "}";
    return o.str();
}

// One report as a single JSON line, hash as 16 lowercase hex digits.
inline std::string main_report_json(const MainStepReport& r, int walk) {
    std::ostringstream o;
    auto flag = [](bool b) { return b ? "true" : "false"; };
    o << "{\"walk\":" << walk << ",\"step\":" << r.step << ",\"hash\":\"" << hash_hex(r.hash)
      << "\",\"chi\":" << r.chi << ",\"chi_plus\":" << r.chi_plus
      << ",\"chi_minus\":" << r.chi_minus << ",\"hybrid\":" << r.hybrid
      << ",\"min_ray_plus\":" << r.min_ray_plus << ",\"min_ray_minus\":" << r.min_ray_minus
      << ",\"upper\":" << r.upper << ",\"lower\":" << r.lower << ",\"c_sum\":" << r.c_sum
      << ",\"chi_sum_ok\":" << flag(r.chi_sum_ok) << ",\"hybrid_ge_ok\":" << flag(r.hybrid_ge_ok)
      << ",\"main_ge_ok\":" << flag(r.main_ge_ok) << "}";
    return o.str();
}

}  // namespace tangle
