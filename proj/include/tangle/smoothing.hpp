#pragma once

// Crossing smoothings and the bridge of a diagram: the maximal family of
// disjoint crossing-free left-right strands extractable by smoothing, found
// by peeling outermost strands off the region swept from the top edge.

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "dual.hpp"

namespace tangle {

struct SmoothingChoice {
    int crossing = -1;
    int pairing = 0;  // 0 joins rotation slots (0,1) and (2,3); 1 joins (1,2) and (3,0)
};

struct Bridge {
    Diagram diagram;                            // the strands alone, freshly built
    std::vector<std::pair<int, int>> anchors;   // (V- rank, V+ rank) per strand, V- ascending
    int size() const { return int(anchors.size()); }
};

struct HexDecision {
    bool vertical = false;   // true: a crossing-free top-bottom corridor exists
    int strand = -1;         // else: index of a left-right strand (components() order)
    std::vector<int> path_faces;  // the corridor's faces when vertical
};

struct SigmaPair {
    int k = 0;
    std::vector<std::pair<int, int>> sigma1, sigma2;  // 1-based boundary labels
    Diagram sigma1_diagram, sigma2_diagram;
};

namespace smoothdetail {

// Replace crossing x by two joints, pairing its rotation slots (p,p+1) and
// (p+2,p+3). Edge records and ids are untouched, so edge marks survive.
inline void smooth_in_place(Diagram& d, int x, int pairing) {
    if (x < 0 || x >= int(d.verts.size()) || !d.verts[x].alive ||
        d.verts[x].kind != VertexKind::Crossing)
        throw Error("smoothing requires a live crossing");
    if (pairing != 0 && pairing != 1) throw Error("smoothing pairing must be 0 or 1");
    const std::vector<int> r = d.rot[x];
    if (r.size() != 4) throw Error("smoothing: crossing without 4 half-edges");
    int j1 = d.add_joint();
    int j2 = d.add_joint();
    d.rot[j1] = {r[pairing], r[(pairing + 1) % 4]};
    d.rot[j2] = {r[(pairing + 2) % 4], r[(pairing + 3) % 4]};
    d.rot[x].clear();
    d.verts[x].alive = false;
}

// Number of closed components (no validation: callers may hold intermediate
// states whose labels are stale).
inline int count_loops(const Diagram& d) {
    int n = 0;
    for (const auto& c : components(d)) n += (c.kind == CompKind::Loop) ? 1 : 0;
    return n;
}

// Smooth every crossing, in ascending id order, choosing for each the pairing
// that creates fewer closed components (ties go to pairing 0).
inline void default_smooth_all(Diagram& d) {
    for (int x = 0; x < int(d.verts.size()); ++x) {
        if (!d.verts[x].alive || d.verts[x].kind != VertexKind::Crossing) continue;
        Diagram t0 = d, t1 = d;
        smooth_in_place(t0, x, 0);
        smooth_in_place(t1, x, 1);
        smooth_in_place(d, x, count_loops(t0) <= count_loops(t1) ? 0 : 1);
    }
}

// Remove every closed component. Only callable on crossing-free diagrams,
// where no vertex is shared between components.
inline void drop_loops(Diagram& d) {
    auto hv = d.half_vertex_table();
    for (const auto& c : components(d)) {
        if (c.kind != CompKind::Loop) continue;
        for (int h : c.halves) {
            d.edges[edge_of(h)].alive = false;
            for (int v : {hv[h], hv[twin(h)]}) {
                if (v >= 0 && d.verts[v].alive) {
                    d.verts[v].alive = false;
                    d.rot[v].clear();
                }
            }
        }
    }
}

// Face occupying quadrant q of crossing x (the sector between rotation slots
// q and q+1): a face walk entering along the half seated at slot q+1 turns
// out through slot q, so its corner spans exactly that sector.
inline int quadrant_face(const Arrangement& a, int x, int q) {
    return a.m.face_of_half[twin(a.m.arot[x][(q + 1) % 4])];
}

}  // namespace smoothdetail

// Smooth one crossing of a copy of d. The result is compacted and revalidated.
inline Diagram smooth_crossing(const Diagram& d, const SmoothingChoice& c) {
    Diagram w = d;
    smoothdetail::smooth_in_place(w, c.crossing, c.pairing);
    w = compact(w);
    relabel_components(w);
    require_valid(w, "smooth_crossing");
    return w;
}

// Smooth every crossing and discard the closed components that appear: the
// canonical crossing-free diagram underlying d's strands.
inline Diagram maximal_smoothing(const Diagram& d) {
    Diagram w = d;
    smoothdetail::default_smooth_all(w);
    smoothdetail::drop_loops(w);
    w = compact(w);
    relabel_components(w);
    require_valid(w, "maximal_smoothing");
    return w;
}

// Count the crossings whose two passing strands carry different half tags.
// Each passage (rotation slots {0,2} and {1,3}) must be uniformly tagged.
inline int overlay_crossings(const Diagram& d) {
    int n = 0;
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (!d.verts[v].alive || d.verts[v].kind != VertexKind::Crossing) continue;
        HalfTag t[4];
        for (int i = 0; i < 4; ++i) t[i] = d.edges[edge_of(d.rot[v][i])].tag;
        if (t[0] != t[2] || t[1] != t[3])
            throw Error("overlay_crossings: passage with mixed half tags at vertex " +
                        std::to_string(v));
        n += (t[0] != t[1]) ? 1 : 0;
    }
    return n;
}

// Mirror the diagram across the vertical axis: left and right sides swap,
// boundary ranks reverse, rotations reverse, and the over branch of each
// crossing keeps its strand (so its parity flips with the slot order).
inline Diagram reflect_lr(const Diagram& d) {
    Diagram r = d;
    for (auto& v : r.verts) {
        if (!v.alive) continue;
        if (v.kind == VertexKind::Endpoint) {
            if (v.side == Side::Vm)
                v.side = Side::Vp;
            else if (v.side == Side::Vp)
                v.side = Side::Vm;
            v.rank = -v.rank;
        } else if (v.kind == VertexKind::Crossing) {
            v.over_parity = 1 - v.over_parity;
        }
    }
    for (auto& rl : r.rot) std::reverse(rl.begin(), rl.end());
    relabel_components(r);
    require_valid(r, "reflect_lr");
    return r;
}

// For a crossing-free diagram: either name a left-right strand, or exhibit a
// top-bottom corridor of faces crossing nothing. Exactly one case holds.
inline HexDecision hex_decision(const Diagram& d) {
    if (crossing_count(d) > 0) throw Error("hex_decision requires a crossing-free diagram");
    HexDecision h;
    auto comps = components(d);
    for (int i = 0; i < int(comps.size()); ++i) {
        if (comps[i].kind != CompKind::Strand) continue;
        Side a = d.verts[comps[i].ep_from].side, b = d.verts[comps[i].ep_to].side;
        if ((a == Side::Vm && b == Side::Vp) || (a == Side::Vp && b == Side::Vm)) {
            h.vertical = false;
            h.strand = i;
            return h;
        }
    }
    Arrangement a = arrange(d);
    DualGraph g = build_dual(a);
    DualPath p = dual_shortest(g, detail::terminal_nodes_on(a, g, Side::Hp),
                               detail::terminal_nodes_on(a, g, Side::Hm));
    if (!p.found || p.cost != 0)
        throw Error("hex_decision: no free corridor in a diagram without left-right strands");
    h.vertical = true;
    for (int n : p.nodes)
        if (n < g.n_faces) h.path_faces.push_back(n);
    return h;
}

// Extract the bridge of a diagram with left and right endpoints only.
// Returns the fully smoothed diagram d* and the bridge b contained in it.
//
// The sweep region grows from the top edge across peeled strands only. While
// a crossing sits on its rim, that crossing is smoothed the way that walls
// the region off (joining the two halves bounding the touched quadrant);
// when none does, the rim is an outermost crossing-free left-right strand,
// which is peeled and recorded. Every step must preserve the top-to-bottom
// distance (smoothings) or lower it by exactly one (peels).
inline std::pair<Diagram, Bridge> extract_bridge(const Diagram& d) {
    DiagramType t = type_of(d);
    if (t.n1 != 0 || t.n3 != 0)
        throw Error("extract_bridge requires a diagram with no top or bottom endpoints");

    Diagram w = d;
    std::set<int> marked;  // edges of peeled strands (ids are stable under smoothing)
    std::vector<std::pair<int, int>> anchors;
    int expect = -1;
    int cap = 2 * (crossing_count(d) + int(components(d).size()) + 2);

    for (int iter = 0;; ++iter) {
        if (iter > cap) throw Error("extract_bridge: sweep failed to converge");
        Arrangement a = arrange(w);
        DualGraph g = build_dual(a, [&](int e) { return marked.count(e) ? 0 : 1; });
        DualPath p = dual_shortest(g, detail::terminal_nodes_on(a, g, Side::Hp),
                                   detail::terminal_nodes_on(a, g, Side::Hm));
        if (!p.found) throw Error("extract_bridge: top-bottom dual path vanished");
        if (expect >= 0 && p.cost != expect)
            throw Error("extract_bridge: top-to-bottom distance drifted from " +
                        std::to_string(expect) + " to " + std::to_string(p.cost));
        expect = p.cost;
        if (p.cost == 0) break;

        // Region: faces reachable from the top terminal across peeled edges.
        std::vector<char> in_region(g.n_faces, 0);
        std::vector<int> queue;
        for (int tn : detail::terminal_nodes_on(a, g, Side::Hp)) {
            int f = a.terminals[tn - g.n_faces].inner_face;
            if (!in_region[f]) {
                in_region[f] = 1;
                queue.push_back(f);
            }
        }
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (const auto& arc : g.adj[u]) {
                if (arc.to >= g.n_faces || arc.via_edge < 0) continue;
                if (!marked.count(arc.via_edge) || in_region[arc.to]) continue;
                in_region[arc.to] = 1;
                queue.push_back(arc.to);
            }
        }

        // Crossings touched by the region: all touched quadrants must share a
        // parity, and joining the slots around one walls the region off.
        int pick_x = -1, pick_pairing = -1;
        for (int x = 0; x < int(w.verts.size()); ++x) {
            if (!w.verts[x].alive || w.verts[x].kind != VertexKind::Crossing) continue;
            if (int(a.m.arot[x].size()) != 4) continue;  // floating: not in the map
            int parity = -1;
            for (int q = 0; q < 4; ++q) {
                if (!in_region[smoothdetail::quadrant_face(a, x, q)]) continue;
                if (parity < 0)
                    parity = q % 2;
                else if (parity != q % 2)
                    throw Error("extract_bridge: region touches adjacent quadrants of crossing " +
                                std::to_string(x));
            }
            if (parity >= 0 && pick_x < 0) {
                pick_x = x;
                pick_pairing = parity;
            }
        }
        if (pick_x >= 0) {
            smoothdetail::smooth_in_place(w, pick_x, pick_pairing);
            continue;
        }

        // No crossing on the rim: peel the outermost strand bounding the
        // region. It must be crossing-free and run left to right.
        std::set<int> rim;
        for (int f = 0; f < g.n_faces; ++f) {
            if (!in_region[f]) continue;
            for (int h : a.m.face_walks[f]) {
                if (h >= a.m.n_diagram_halves) continue;
                int e = edge_of(h);
                if (!marked.count(e)) rim.insert(e);
            }
        }
        auto comps = components(w);
        auto hv = w.half_vertex_table();
        int picked = -1;
        for (int i = 0; i < int(comps.size()) && picked < 0; ++i) {
            const Component& c = comps[i];
            if (c.kind != CompKind::Strand) continue;
            Side sa = w.verts[c.ep_from].side, sb = w.verts[c.ep_to].side;
            bool lr = (sa == Side::Vm && sb == Side::Vp) || (sa == Side::Vp && sb == Side::Vm);
            if (!lr) continue;
            bool on_rim = false, free = true;
            for (int e : c.edge_ids) on_rim |= rim.count(e) > 0;
            for (int h : c.halves)
                for (int v : {hv[h], hv[twin(h)]})
                    free &= w.verts[v].kind != VertexKind::Crossing;
            if (on_rim && free) picked = i;
        }
        if (picked < 0)
            throw Error("extract_bridge: no crossing-free left-right strand on the region rim");
        const Component& c = comps[picked];
        int rm = 0, rp = 0;
        for (int ep : {c.ep_from, c.ep_to})
            (w.verts[ep].side == Side::Vm ? rm : rp) = w.verts[ep].rank;
        anchors.push_back({rm, rp});
        for (int e : c.edge_ids) marked.insert(e);
        expect = p.cost - 1;
    }

    // Finish: smooth whatever crossings remain (none touched the region),
    // discard closed components, and tidy up.
    smoothdetail::default_smooth_all(w);
    smoothdetail::drop_loops(w);
    w = compact(w);
    relabel_components(w);
    require_valid(w, "extract_bridge result");

    // Assemble the bridge: strands sorted by left rank must descend on the
    // right (disjoint left-right strands admit no other planar layout), and
    // each must survive verbatim in the smoothed diagram.
    std::sort(anchors.begin(), anchors.end());
    for (int i = 0; i + 1 < int(anchors.size()); ++i)
        if (anchors[i].second <= anchors[i + 1].second)
            throw Error("extract_bridge: bridge strands are not nested");
    auto final_comps = components(w);
    auto final_hv = w.half_vertex_table();
    Bridge b;
    b.anchors = anchors;
    for (auto [rm, rp] : anchors) {
        int found = -1;
        for (int i = 0; i < int(final_comps.size()) && found < 0; ++i) {
            const Component& c = final_comps[i];
            if (c.kind != CompKind::Strand) continue;
            const Vertex& u = w.verts[c.ep_from];
            const Vertex& v = w.verts[c.ep_to];
            bool m1 = u.side == Side::Vm && u.rank == rm && v.side == Side::Vp && v.rank == rp;
            bool m2 = v.side == Side::Vm && v.rank == rm && u.side == Side::Vp && u.rank == rp;
            if (m1 || m2) found = i;
        }
        if (found < 0) throw Error("extract_bridge: peeled strand missing from the result");
        for (int h : final_comps[found].halves)
            for (int v : {final_hv[h], final_hv[twin(h)]})
                if (w.verts[v].kind == VertexKind::Crossing)
                    throw Error("extract_bridge: bridge strand gained a crossing");
        int u = b.diagram.add_endpoint(Side::Vm, rm);
        int v = b.diagram.add_endpoint(Side::Vp, rp);
        b.diagram.connect(u, v, final_comps[found].tag);
    }
    relabel_components(b.diagram);
    require_valid(b.diagram, "bridge diagram");
    return {w, b};
}

namespace smoothdetail {

// One side of the sigma construction: rotate the top endpoint onto the left
// side and the bottom endpoint onto the right side (prepending them in rank,
// which keeps the cyclic boundary order and hence the map), extract the
// bridge of the rotated diagram, and report its matching on 1-based labels
// counted counterclockwise from the rotated top point.
inline std::pair<std::vector<std::pair<int, int>>, Bridge> sigma_side(const Diagram& d, int k) {
    Diagram d1 = d;
    int ehp = -1, ehm = -1, min_vm = 0, min_vp = 0;
    for (int v = 0; v < int(d1.verts.size()); ++v) {
        const Vertex& vx = d1.verts[v];
        if (!vx.alive || vx.kind != VertexKind::Endpoint) continue;
        if (vx.side == Side::Hp) ehp = v;
        if (vx.side == Side::Hm) ehm = v;
        if (vx.side == Side::Vm) min_vm = std::min(min_vm, vx.rank);
        if (vx.side == Side::Vp) min_vp = std::min(min_vp, vx.rank);
    }
    d1.verts[ehp].side = Side::Vm;
    d1.verts[ehp].rank = min_vm - 1;
    d1.verts[ehm].side = Side::Vp;
    d1.verts[ehm].rank = min_vp - 1;
    relabel_components(d1);
    require_valid(d1, "sigma rotation");
    if (min_vert(d1) != k)
        throw Error("sigma_pair: rotating the axis endpoints did not raise the count to " +
                    std::to_string(k));
    auto [dstar, b] = extract_bridge(d1);
    (void)dstar;
    if (b.size() != k) throw Error("sigma_pair: bridge of the rotated diagram has wrong size");

    // Label map: V- ranks ascending are labels 1..k, V+ ranks ascending are
    // labels k+1..2k.
    std::vector<int> vm_ranks, vp_ranks;
    for (const auto& [rm, rp] : b.anchors) {
        vm_ranks.push_back(rm);
        vp_ranks.push_back(rp);
    }
    std::sort(vm_ranks.begin(), vm_ranks.end());
    std::sort(vp_ranks.begin(), vp_ranks.end());
    auto pos = [](const std::vector<int>& v, int r) {
        return int(std::lower_bound(v.begin(), v.end(), r) - v.begin());
    };
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [rm, rp] : b.anchors)
        pairs.push_back({1 + pos(vm_ranks, rm), k + 1 + pos(vp_ranks, rp)});
    std::sort(pairs.begin(), pairs.end());
    return {pairs, b};
}

}  // namespace smoothdetail

// The two boundary matchings induced by the bridges of the two axis
// rotations of a diagram whose left-right distance is exactly its number of
// side endpoints plus... (type (1,m,1,m) with minimal vertical count m, so
// k = m+1 strands appear after either rotation). Labels count from the top
// point: sigma1 counterclockwise, sigma2 clockwise (via the mirror image).
inline SigmaPair sigma_pair(const Diagram& d) {
    DiagramType t = type_of(d);
    if (t.n1 != 1 || t.n3 != 1 || t.n2 != t.n4)
        throw Error("sigma_pair requires one top point, one bottom point and balanced sides");
    int k = t.n2 + 1;
    if (min_vert(d) != k - 1)
        throw Error("sigma_pair: left-right distance must equal the side endpoint count");

    SigmaPair sp;
    sp.k = k;
    auto [p1, b1] = smoothdetail::sigma_side(d, k);
    sp.sigma1 = p1;
    sp.sigma1_diagram = Diagram{};
    {
        // Rebuild the matching on d's own endpoints: label 1 is the top
        // point, 2..k the left points by rank, k+1 the bottom point,
        // k+2..2k the right points by rank.
        std::vector<std::pair<Side, int>> label_pt(2 * k + 1, {Side::Hp, 0});
        std::vector<int> vm, vp;
        int top_rank = 0, bot_rank = 0;
        for (const auto& v : d.verts) {
            if (!v.alive || v.kind != VertexKind::Endpoint) continue;
            if (v.side == Side::Hp) top_rank = v.rank;
            if (v.side == Side::Hm) bot_rank = v.rank;
            if (v.side == Side::Vm) vm.push_back(v.rank);
            if (v.side == Side::Vp) vp.push_back(v.rank);
        }
        std::sort(vm.begin(), vm.end());
        std::sort(vp.begin(), vp.end());
        label_pt[1] = {Side::Hp, top_rank};
        label_pt[k + 1] = {Side::Hm, bot_rank};
        for (int i = 0; i < k - 1; ++i) {
            label_pt[2 + i] = {Side::Vm, vm[i]};
            label_pt[k + 2 + i] = {Side::Vp, vp[i]};
        }
        for (auto [i, j] : sp.sigma1) {
            int u = sp.sigma1_diagram.add_endpoint(label_pt[i].first, label_pt[i].second);
            int v = sp.sigma1_diagram.add_endpoint(label_pt[j].first, label_pt[j].second);
            sp.sigma1_diagram.connect(u, v);
        }
        relabel_components(sp.sigma1_diagram);
        require_valid(sp.sigma1_diagram, "sigma1 diagram");
    }

    // The clockwise matching is the counterclockwise matching of the mirror
    // image; its diagram mirrors back onto d's endpoints.
    Diagram dm = reflect_lr(d);
    auto [p2, b2] = smoothdetail::sigma_side(dm, k);
    sp.sigma2 = p2;
    {
        std::vector<std::pair<Side, int>> label_pt(2 * k + 1, {Side::Hp, 0});
        std::vector<int> vm, vp;
        int top_rank = 0, bot_rank = 0;
        for (const auto& v : dm.verts) {
            if (!v.alive || v.kind != VertexKind::Endpoint) continue;
            if (v.side == Side::Hp) top_rank = v.rank;
            if (v.side == Side::Hm) bot_rank = v.rank;
            if (v.side == Side::Vm) vm.push_back(v.rank);
            if (v.side == Side::Vp) vp.push_back(v.rank);
        }
        std::sort(vm.begin(), vm.end());
        std::sort(vp.begin(), vp.end());
        label_pt[1] = {Side::Hp, top_rank};
        label_pt[k + 1] = {Side::Hm, bot_rank};
        for (int i = 0; i < k - 1; ++i) {
            label_pt[2 + i] = {Side::Vm, vm[i]};
            label_pt[k + 2 + i] = {Side::Vp, vp[i]};
        }
        Diagram mirror;
        for (auto [i, j] : sp.sigma2) {
            int u = mirror.add_endpoint(label_pt[i].first, label_pt[i].second);
            int v = mirror.add_endpoint(label_pt[j].first, label_pt[j].second);
            mirror.connect(u, v);
        }
        relabel_components(mirror);
        sp.sigma2_diagram = reflect_lr(mirror);
    }
    return sp;
}

}  // namespace tangle
