#pragma once

// Arrangement: the face structure of a diagram inside its square, with the
// boundary broken into terminals (maximal boundary arcs between consecutive
// endpoints and corners) and the vertical-side terminals enumerated as the
// regions L_1..L_m, counterclockwise from the top-left corner.

#include <functional>

#include "core.hpp"

namespace tangle {

struct Terminal {
    int bedge = -1;       // boundary edge index in the augmented map
    Side side = Side::Hp; // square side this arc lies on
    int inner_face = -1;  // face of the map incident to the arc
    int region = -1;      // 1-based L index for vertical-side arcs, else -1
};

struct Arrangement {
    Diagram d;            // the diagram the arrangement was built from
    HalfFilter filter = HalfFilter::All;
    detail::AugMap m;
    std::vector<Terminal> terminals;
    std::vector<int> region_terminal;  // region index (1-based) -> terminal; [0] unused

    int n_faces() const { return int(m.face_walks.size()); }
    int n_regions() const { return int(region_terminal.size()) - 1; }

    // Faces incident to a diagram vertex (dropped vertices yield nothing).
    std::vector<int> faces_at(int v) const {
        std::vector<int> fs;
        for (int h : m.arot[v]) {
            int f = m.face_of_half[h];
            bool dup = false;
            for (int g : fs) dup |= (g == f);
            if (!dup) fs.push_back(f);
        }
        return fs;
    }

    // The vertex (or corner node) holding an augmented half.
    int node_of(int h) const { return m.node_of_half[h]; }
    bool is_boundary_half(int h) const { return h >= m.n_diagram_halves; }
};

inline Arrangement arrange(const Diagram& d, HalfFilter filter = HalfFilter::All) {
    Arrangement a;
    a.d = d;
    a.filter = filter;
    a.m = detail::build_augmap(a.d, filter);

    // Sides of the boundary edges: walk the boundary node sequence and switch
    // side at each corner. The sequence starts at TL heading down the left side.
    const auto& bn = a.m.boundary_nodes;
    int nb = int(bn.size());
    std::vector<Side> side_of_bedge(nb);
    {
        Side cur = Side::Vm;
        for (int i = 0; i < nb; ++i) {
            // edge i runs bn[i] -> bn[i+1]; a corner at bn[i] starts a new side
            if (a.m.node_is_corner[bn[i]]) {
                if (bn[i] == a.m.corner[0]) cur = Side::Vm;
                if (bn[i] == a.m.corner[1]) cur = Side::Hm;
                if (bn[i] == a.m.corner[2]) cur = Side::Vp;
                if (bn[i] == a.m.corner[3]) cur = Side::Hp;
            }
            side_of_bedge[i] = cur;
        }
    }
    a.terminals.resize(nb);
    for (int i = 0; i < nb; ++i) {
        Terminal t;
        t.bedge = i;
        t.side = side_of_bedge[i];
        int hf = a.m.n_diagram_halves + 2 * i;
        t.inner_face = a.m.face_of_half[hf];
        if (t.inner_face == a.m.outer_face)
            throw Error("arrange: boundary arc facing the outer face");
        a.terminals[i] = t;
    }
    // Regions: vertical-side terminals in walk order (left top-to-bottom,
    // then right bottom-to-top).
    a.region_terminal.assign(1, -1);
    for (int i = 0; i < nb; ++i)
        if (a.terminals[i].side == Side::Vm) {
            a.terminals[i].region = int(a.region_terminal.size());
            a.region_terminal.push_back(i);
        }
    for (int i = 0; i < nb; ++i)
        if (a.terminals[i].side == Side::Vp) {
            a.terminals[i].region = int(a.region_terminal.size());
            a.region_terminal.push_back(i);
        }
    return a;
}

struct BoundaryRegion {
    int index = 0;        // 1-based
    Side side = Side::Hp;
    int incident_face = -1;
    int terminal = -1;
};

inline std::vector<BoundaryRegion> regions(const Arrangement& a) {
    std::vector<BoundaryRegion> rs;
    for (int i = 1; i <= a.n_regions(); ++i) {
        const Terminal& t = a.terminals[a.region_terminal[i]];
        rs.push_back({i, t.side, t.inner_face, a.region_terminal[i]});
    }
    return rs;
}

inline std::vector<BoundaryRegion> regions(const Diagram& d) { return regions(arrange(d)); }

}  // namespace tangle
