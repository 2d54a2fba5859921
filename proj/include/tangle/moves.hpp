#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "tdf.hpp"

// Local rewriting moves on tangle diagrams: curl insertion/removal (r1+/r1-),
// finger insertion/removal (r2+/r2-), triangle flips (r3), and slides of an
// arc across the critical point (the Reidemeister moves of the square, plus
// the slide move special to diagrams carrying a marked critical point).
//
// A Ruleset names which slide flavours are allowed and whether removal-type
// moves may dissolve arcs that run through the critical point.  Moves are
// addressed by small declarative MoveSites with a stable textual form, so a
// move applied today can be replayed from its text tomorrow.

namespace tangle {

enum class MoveKind { R1Insert, R1Remove, R2Insert, R2Remove, R3, Slide };
enum class SlideLayer { Over, Under };

inline const char* kind_token(MoveKind k) {
    switch (k) {
        case MoveKind::R1Insert: return "r1+";
        case MoveKind::R1Remove: return "r1-";
        case MoveKind::R2Insert: return "r2+";
        case MoveKind::R2Remove: return "r2-";
        case MoveKind::R3: return "r3";
        case MoveKind::Slide: return "slide";
    }
    return "?";
}

// Net change in crossing count caused by a move of the given kind.
inline int crossing_delta(MoveKind k) {
    switch (k) {
        case MoveKind::R1Insert: return 1;
        case MoveKind::R1Remove: return -1;
        case MoveKind::R2Insert: return 2;
        case MoveKind::R2Remove: return -2;
        default: return 0;
    }
}

struct MoveSite {
    MoveKind kind = MoveKind::R1Insert;
    int edge = -1;       // r1+: edge to split; r2+: the edge passing under
    char side = 'r';     // r1+: 'l' or 'r', relative to the direction of half 2*edge
    int over = 0;        // r1+: over_parity of the created crossing
    int over_edge = -1;  // r2+: the edge passing over
    int face = -1;       // r1-/r2-/r3: face to collapse; r2+: launch face; slide: source corner face
    int to_face = -1;    // slide: the corner face on the far side of the critical point
    HalfTag half = HalfTag::None;          // slide: Plus or Minus (tag of the sliding arc)
    SlideLayer layer = SlideLayer::Over;   // slide: the arc's layer at both crossings
};

// Two sites address the same move if their language-visible anchors agree.
inline bool same_site(const MoveSite& a, const MoveSite& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case MoveKind::R1Insert: return a.edge == b.edge && a.side == b.side && a.over == b.over;
        case MoveKind::R2Insert:
            return a.edge == b.edge && a.over_edge == b.over_edge && a.face == b.face;
        case MoveKind::R1Remove:
        case MoveKind::R2Remove:
        case MoveKind::R3: return a.face == b.face;
        case MoveKind::Slide:
            return a.face == b.face && a.half == b.half && a.layer == b.layer;
    }
    return false;
}

inline std::string format_move(const MoveSite& m) {
    std::ostringstream o;
    o << kind_token(m.kind);
    switch (m.kind) {
        case MoveKind::R1Insert:
            o << " edge=" << m.edge << " side=" << m.side << " over=" << m.over;
            break;
        case MoveKind::R1Remove:
        case MoveKind::R2Remove:
        case MoveKind::R3: o << " face=" << m.face; break;
        case MoveKind::R2Insert:
            o << " edge=" << m.edge << " over_edge=" << m.over_edge << " face=" << m.face;
            break;
        case MoveKind::Slide:
            o << " half=" << (m.half == HalfTag::Plus ? 'p' : 'm')
              << " layer=" << (m.layer == SlideLayer::Over ? 'o' : 'u') << " from=" << m.face;
            break;
    }
    return o.str();
}

inline MoveSite parse_move(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    if (!(in >> tok)) throw Error("parse_move: empty move");
    MoveSite m;
    if (tok == "r1+") m.kind = MoveKind::R1Insert;
    else if (tok == "r1-") m.kind = MoveKind::R1Remove;
    else if (tok == "r2+") m.kind = MoveKind::R2Insert;
    else if (tok == "r2-") m.kind = MoveKind::R2Remove;
    else if (tok == "r3") m.kind = MoveKind::R3;
    else if (tok == "slide") m.kind = MoveKind::Slide;
    else throw Error("parse_move: unknown move kind '" + tok + "'");

    std::map<std::string, std::string> kv;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.size())
            throw Error("parse_move: bad token '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto take_int = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(std::string("parse_move: missing ") + key);
        try {
            int v = std::stoi(it->second);
            kv.erase(it);
            return v;
        } catch (const std::exception&) {
            throw Error(std::string("parse_move: bad integer for ") + key);
        }
    };
    auto take_char = [&](const char* key, const char* allowed) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(std::string("parse_move: missing ") + key);
        std::string v = it->second;
        kv.erase(it);
        if (v.size() != 1 || std::string(allowed).find(v[0]) == std::string::npos)
            throw Error(std::string("parse_move: bad value for ") + key);
        return v[0];
    };
    switch (m.kind) {
        case MoveKind::R1Insert:
            m.edge = take_int("edge");
            m.side = take_char("side", "lr");
            m.over = take_int("over");
            if (m.over != 0 && m.over != 1) throw Error("parse_move: over must be 0 or 1");
            break;
        case MoveKind::R1Remove:
        case MoveKind::R2Remove:
        case MoveKind::R3: m.face = take_int("face"); break;
        case MoveKind::R2Insert:
            m.edge = take_int("edge");
            m.over_edge = take_int("over_edge");
            m.face = take_int("face");
            break;
        case MoveKind::Slide:
            m.half = take_char("half", "pm") == 'p' ? HalfTag::Plus : HalfTag::Minus;
            m.layer = take_char("layer", "ou") == 'o' ? SlideLayer::Over : SlideLayer::Under;
            m.face = take_int("from");
            break;
    }
    if (!kv.empty()) throw Error("parse_move: unexpected key '" + kv.begin()->first + "'");
    return m;
}

// ---------------------------------------------------------------------------
// Rulesets.

struct Ruleset {
    std::string name;
    // When set, removal-type moves may not dissolve an arc whose interior runs
    // through the critical point.  The classical system clears it and treats
    // the critical point as an ordinary degree-2 vertex (the vertex itself is
    // never deleted either way).
    bool restrict_o = true;
    std::vector<std::pair<HalfTag, SlideLayer>> slides;

    bool allows_slide(HalfTag t, SlideLayer l) const {
        for (const auto& s : slides)
            if (s.first == t && s.second == l) return true;
        return false;
    }

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n = {"classical", "star",  "opp1",
                                                   "opp2",      "same1", "same2"};
        return n;
    }

    static const Ruleset& by_name(const std::string& n) {
        using P = std::pair<HalfTag, SlideLayer>;
        static const std::map<std::string, Ruleset> all = {
            {"classical", Ruleset{"classical", false, {}}},
            {"star", Ruleset{"star", true, {}}},
            {"opp1", Ruleset{"opp1", true,
                             {P{HalfTag::Plus, SlideLayer::Over}, P{HalfTag::Minus, SlideLayer::Under}}}},
            {"opp2", Ruleset{"opp2", true,
                             {P{HalfTag::Plus, SlideLayer::Under}, P{HalfTag::Minus, SlideLayer::Over}}}},
            {"same1", Ruleset{"same1", true,
                              {P{HalfTag::Plus, SlideLayer::Under}, P{HalfTag::Minus, SlideLayer::Under}}}},
            {"same2", Ruleset{"same2", true,
                              {P{HalfTag::Plus, SlideLayer::Over}, P{HalfTag::Minus, SlideLayer::Over}}}},
        };
        auto it = all.find(n);
        if (it == all.end()) throw Error("unknown ruleset '" + n + "'");
        return it->second;
    }
};

// ---------------------------------------------------------------------------
// Face scanning: the per-face data move enumeration works from.

namespace movedetail {

struct FaceScan {
    int id = -1;
    // True when the face is bounded by diagram edges alone (no boundary-square
    // edges, hence no endpoint corners) and is not the outer face.  Only such
    // faces can be collapsed by removal-type moves.
    bool internal = false;
    std::vector<int> walk;       // half-edges in face-walk order
    std::vector<int> corner;     // corner[i] = vertex entered after walk[i] (internal only)
    std::vector<int> cross_pos;  // positions whose corner is a crossing
    std::vector<int> o_pos;      // positions whose corner is the critical point
    std::vector<int> edges;      // distinct diagram edges, first-occurrence order
};

struct Scan {
    detail::AugMap am;
    std::vector<int> hv;
    std::vector<FaceScan> faces;
};

inline Scan scan_faces(const Diagram& d) {
    Scan s{detail::build_augmap(d, HalfFilter::All), d.half_vertex_table(), {}};
    int nf = int(s.am.face_walks.size());
    s.faces.resize(nf);
    for (int f = 0; f < nf; ++f) {
        FaceScan& fs = s.faces[f];
        fs.id = f;
        fs.walk = s.am.face_walks[f];
        fs.internal = (f != s.am.outer_face);
        std::set<int> seen_edges;
        for (int h : fs.walk) {
            if (h >= s.am.n_diagram_halves) {
                fs.internal = false;
            } else if (seen_edges.insert(edge_of(h)).second) {
                fs.edges.push_back(edge_of(h));
            }
        }
        if (!fs.internal) continue;
        int n = int(fs.walk.size());
        fs.corner.resize(n);
        for (int i = 0; i < n; ++i) {
            int v = s.hv[twin(fs.walk[i])];
            fs.corner[i] = v;
            if (d.verts[v].kind == VertexKind::Crossing) fs.cross_pos.push_back(i);
            else if (d.verts[v].kind == VertexKind::CriticalO) fs.o_pos.push_back(i);
        }
    }
    return s;
}

// True when a corner strictly between walk positions pa and pb (exclusive,
// cyclically) is the critical point.
inline bool chain_interior_has_o(const Diagram& d, const FaceScan& fs, int pa, int pb) {
    int n = int(fs.walk.size());
    for (int i = (pa + 1) % n; i != pb; i = (i + 1) % n)
        if (d.verts[fs.corner[i]].kind == VertexKind::CriticalO) return true;
    return false;
}

// Edges of the boundary chain running from the crossing-corner at walk
// position pa to the one at pb (the halves at positions pa+1 .. pb, cyclically).
inline std::vector<int> chain_edges(const FaceScan& fs, int pa, int pb) {
    std::vector<int> out;
    int n = int(fs.walk.size());
    int i = (pa + 1) % n;
    while (true) {
        out.push_back(edge_of(fs.walk[i]));
        if (i == pb) break;
        i = (i + 1) % n;
    }
    return out;
}

inline std::pair<int, int> seat_of(const Diagram& d, int h) {
    for (int v = 0; v < int(d.verts.size()); ++v) {
        if (!d.verts[v].alive) continue;
        for (int i = 0; i < int(d.rot[v].size()); ++i)
            if (d.rot[v][i] == h) return {v, i};
    }
    throw Error("move engine: half-edge " + std::to_string(h) + " has no seat");
}

// Splits the edge under half h at a new vertex.  The piece containing h keeps
// the edge id; its far half twin(h) is displaced (the caller must seat it at
// the new vertex).  A fresh edge f covers the far piece: half 2f is for the
// caller to seat at the new vertex, half 2f+1 takes twin(h)'s old seat.
inline int split_along(Diagram& d, int h) {
    int e = edge_of(h);
    auto [w, i] = seat_of(d, twin(h));
    int f = d.add_edge_record(d.edges[e].tag);
    d.edges[f].comp_kind = d.edges[e].comp_kind;
    d.edges[f].comp_id = d.edges[e].comp_id;
    d.rot[w][i] = 2 * f + 1;
    return f;
}

// Deletes the crossings in `dead`, welding the strands that ran through them.
// Each glue pair names two halves seated at dead crossings whose edges become
// one continuous arc.  Every half seated at a dead crossing must appear in
// exactly one pair.  Chains of welded edges that retain live attachments merge
// into the edge at one end; chains that close up entirely among dead crossings
// become standalone circles anchored at a fresh degree-2 vertex.
inline void rewire(Diagram& d, const std::vector<int>& dead,
                   const std::vector<std::pair<int, int>>& glues) {
    std::map<int, int> partner;
    for (const auto& g : glues) {
        partner[g.first] = g.second;
        partner[g.second] = g.first;
    }
    std::set<int> used;
    std::vector<int> kill;
    // Follows welded edges starting from glue half `start`, collecting edge
    // ids until a live attachment half is reached (returned), or the walk
    // closes on its start (-1: a circle).
    auto walkdir = [&](int start, std::vector<int>& edges_out) -> int {
        int cur = start;
        while (true) {
            used.insert(cur);
            edges_out.push_back(edge_of(cur));
            int t = twin(cur);
            auto it = partner.find(t);
            if (it == partner.end()) return t;
            used.insert(t);
            cur = it->second;
            if (cur == start) return -1;
        }
    };
    for (const auto& g : glues) {
        if (used.count(g.first)) continue;
        std::vector<int> edges1, edges2;
        int end_a = walkdir(g.first, edges1);
        if (end_a < 0) {
            int keep = edges1.front();
            int joint = d.add_joint();
            d.rot[joint] = {2 * keep, 2 * keep + 1};
            for (std::size_t i = 1; i < edges1.size(); ++i) kill.push_back(edges1[i]);
            continue;
        }
        int end_b = walkdir(g.second, edges2);
        if (end_b < 0) throw Error("move engine: one-ended weld chain");
        int keep = edges1.back();  // the edge holding end_a
        auto [w, i] = seat_of(d, end_b);
        d.rot[w][i] = twin(end_a);
        for (int e : edges1)
            if (e != keep) kill.push_back(e);
        for (int e : edges2)
            if (e != keep) kill.push_back(e);
    }
    for (int v : dead) {
        d.rot[v].clear();
        d.verts[v].alive = false;
    }
    for (int e : kill) d.edges[e].alive = false;
}

// Structural analysis of a candidate slide source face.
struct SlideShape {
    bool ok = false;
    int c1 = -1, c2 = -1;  // the two leg crossings, in walk order after the critical corner
    int q1 = -1, q2 = -1;  // their walk positions
    int a1 = -1, a2 = -1;  // arrival seats at c1 and c2
    HalfTag half = HalfTag::None;
    SlideLayer layer = SlideLayer::Over;
};

inline SlideShape slide_shape(const Diagram& d, const FaceScan& fs) {
    SlideShape sh;
    if (!fs.internal || fs.o_pos.size() != 1 || fs.cross_pos.size() != 2) return sh;
    int n = int(fs.walk.size());
    int io = fs.o_pos[0];
    // The two crossing corners in cyclic order after the critical corner.
    int q1 = -1, q2 = -1;
    for (int i = (io + 1) % n; i != io; i = (i + 1) % n) {
        if (d.verts[fs.corner[i]].kind != VertexKind::Crossing) continue;
        (q1 < 0 ? q1 : q2) = i;
    }
    sh.q1 = q1;
    sh.q2 = q2;
    sh.c1 = fs.corner[q1];
    sh.c2 = fs.corner[q2];
    if (sh.c1 == sh.c2) return sh;
    sh.a1 = d.rot_index_of(sh.c1, twin(fs.walk[q1]));
    sh.a2 = d.rot_index_of(sh.c2, twin(fs.walk[q2]));
    // The sliding arc is the chain from c1 to c2; it must keep one layer.
    int b1 = (sh.a1 + 3) % 4;
    bool over1 = (b1 % 2) == d.verts[sh.c1].over_parity;
    bool over2 = (sh.a2 % 2) == d.verts[sh.c2].over_parity;
    if (over1 != over2) return sh;
    sh.layer = over1 ? SlideLayer::Over : SlideLayer::Under;
    sh.half = d.edges[edge_of(fs.walk[(q1 + 1) % n])].tag;
    if (sh.half == HalfTag::None) return sh;
    sh.ok = true;
    return sh;
}

// Swapping the two leg attachments at each crossing carries the chain through
// the critical point across the arc; the arc's own seats (and hence both
// over-parities) are untouched.  Whether the flip is actually drawable
// depends on how the arc winds around the critical point, so callers must
// validate the result: a shape whose flip breaks planarity is not a slide
// site at all.
inline Diagram slide_result(const Diagram& d, const SlideShape& sh) {
    Diagram r = d;
    std::swap(r.rot[sh.c1][sh.a1], r.rot[sh.c1][(sh.a1 + 2) % 4]);
    std::swap(r.rot[sh.c2][(sh.a2 + 3) % 4], r.rot[sh.c2][(sh.a2 + 1) % 4]);
    return r;
}

}  // namespace movedetail

// ---------------------------------------------------------------------------
// Enumeration.

inline std::vector<MoveSite> enumerate_moves(const Diagram& d, const Ruleset& rs,
                                             const movedetail::Scan& s) {
    std::vector<MoveSite> out;

    // Curl insertions: every edge, both sides, both parities.
    for (int e = 0; e < int(d.edges.size()); ++e) {
        if (!d.edges[e].alive) continue;
        for (char side : {'l', 'r'})
            for (int over : {0, 1}) {
                MoveSite m;
                m.kind = MoveKind::R1Insert;
                m.edge = e;
                m.side = side;
                m.over = over;
                out.push_back(m);
            }
    }

    // Curl removals: internal faces with exactly one crossing corner.
    for (const auto& fs : s.faces) {
        if (!fs.internal || fs.cross_pos.size() != 1) continue;
        int p = fs.cross_pos[0];
        if (rs.restrict_o && movedetail::chain_interior_has_o(d, fs, p, p)) continue;
        MoveSite m;
        m.kind = MoveKind::R1Remove;
        m.face = fs.id;
        out.push_back(m);
    }

    // Finger insertions: ordered pairs of distinct edges bordering a common face.
    {
        std::vector<MoveSite> r2;
        for (const auto& fs : s.faces) {
            for (std::size_t i = 0; i < fs.edges.size(); ++i)
                for (std::size_t j = 0; j < fs.edges.size(); ++j) {
                    if (i == j) continue;
                    MoveSite m;
                    m.kind = MoveKind::R2Insert;
                    m.edge = fs.edges[i];
                    m.over_edge = fs.edges[j];
                    m.face = fs.id;
                    r2.push_back(m);
                }
        }
        std::sort(r2.begin(), r2.end(), [](const MoveSite& a, const MoveSite& b) {
            return std::tuple(a.edge, a.over_edge, a.face) < std::tuple(b.edge, b.over_edge, b.face);
        });
        out.insert(out.end(), r2.begin(), r2.end());
    }

    // Finger removals: internal faces with exactly two distinct crossing
    // corners whose two boundary chains each keep one layer.
    for (const auto& fs : s.faces) {
        if (!fs.internal || fs.cross_pos.size() != 2) continue;
        int p0 = fs.cross_pos[0], p1 = fs.cross_pos[1];
        int x1 = fs.corner[p0], x2 = fs.corner[p1];
        if (x1 == x2) continue;
        int a1 = d.rot_index_of(x1, twin(fs.walk[p0]));
        int a2 = d.rot_index_of(x2, twin(fs.walk[p1]));
        bool over_u1 = (((a1 + 3) % 4) % 2) == d.verts[x1].over_parity;
        bool over_u2 = (a2 % 2) == d.verts[x2].over_parity;
        if (over_u1 != over_u2) continue;
        if (rs.restrict_o && (movedetail::chain_interior_has_o(d, fs, p0, p1) ||
                              movedetail::chain_interior_has_o(d, fs, p1, p0)))
            continue;
        MoveSite m;
        m.kind = MoveKind::R2Remove;
        m.face = fs.id;
        out.push_back(m);
    }

    // Triangle flips: internal trigons with three distinct crossing corners,
    // pairwise edge-disjoint sides, and a strand keeping one layer on its side.
    for (const auto& fs : s.faces) {
        if (!fs.internal || fs.cross_pos.size() != 3) continue;
        int p[3] = {fs.cross_pos[0], fs.cross_pos[1], fs.cross_pos[2]};
        int k[3] = {fs.corner[p[0]], fs.corner[p[1]], fs.corner[p[2]]};
        if (k[0] == k[1] || k[1] == k[2] || k[0] == k[2]) continue;
        std::vector<int> ce[3];
        bool degenerate = false;
        for (int i = 0; i < 3; ++i) ce[i] = movedetail::chain_edges(fs, p[i], p[(i + 1) % 3]);
        for (int i = 0; i < 3 && !degenerate; ++i)
            for (int e : ce[i])
                for (int j = i + 1; j < 3 && !degenerate; ++j)
                    if (std::find(ce[j].begin(), ce[j].end(), e) != ce[j].end()) degenerate = true;
        if (degenerate) continue;
        bool movable = false;
        for (int i = 0; i < 3; ++i) {
            int ki = k[i], kn = k[(i + 1) % 3];
            int ai = d.rot_index_of(ki, twin(fs.walk[p[i]]));
            int an = d.rot_index_of(kn, twin(fs.walk[p[(i + 1) % 3]]));
            bool over_leave = (((ai + 3) % 4) % 2) == d.verts[ki].over_parity;
            bool over_arrive = (an % 2) == d.verts[kn].over_parity;
            if (over_leave == over_arrive) movable = true;
        }
        if (!movable) continue;
        if (rs.restrict_o &&
            (movedetail::chain_interior_has_o(d, fs, p[0], p[1]) ||
             movedetail::chain_interior_has_o(d, fs, p[1], p[2]) ||
             movedetail::chain_interior_has_o(d, fs, p[2], p[0])))
            continue;
        MoveSite m;
        m.kind = MoveKind::R3;
        m.face = fs.id;
        out.push_back(m);
    }

    // Slides: the two corner faces at the critical point.
    if (!rs.slides.empty()) {
        int o = d.find_o();
        if (o >= 0 && d.rot[o].size() == 2) {
            int f0 = s.am.face_of_half[d.rot[o][0]];
            int f1 = s.am.face_of_half[d.rot[o][1]];
            if (f0 != f1) {
                std::vector<std::pair<int, int>> cand = {{f0, f1}, {f1, f0}};
                std::sort(cand.begin(), cand.end());
                for (auto [src, dst] : cand) {
                    auto sh = movedetail::slide_shape(d, s.faces[src]);
                    if (!sh.ok || !rs.allows_slide(sh.half, sh.layer)) continue;
                    if (!validate(movedetail::slide_result(d, sh)).ok()) continue;
                    MoveSite m;
                    m.kind = MoveKind::Slide;
                    m.face = src;
                    m.to_face = dst;
                    m.half = sh.half;
                    m.layer = sh.layer;
                    out.push_back(m);
                }
            }
        }
    }
    return out;
}

inline std::vector<MoveSite> enumerate_moves(const Diagram& d, const Ruleset& rs) {
    auto s = movedetail::scan_faces(d);
    return enumerate_moves(d, rs, s);
}

// ---------------------------------------------------------------------------
// Application.

namespace movedetail {

inline Diagram apply_r1_insert(const Diagram& d, int e, char side, int over) {
    Diagram r = d;
    int x = r.add_crossing(over);
    int f = split_along(r, 2 * e);
    int loop = r.add_edge_record(r.edges[e].tag);
    r.edges[loop].comp_kind = r.edges[e].comp_kind;
    r.edges[loop].comp_id = r.edges[e].comp_id;
    if (side == 'r')
        r.rot[x] = {2 * e + 1, 2 * loop, 2 * loop + 1, 2 * f};
    else
        r.rot[x] = {2 * e + 1, 2 * f, 2 * loop, 2 * loop + 1};
    relabel_components(r);
    require_valid(r, "r1+");
    return r;
}

inline Diagram apply_r1_remove(const Diagram& d, const FaceScan& fs) {
    int n = int(fs.walk.size());
    int p = fs.cross_pos[0];
    int x = fs.corner[p];
    int a = d.rot_index_of(x, twin(fs.walk[p]));
    if (d.rot[x][(a + 3) % 4] != fs.walk[(p + 1) % n])
        throw Error("r1-: face walk does not leave one slot clockwise of its arrival");
    Diagram r = d;
    std::vector<int> occ = d.rot[x];
    rewire(r, {x},
           {{occ[(a + 2) % 4], occ[a]}, {occ[(a + 3) % 4], occ[(a + 1) % 4]}});
    r = compact(r);
    relabel_components(r);
    require_valid(r, "r1-");
    return r;
}

inline Diagram apply_r2_insert(const Diagram& d, const FaceScan& fs, int u, int oe) {
    int h_u = -1, h_o = -1;
    for (int h : fs.walk) {
        if (h >= 2 * int(d.edges.size())) continue;
        if (h_u < 0 && edge_of(h) == u) h_u = h;
        if (h_o < 0 && edge_of(h) == oe) h_o = h;
    }
    if (h_u < 0 || h_o < 0) throw Error("r2+: edges do not border the face");
    Diagram r = d;
    int x1 = r.add_crossing(1);
    int x2 = r.add_crossing(1);
    int f1 = split_along(r, h_u);
    int f2 = split_along(r, 2 * f1);
    int g1 = split_along(r, h_o);
    int g2 = split_along(r, 2 * g1);
    r.rot[x1] = {twin(h_u), 2 * g1 + 1, 2 * f1, 2 * g2};
    r.rot[x2] = {2 * f2, twin(h_o), 2 * f1 + 1, 2 * g1};
    relabel_components(r);
    require_valid(r, "r2+");
    return r;
}

inline Diagram apply_r2_remove(const Diagram& d, const FaceScan& fs) {
    int x1 = fs.corner[fs.cross_pos[0]];
    int x2 = fs.corner[fs.cross_pos[1]];
    Diagram r = d;
    std::vector<int> o1 = d.rot[x1], o2 = d.rot[x2];
    rewire(r, {x1, x2}, {{o1[0], o1[2]}, {o1[1], o1[3]}, {o2[0], o2[2]}, {o2[1], o2[3]}});
    r = compact(r);
    relabel_components(r);
    require_valid(r, "r2-");
    return r;
}

inline Diagram apply_r3(const Diagram& d, const FaceScan& fs) {
    int n = int(fs.walk.size());
    int p[3] = {fs.cross_pos[0], fs.cross_pos[1], fs.cross_pos[2]};
    int k[3], a[3], b[3];
    for (int i = 0; i < 3; ++i) {
        k[i] = fs.corner[p[i]];
        a[i] = d.rot_index_of(k[i], twin(fs.walk[p[i]]));
        b[i] = (a[i] + 3) % 4;
        if (d.rot[k[i]][b[i]] != fs.walk[(p[i] + 1) % n])
            throw Error("r3: face walk does not leave one slot clockwise of its arrival");
    }
    // Halves around the triangle: cs/cX = the side chains' end halves, A/B =
    // the outer stubs of the strands arriving at / leaving each old crossing.
    auto occ = [&](int i, int slot) { return d.rot[k[i]][slot % 4]; };
    int c1s = occ(0, b[0]), c2s = occ(1, b[1]), c3s = occ(2, b[2]);
    int c1e = occ(1, a[1]), c2e = occ(2, a[2]), c3e = occ(0, a[0]);
    int A1 = occ(0, a[0] + 2), A2 = occ(1, a[1] + 2), A3 = occ(2, a[2] + 2);
    int B1 = occ(0, b[0] + 2), B2 = occ(1, b[1] + 2), B3 = occ(2, b[2] + 2);
    // Layer of the strand pair met at each new crossing, inherited from the
    // old crossing of the same pair.
    bool s1_over_k1 = (b[0] % 2) == d.verts[k[0]].over_parity;
    bool s1_over_k2 = (a[1] % 2) == d.verts[k[1]].over_parity;
    bool s2_over_k3 = (a[2] % 2) == d.verts[k[2]].over_parity;
    Diagram r = d;
    int n1 = r.add_crossing(s1_over_k1 ? 0 : 1);
    int n2 = r.add_crossing(s1_over_k2 ? 0 : 1);
    int n3 = r.add_crossing(s2_over_k3 ? 1 : 0);
    r.rot[n1] = {c1e, c3e, A2, B3};
    r.rot[n2] = {B1, c2e, c1s, A3};
    r.rot[n3] = {A1, B2, c3s, c2s};
    for (int i = 0; i < 3; ++i) {
        r.rot[k[i]].clear();
        r.verts[k[i]].alive = false;
    }
    r = compact(r);
    relabel_components(r);
    require_valid(r, "r3");
    return r;
}

inline Diagram apply_slide(const Diagram& d, const FaceScan& fs) {
    auto sh = slide_shape(d, fs);
    if (!sh.ok) throw Error("slide: face is not a slide corner");
    Diagram r = slide_result(d, sh);
    relabel_components(r);
    require_valid(r, "slide");
    return r;
}

inline Diagram apply_site(const Diagram& d, const Scan& s, const MoveSite& m) {
    switch (m.kind) {
        case MoveKind::R1Insert: return apply_r1_insert(d, m.edge, m.side, m.over);
        case MoveKind::R1Remove: return apply_r1_remove(d, s.faces[m.face]);
        case MoveKind::R2Insert: return apply_r2_insert(d, s.faces[m.face], m.edge, m.over_edge);
        case MoveKind::R2Remove: return apply_r2_remove(d, s.faces[m.face]);
        case MoveKind::R3: return apply_r3(d, s.faces[m.face]);
        case MoveKind::Slide: return apply_slide(d, s.faces[m.face]);
    }
    throw Error("apply_move: bad move kind");
}

}  // namespace movedetail

inline Diagram apply_move(const Diagram& d, const MoveSite& m, const Ruleset& rs) {
    auto s = movedetail::scan_faces(d);
    auto sites = enumerate_moves(d, rs, s);
    for (const auto& cand : sites)
        if (same_site(cand, m)) return movedetail::apply_site(d, s, cand);
    throw Error("apply_move: no such site under ruleset '" + rs.name + "': " + format_move(m));
}

inline Diagram apply_move(const Diagram& d, const std::string& spec, const Ruleset& rs) {
    return apply_move(d, parse_move(spec), rs);
}

// ---------------------------------------------------------------------------
// Random walks and traces.

struct WalkWeights {
    double r1_insert = 1, r1_remove = 1, r2_insert = 1, r2_remove = 1, r3 = 1, slide = 1;
    double of(MoveKind k) const {
        switch (k) {
            case MoveKind::R1Insert: return r1_insert;
            case MoveKind::R1Remove: return r1_remove;
            case MoveKind::R2Insert: return r2_insert;
            case MoveKind::R2Remove: return r2_remove;
            case MoveKind::R3: return r3;
            case MoveKind::Slide: return slide;
        }
        return 0;
    }
};

struct TraceStep {
    bool noop = false;
    MoveSite site{};
    std::uint64_t hash = 0;
};

struct MoveTrace {
    Diagram seed;
    std::string ruleset;
    std::uint64_t rng_seed = 0;
    int max_crossings = 0;
    std::vector<TraceStep> steps;
};

// Performs n_steps weighted random moves starting from d0.  Sites that would
// push the crossing count above max_crossings are never chosen.  A step with
// no eligible site is recorded as a no-op.  The walk is a deterministic
// function of (d0, n_steps, seed, ruleset, weights, max_crossings).
inline MoveTrace random_walk(const Diagram& d0, int n_steps, std::uint64_t seed,
                             const Ruleset& rs, const WalkWeights& w = {},
                             int max_crossings = 18) {
    MoveTrace tr{d0, rs.name, seed, max_crossings, {}};
    std::mt19937_64 rng(seed);
    Diagram cur = d0;
    for (int step = 0; step < n_steps; ++step) {
        auto scan = movedetail::scan_faces(cur);
        auto sites = enumerate_moves(cur, rs, scan);
        int nx = crossing_count(cur);
        std::vector<double> cum;
        std::vector<const MoveSite*> pick;
        double total = 0;
        for (const auto& m : sites) {
            if (nx + crossing_delta(m.kind) > max_crossings) continue;
            double wt = w.of(m.kind);
            if (wt <= 0) continue;
            total += wt;
            cum.push_back(total);
            pick.push_back(&m);
        }
        if (pick.empty()) {
            tr.steps.push_back({true, {}, diagram_hash(cur)});
            continue;
        }
        // Uniform double in [0, total) from the top 53 bits of one draw.
        double r = double(rng() >> 11) * (1.0 / 9007199254740992.0) * total;
        std::size_t idx = std::lower_bound(cum.begin(), cum.end(), r,
                                           [](double c, double v) { return c <= v; }) -
                          cum.begin();
        if (idx >= pick.size()) idx = pick.size() - 1;
        cur = movedetail::apply_site(cur, scan, *pick[idx]);
        tr.steps.push_back({false, *pick[idx], diagram_hash(cur)});
    }
    return tr;
}

// Re-applies a trace from its seed, checking the recorded hash after every
// step.  Returns false (with a reason) on the first divergence.
inline bool replay_trace(const MoveTrace& tr, std::string* why = nullptr) {
    const Ruleset& rs = Ruleset::by_name(tr.ruleset);
    Diagram cur = tr.seed;
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const TraceStep& st = tr.steps[i];
        if (!st.noop) {
            try {
                cur = apply_move(cur, st.site, rs);
            } catch (const Error& e) {
                if (why) *why = "step " + std::to_string(i) + ": " + e.what();
                return false;
            }
        }
        if (diagram_hash(cur) != st.hash) {
            if (why) *why = "step " + std::to_string(i) + ": hash mismatch";
            return false;
        }
    }
    return true;
}

inline std::string write_trace(const MoveTrace& tr) {
    std::ostringstream o;
    o << emit(tr.seed);
    o << "ruleset " << tr.ruleset << "\n";
    o << "rng " << tr.rng_seed << "\n";
    o << "cap " << tr.max_crossings << "\n";
    for (const auto& st : tr.steps) {
        o << "step " << (st.noop ? std::string("noop") : format_move(st.site))
          << " hash=" << hash_hex(st.hash) << "\n";
    }
    return o.str();
}

inline MoveTrace parse_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line, tdf_text;
    std::vector<std::string> rest;
    bool in_tdf = true;
    while (std::getline(in, line)) {
        if (in_tdf && (line.rfind("ruleset ", 0) == 0 || line.rfind("rng ", 0) == 0 ||
                       line.rfind("cap ", 0) == 0 || line.rfind("step ", 0) == 0))
            in_tdf = false;
        if (in_tdf)
            tdf_text += line + "\n";
        else
            rest.push_back(line);
    }
    MoveTrace tr;
    tr.seed = parse(tdf_text);
    tr.max_crossings = 18;
    bool have_ruleset = false;
    for (const auto& l : rest) {
        if (l.empty() || l[0] == '#') continue;
        std::istringstream ls(l);
        std::string key;
        ls >> key;
        if (key == "ruleset") {
            ls >> tr.ruleset;
            Ruleset::by_name(tr.ruleset);  // validates
            have_ruleset = true;
        } else if (key == "rng") {
            ls >> tr.rng_seed;
        } else if (key == "cap") {
            ls >> tr.max_crossings;
        } else if (key == "step") {
            std::string body;
            std::getline(ls, body);
            auto hp = body.rfind(" hash=");
            if (hp == std::string::npos) throw Error("parse_trace: step without hash");
            std::string mv = body.substr(1, hp - 1);
            std::string hex = body.substr(hp + 6);
            if (hex.size() != 16 || hex.find_first_not_of("0123456789abcdef") != std::string::npos)
                throw Error("parse_trace: bad hash '" + hex + "'");
            TraceStep st;
            st.hash = std::stoull(hex, nullptr, 16);
            if (mv == "noop")
                st.noop = true;
            else
                st.site = parse_move(mv);
            tr.steps.push_back(st);
        } else {
            throw Error("parse_trace: unknown line '" + l + "'");
        }
    }
    if (!have_ruleset) throw Error("parse_trace: missing ruleset line");
    return tr;
}

}  // namespace tangle
