#pragma once
// Kauffman bracket / writhe plumbing: an independent regression oracle for the
// move engine.  Everything here works on *closed* diagrams (no endpoints); the
// closure() helper turns a knot-shaped tangle into one.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tangle/core.hpp"

namespace tangle {

// ---------------------------------------------------------------------------
// Laurent polynomials in A with exact integer coefficients.

struct LaurentPoly {
    // exponent -> coefficient; zero coefficients are never stored.
    std::map<int, long long> c;

    static LaurentPoly zero() { return {}; }
    static LaurentPoly one() { return monomial(0, 1); }
    static LaurentPoly monomial(int exp, long long coeff) {
        LaurentPoly p;
        if (coeff != 0) p.c[exp] = coeff;
        return p;
    }

    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c.count(0) && c.at(0) == 1; }

    void add_term(int exp, long long coeff) {
        if (coeff == 0) return;
        auto it = c.find(exp);
        if (it == c.end()) {
            c.emplace(exp, coeff);
        } else {
            it->second += coeff;
            if (it->second == 0) c.erase(it);
        }
    }

    LaurentPoly& operator+=(const LaurentPoly& o) {
        for (auto& [e, k] : o.c) add_term(e, k);
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
        a += b;
        return a;
    }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly r;
        for (auto& [ea, ka] : a.c)
            for (auto& [eb, kb] : b.c) r.add_term(ea + eb, ka * kb);
        return r;
    }

    // Substitute A -> A^{-1}.
    LaurentPoly reciprocal() const {
        LaurentPoly r;
        for (auto& [e, k] : c) r.c[-e] = k;
        return r;
    }

    bool operator==(const LaurentPoly& o) const { return c == o.c; }
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    // Terms as "c A^e", ascending exponent, joined by " + "; "0" when empty.
    std::string to_string() const {
        if (c.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [e, k] : c) {
            if (!first) os << " + ";
            first = false;
            os << k << " A^" << e;
        }
        return os.str();
    }
};

inline bool is_closed(const Diagram& d) {
    for (const auto& v : d.verts)
        if (v.alive && v.kind == VertexKind::Endpoint) return false;
    return true;
}

// ---------------------------------------------------------------------------
// closure: join the o+ endpoint to the o- endpoint by a crossing-free arc
// through the outer face.  Combinatorially the two endpoint vertices become
// joints linked by one fresh edge; the strand becomes a loop.

inline Diagram closure(const Diagram& k) {
    require_valid(k, "closure");
    std::vector<int> eps = k.endpoints_ccw();
    if (eps.empty()) throw Error("closure: diagram is already closed");
    if (eps.size() != 2) throw Error("closure: expected exactly two endpoints");
    int top = -1, bot = -1;
    for (int v : eps) {
        if (k.verts[v].side == Side::Hp && k.verts[v].rank == 0) top = v;
        if (k.verts[v].side == Side::Hm && k.verts[v].rank == 0) bot = v;
    }
    if (top < 0 || bot < 0)
        throw Error("closure: endpoints must be the (Hp,0)/(Hm,0) pair");

    Diagram d = k;
    d.verts[top].kind = VertexKind::Joint;
    d.verts[bot].kind = VertexKind::Joint;
    int e = d.add_edge_record(HalfTag::None);
    d.rot[top].push_back(2 * e);
    d.rot[bot].push_back(2 * e + 1);
    // Half tags describe the subdivision of the open tangle; the closed
    // diagram has no boundary, so they are dropped.
    for (auto& ed : d.edges) ed.tag = HalfTag::None;
    relabel_components(d);  // the strand is now one loop
    require_valid(d, "closure");
    return d;
}

// ---------------------------------------------------------------------------
// State-sum machinery.

namespace detail {

// Port wiring of a closed diagram: crossing c exposes ports 4c+s (s = rot
// slot); mate[p] is the port reached by travelling the arc leaving p through
// any degree-2 vertices.  Loops that meet no crossing are tallied separately.
struct ClosedWiring {
    int nx = 0;
    std::vector<int> parity;  // over-slot parity per crossing
    std::vector<int> mate;    // size 4*nx, an involution
    int extra_loops = 0;      // crossing-free closed components
};

inline ClosedWiring closed_wiring(const Diagram& d) {
    if (!is_closed(d)) throw Error("bracket: diagram is not closed");
    ClosedWiring w;
    std::vector<int> xidx(d.verts.size(), -1);
    for (int v = 0; v < (int)d.verts.size(); ++v)
        if (d.verts[v].alive && d.verts[v].kind == VertexKind::Crossing) {
            xidx[v] = w.nx++;
            w.parity.push_back(d.verts[v].over_parity);
        }
    w.mate.assign(4 * w.nx, -1);
    auto hv = d.half_vertex_table();
    for (int v = 0; v < (int)d.verts.size(); ++v) {
        if (xidx[v] < 0) continue;
        for (int s = 0; s < 4; ++s) {
            int h = d.rot[v][s];
            int cur = twin(h);
            int wv = hv[cur];
            while (xidx[wv] < 0) {
                int nxt = walk_through(d, wv, cur);
                if (nxt < 0) throw Error("bracket: dangling arc");
                cur = twin(nxt);
                wv = hv[cur];
            }
            w.mate[4 * xidx[v] + s] = 4 * xidx[wv] + d.rot_index_of(wv, cur);
        }
    }
    for (const auto& comp : components(d)) {
        bool meets_crossing = false;
        for (int h : comp.halves)
            if (xidx[hv[h]] >= 0 || xidx[hv[twin(h)]] >= 0) {
                meets_crossing = true;
                break;
            }
        if (!meets_crossing) ++w.extra_loops;
    }
    return w;
}

}  // namespace detail

constexpr int kBracketBudget = 20;

// Kauffman bracket by full state expansion: loop value (-A^2 - A^-2),
// empty diagram 1.  Throws above the crossing budget (the sum is 2^chi).
inline LaurentPoly bracket(const Diagram& d) {
    detail::ClosedWiring w = detail::closed_wiring(d);
    if (w.nx > kBracketBudget) throw Error("bracket: crossing budget exceeded");

    // delta^m for m up to the max possible loop count.
    int maxloops = w.nx + 1 + w.extra_loops;
    LaurentPoly delta;
    delta.add_term(2, -1);
    delta.add_term(-2, -1);
    std::vector<LaurentPoly> dpow(maxloops + 1);
    dpow[0] = LaurentPoly::one();
    for (int m = 1; m <= maxloops; ++m) dpow[m] = dpow[m - 1] * delta;

    if (w.nx == 0) {
        int loops = w.extra_loops;
        return loops == 0 ? LaurentPoly::one() : dpow[loops - 1];
    }

    // tally[b][l]: states with b B-smoothings and l cycles through crossings.
    std::vector<std::vector<long long>> tally(
        w.nx + 1, std::vector<long long>(w.nx + 2, 0));
    int np = 4 * w.nx;
    std::vector<int> pair_to(np), seen(np);
    int stamp = 0;
    for (std::uint32_t mask = 0; mask < (1u << w.nx); ++mask) {
        for (int c = 0; c < w.nx; ++c) {
            int s = (w.parity[c] + ((mask >> c) & 1)) & 3;
            int a = 4 * c + s, b = 4 * c + ((s + 1) & 3);
            int a2 = 4 * c + ((s + 2) & 3), b2 = 4 * c + ((s + 3) & 3);
            pair_to[a] = b;
            pair_to[b] = a;
            pair_to[a2] = b2;
            pair_to[b2] = a2;
        }
        ++stamp;
        int loops = 0;
        for (int p0 = 0; p0 < np; ++p0) {
            if (seen[p0] == stamp) continue;
            ++loops;
            int p = p0;
            do {
                seen[p] = stamp;
                int q = pair_to[p];
                seen[q] = stamp;
                p = w.mate[q];
            } while (p != p0);
        }
        ++tally[__builtin_popcount(mask)][loops];
    }

    LaurentPoly out;
    for (int b = 0; b <= w.nx; ++b)
        for (int l = 1; l <= w.nx + 1; ++l) {
            if (tally[b][l] == 0) continue;
            int shift = w.nx - 2 * b;  // A^{#A - #B}
            const LaurentPoly& dp = dpow[l - 1 + w.extra_loops];
            for (auto& [e, k] : dp.c) out.add_term(e + shift, k * tally[b][l]);
        }
    return out;
}

// Writhe of a closed knot diagram (single loop through every crossing).  The
// sign convention is anchored by the positive-kink value: a crossing is +1
// exactly when the under-strand entry slot is the over-strand entry slot + 3
// (mod 4) along the traversal.  Signs are reversal-invariant, so the loop
// orientation chosen by components() realizes the intrinsic one.
inline int writhe(const Diagram& d) {
    if (!is_closed(d)) throw Error("writhe: diagram is not closed");
    auto comps = components(d);
    auto hv = d.half_vertex_table();
    // entry slots per crossing, in traversal order
    std::vector<std::vector<int>> entries(d.verts.size());
    for (const auto& comp : comps)
        for (int h : comp.halves) {
            int v = hv[twin(h)];
            if (d.verts[v].kind == VertexKind::Crossing)
                entries[v].push_back(d.rot_index_of(v, twin(h)));
        }
    int wsum = 0;
    for (int v = 0; v < (int)d.verts.size(); ++v) {
        if (!d.verts[v].alive || d.verts[v].kind != VertexKind::Crossing)
            continue;
        if (entries[v].size() != 2)
            throw Error("writhe: crossing not traversed exactly twice");
        int p = d.verts[v].over_parity;
        int a = entries[v][0], b = entries[v][1];
        int over = (a & 1) == (p & 1) ? a : b;
        int under = over == a ? b : a;
        if ((over & 1) != (p & 1) || (under & 1) == (p & 1))
            throw Error("writhe: entry slots do not split over/under");
        wsum += (under == (over + 3) % 4) ? 1 : -1;
    }
    // a knot: exactly one component overall
    if (comps.size() != 1) throw Error("writhe: diagram is not a single loop");
    return wsum;
}

// normalized = (-A^3)^(-writhe) * bracket
inline LaurentPoly normalized(const Diagram& d) {
    int w = writhe(d);
    LaurentPoly b = bracket(d);
    long long sgn = (w % 2 == 0) ? 1 : -1;
    LaurentPoly out;
    for (auto& [e, k] : b.c) out.add_term(e - 3 * w, sgn * k);
    return out;
}

inline LaurentPoly normalized_closure(const Diagram& k) {
    return normalized(closure(k));
}

}  // namespace tangle
