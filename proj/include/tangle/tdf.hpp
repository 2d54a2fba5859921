#pragma once

// TDF: a plain-text serialization of tangle diagrams.
//
//   tdf 1
//   vertex <id> crossing over=<slotA>,<slotB>
//   vertex <id> endpoint side=<Hp|Vm|Hm|Vp> rank=<int>
//   vertex <id> o
//   vertex <id> joint
//   rot <id> <half-edge ids, counterclockwise>
//   edge <id> <half1> <half2> comp=<strand|loop>:<compId>[:plus|minus]
//
// '#' starts a comment. The empty diagram is just the header line.
// Emitting a diagram always produces dense ids; parsing accepts arbitrary
// distinct ids and renumbers them, preserving numeric order.

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace tangle {

inline std::string emit(const Diagram& d0) {
    Diagram d = compact(d0);
    std::ostringstream out;
    out << "tdf 1\n";
    for (int v = 0; v < int(d.verts.size()); ++v) {
        const Vertex& vx = d.verts[v];
        out << "vertex " << v << ' ';
        switch (vx.kind) {
            case VertexKind::Crossing:
                out << "crossing over=" << vx.over_parity << ',' << vx.over_parity + 2;
                break;
            case VertexKind::Endpoint:
                out << "endpoint side=" << side_name(vx.side) << " rank=" << vx.rank;
                break;
            case VertexKind::CriticalO:
                out << "o";
                break;
            case VertexKind::Joint:
                out << "joint";
                break;
        }
        out << '\n';
    }
    for (int v = 0; v < int(d.verts.size()); ++v) {
        out << "rot " << v;
        for (int h : d.rot[v]) out << ' ' << h;
        out << '\n';
    }
    for (int e = 0; e < int(d.edges.size()); ++e) {
        const Edge& ed = d.edges[e];
        out << "edge " << e << ' ' << 2 * e << ' ' << 2 * e + 1 << " comp="
            << (ed.comp_kind == CompKind::Strand ? "strand" : "loop") << ':' << ed.comp_id;
        if (ed.tag == HalfTag::Plus) out << ":plus";
        if (ed.tag == HalfTag::Minus) out << ":minus";
        out << '\n';
    }
    return out.str();
}

namespace detail {

struct TdfVertexLine {
    long long id;
    Vertex v;
};
struct TdfRotLine {
    long long id;
    std::vector<long long> halves;
    int line_no;
};
struct TdfEdgeLine {
    long long id;
    long long h1, h2;
    Edge e;
    int line_no;
};

inline std::vector<std::string> tdf_tokens(const std::string& line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : line) {
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) toks.push_back(cur), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

inline long long tdf_int(const std::string& s, int line_no, const char* what) {
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (...) {
        pos = 0;
    }
    if (pos != s.size())
        throw Error("line " + std::to_string(line_no) + ": expected integer for " + what +
                    ", got '" + s + "'");
    return v;
}

inline std::vector<std::string> tdf_split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace detail

inline Diagram parse(const std::string& text) {
    using namespace detail;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<TdfVertexLine> vlines;
    std::vector<TdfRotLine> rlines;
    std::vector<TdfEdgeLine> elines;

    while (std::getline(in, line)) {
        ++line_no;
        auto toks = tdf_tokens(line);
        if (toks.empty()) continue;
        if (!header_seen) {
            if (toks.size() != 2 || toks[0] != "tdf" || toks[1] != "1")
                throw Error("line " + std::to_string(line_no) + ": expected header 'tdf 1'");
            header_seen = true;
            continue;
        }
        if (toks[0] == "vertex") {
            if (toks.size() < 3)
                throw Error("line " + std::to_string(line_no) + ": vertex needs id and kind");
            TdfVertexLine vl;
            vl.id = tdf_int(toks[1], line_no, "vertex id");
            const std::string& kind = toks[2];
            if (kind == "crossing") {
                if (toks.size() != 4 || toks[3].rfind("over=", 0) != 0)
                    throw Error("line " + std::to_string(line_no) +
                                ": crossing needs over=<slotA>,<slotB>");
                auto parts = tdf_split(toks[3].substr(5), ',');
                if (parts.size() != 2)
                    throw Error("line " + std::to_string(line_no) + ": malformed over= slots");
                long long a = tdf_int(parts[0], line_no, "over slot");
                long long b = tdf_int(parts[1], line_no, "over slot");
                if (a > b) std::swap(a, b);
                if (!(a >= 0 && a <= 1 && b == a + 2))
                    throw Error("line " + std::to_string(line_no) +
                                ": over slots must be opposite (0,2 or 1,3)");
                vl.v.kind = VertexKind::Crossing;
                vl.v.over_parity = int(a);
            } else if (kind == "endpoint") {
                if (toks.size() != 5 || toks[3].rfind("side=", 0) != 0 ||
                    toks[4].rfind("rank=", 0) != 0)
                    throw Error("line " + std::to_string(line_no) +
                                ": endpoint needs side=<S> rank=<n>");
                auto s = side_from_name(toks[3].substr(5));
                if (!s)
                    throw Error("line " + std::to_string(line_no) + ": unknown side '" +
                                toks[3].substr(5) + "'");
                vl.v.kind = VertexKind::Endpoint;
                vl.v.side = *s;
                vl.v.rank = int(tdf_int(toks[4].substr(5), line_no, "rank"));
            } else if (kind == "o") {
                if (toks.size() != 3)
                    throw Error("line " + std::to_string(line_no) + ": 'o' takes no arguments");
                vl.v.kind = VertexKind::CriticalO;
            } else if (kind == "joint") {
                if (toks.size() != 3)
                    throw Error("line " + std::to_string(line_no) + ": 'joint' takes no arguments");
                vl.v.kind = VertexKind::Joint;
            } else {
                throw Error("line " + std::to_string(line_no) + ": unknown vertex kind '" + kind +
                            "'");
            }
            vlines.push_back(vl);
        } else if (toks[0] == "rot") {
            if (toks.size() < 2)
                throw Error("line " + std::to_string(line_no) + ": rot needs a vertex id");
            TdfRotLine rl;
            rl.line_no = line_no;
            rl.id = tdf_int(toks[1], line_no, "vertex id");
            for (size_t i = 2; i < toks.size(); ++i)
                rl.halves.push_back(tdf_int(toks[i], line_no, "half-edge id"));
            rlines.push_back(rl);
        } else if (toks[0] == "edge") {
            if (toks.size() != 5 || toks[4].rfind("comp=", 0) != 0)
                throw Error("line " + std::to_string(line_no) +
                            ": edge needs id, two halves, comp=<kind>:<id>[:tag]");
            TdfEdgeLine el;
            el.line_no = line_no;
            el.id = tdf_int(toks[1], line_no, "edge id");
            el.h1 = tdf_int(toks[2], line_no, "half-edge id");
            el.h2 = tdf_int(toks[3], line_no, "half-edge id");
            auto parts = tdf_split(toks[4].substr(5), ':');
            if (parts.size() < 2 || parts.size() > 3)
                throw Error("line " + std::to_string(line_no) + ": malformed comp=");
            if (parts[0] == "strand")
                el.e.comp_kind = CompKind::Strand;
            else if (parts[0] == "loop")
                el.e.comp_kind = CompKind::Loop;
            else
                throw Error("line " + std::to_string(line_no) + ": unknown component kind '" +
                            parts[0] + "'");
            el.e.comp_id = int(tdf_int(parts[1], line_no, "component id"));
            if (parts.size() == 3) {
                if (parts[2] == "plus")
                    el.e.tag = HalfTag::Plus;
                else if (parts[2] == "minus")
                    el.e.tag = HalfTag::Minus;
                else
                    throw Error("line " + std::to_string(line_no) + ": unknown tag '" + parts[2] +
                                "'");
            }
            elines.push_back(el);
        } else {
            throw Error("line " + std::to_string(line_no) + ": unknown directive '" + toks[0] +
                        "'");
        }
    }
    if (!header_seen) throw Error("missing 'tdf 1' header");

    // Renumber, preserving numeric order.
    std::map<long long, int> vmap;
    for (const auto& vl : vlines)
        if (!vmap.emplace(vl.id, 0).second)
            throw Error("duplicate vertex id " + std::to_string(vl.id));
    {
        int i = 0;
        for (auto& kv : vmap) kv.second = i++;
    }
    std::map<long long, int> emap;
    std::map<long long, long long> half_owner;  // file half id -> file edge id
    for (const auto& el : elines) {
        if (!emap.emplace(el.id, 0).second)
            throw Error("line " + std::to_string(el.line_no) + ": duplicate edge id " +
                        std::to_string(el.id));
        if (el.h1 == el.h2)
            throw Error("line " + std::to_string(el.line_no) + ": edge with identical halves");
        for (long long h : {el.h1, el.h2})
            if (!half_owner.emplace(h, el.id).second)
                throw Error("line " + std::to_string(el.line_no) + ": half-edge " +
                            std::to_string(h) + " declared twice");
    }
    {
        int i = 0;
        for (auto& kv : emap) kv.second = i++;
    }
    std::map<long long, int> hmap;
    for (const auto& el : elines) {
        hmap[el.h1] = 2 * emap[el.id];
        hmap[el.h2] = 2 * emap[el.id] + 1;
    }

    Diagram d;
    d.verts.resize(vlines.size());
    d.rot.resize(vlines.size());
    d.edges.resize(elines.size());
    for (const auto& vl : vlines) d.verts[vmap[vl.id]] = vl.v;
    for (const auto& el : elines) d.edges[emap[el.id]] = el.e;
    std::vector<char> rot_set(vlines.size(), 0);
    for (const auto& rl : rlines) {
        auto it = vmap.find(rl.id);
        if (it == vmap.end())
            throw Error("line " + std::to_string(rl.line_no) + ": rot for undeclared vertex " +
                        std::to_string(rl.id));
        if (rot_set[it->second])
            throw Error("line " + std::to_string(rl.line_no) + ": second rot for vertex " +
                        std::to_string(rl.id));
        rot_set[it->second] = 1;
        for (long long h : rl.halves) {
            auto ht = hmap.find(h);
            if (ht == hmap.end())
                throw Error("line " + std::to_string(rl.line_no) + ": rot references half " +
                            std::to_string(h) + " of no declared edge");
            d.rot[it->second].push_back(ht->second);
        }
    }
    // Every vertex must have a rot line (an empty one is invalid since all
    // kinds have positive degree; validate() reports that precisely).
    for (size_t v = 0; v < vlines.size(); ++v)
        if (!rot_set[v])
            throw Error("vertex " + std::to_string(vlines[v].id) + " has no rot line");
    return d;
}

// ---------------------------------------------------------------------------
// Canonical form, hashing, structural equality.

inline std::string canonical_string(const Diagram& d) { return emit(canonicalize(d)); }

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t diagram_hash(const Diagram& d) { return fnv1a64(canonical_string(d)); }

inline bool structurally_equal(const Diagram& a, const Diagram& b) {
    return canonical_string(a) == canonical_string(b);
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace tangle
