#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "support/gen.hpp"
#include "support/shapes.hpp"
#include "tangle/bracket.hpp"
#include "tangle/fan.hpp"
#include "tangle/tdf.hpp"

using namespace tangle;

namespace {

Diagram knot_u() { return shapes::single_strand(Side::Hm, 0, Side::Hp, 0); }

// A composite whose minus half is a bare strand plus one circle around the
// critical point: the circle crosses the strand below o (pure minus) and the
// upper germ above o (hybrid, plus over).  Smallest instance with a cut of
// width two.
Diagram looped_o() {
    Diagram d;
    int bot = d.add_endpoint(Side::Hm, 0);
    int xm = d.add_crossing(0);
    int o = d.add_o();
    int xh = d.add_crossing(0);
    int top = d.add_endpoint(Side::Hp, 0);
    int e0 = d.add_edge_record(HalfTag::Minus);  // bot - xm
    int e1 = d.add_edge_record(HalfTag::Minus);  // xm - o
    int e2 = d.add_edge_record(HalfTag::Plus);   // o - xh
    int e3 = d.add_edge_record(HalfTag::Plus);   // xh - top
    int e4 = d.add_edge_record(HalfTag::Minus);  // left semicircle xm - xh
    int e5 = d.add_edge_record(HalfTag::Minus);  // right semicircle xm - xh
    d.rot[bot] = {2 * e0};
    d.rot[xm] = {2 * e0 + 1, 2 * e5, 2 * e1, 2 * e4};
    d.rot[o] = {2 * e1 + 1, 2 * e2};
    d.rot[xh] = {2 * e2 + 1, 2 * e5 + 1, 2 * e3, 2 * e4 + 1};
    d.rot[top] = {2 * e3 + 1};
    relabel_components(d);
    require_valid(d, "looped_o");
    return d;
}

std::multiset<std::pair<int, int>> endpoint_set(const Diagram& d) {
    std::multiset<std::pair<int, int>> s;
    for (const auto& v : d.verts)
        if (v.alive && v.kind == VertexKind::Endpoint) s.insert({side_ccw_order(v.side), v.rank});
    return s;
}

int loop_count(const Diagram& d) {
    int n = 0;
    for (const auto& c : components(d)) n += (c.kind == CompKind::Loop) ? 1 : 0;
    return n;
}

int strand_count(const Diagram& d) {
    int n = 0;
    for (const auto& c : components(d)) n += (c.kind == CompKind::Strand) ? 1 : 0;
    return n;
}

std::set<int> side_ranks(const Diagram& d, Side s) {
    std::set<int> r;
    for (const auto& v : d.verts)
        if (v.alive && v.kind == VertexKind::Endpoint && v.side == s) r.insert(v.rank);
    return r;
}

SymMatrix mat(int n, std::vector<std::tuple<int, int, long long>> cells) {
    SymMatrix m = SymMatrix::zero(n);
    for (auto& [i, j, v] : cells) m.set_sym(i, j, v);
    return m;
}

// Every structural postcondition of a cut pair that does not depend on the
// instance: validity, types, crossing conservation, rank layout, matching.
void check_cut_shape(const Diagram& t, const CutPair& cp) {
    int K = cp.k - 1 + cp.l;
    REQUIRE(int(cp.matching.size()) == K);
    CrossingCounts in = counts(t), out = counts(cp.combined);
    CHECK(out.chi == in.chi);
    CHECK(out.chi_plus == in.chi_plus);
    CHECK(out.chi_minus == in.chi_minus);
    CHECK(out.hybrid == in.hybrid);

    CHECK(type_of(cp.s_minus) == DiagramType{1, cp.k - 1, 1, cp.k - 1});
    CHECK(type_of(cp.s_plus) == DiagramType{0, cp.l + 2, 0, cp.l});

    // Left side carries ranks 0..K+1 (0 = clipped germ, K+1 = clipped top
    // arc), right side carries 0..K-1; cut i sits at left rank i and right
    // rank K-i.
    std::set<int> left = side_ranks(cp.s_minus, Side::Vm), right = side_ranks(cp.s_minus, Side::Vp);
    for (int r : side_ranks(cp.s_plus, Side::Vm)) left.insert(r);
    for (int r : side_ranks(cp.s_plus, Side::Vp)) right.insert(r);
    std::set<int> want_left, want_right;
    for (int r = 0; r <= K + 1; ++r) want_left.insert(r);
    for (int r = 0; r < K; ++r) want_right.insert(r);
    CHECK(left == want_left);
    CHECK(right == want_right);
    for (int i = 0; i < K; ++i) {
        CHECK(cp.matching[i].vm_rank == i + 1);
        CHECK(cp.matching[i].vp_rank == K - (i + 1));
        CHECK(cp.matching[i].tag == t.edges[cp.matching[i].edge].tag);
    }
}

}  // namespace

TEST_CASE("splitting ray minimality and provenance on pinned instances") {
    {
        Diagram t = compose(knot_u(), knot_u());
        SplittingRay j = minus_splitting_ray(t);
        CHECK(j.k_minus == 0);
        CHECK(j.l_plus == 0);
        CHECK(j.edges.empty());
        CHECK(j.from_faces.empty());
        CHECK(j.start_face >= 0);
        REQUIRE(j.nodes.size() >= 2);
        CHECK(j.nodes.front() == j.start_face);
    }
    {
        Diagram t = looped_o();
        SplittingRay j = minus_splitting_ray(t);
        CHECK(j.k_minus == 1);
        CHECK(j.l_plus == 0);
        REQUIRE(j.edges.size() == 1);
        CHECK(t.edges[j.edges[0]].tag == HalfTag::Minus);
        REQUIRE(j.from_faces.size() == 1);
        CHECK(j.from_faces[0] == j.start_face);
        CHECK(j.k_minus == min_ray(t, HalfTag::Minus));
    }
    {
        Diagram t = compose(shapes::trefoil(), shapes::trefoil());
        SplittingRay j = minus_splitting_ray(t);
        CHECK(j.k_minus == 0);
        CHECK(j.k_minus == min_ray(t, HalfTag::Minus));
    }
}

TEST_CASE("fan cut of the trivial composite matches the pinned shapes") {
    Diagram t = compose(knot_u(), knot_u());
    CutPair cp = fan_cut(t);
    CHECK(cp.k == 1);
    CHECK(cp.l == 0);
    CHECK(cp.matching.empty());
    check_cut_shape(t, cp);

    Diagram exm;
    int ma = exm.add_endpoint(Side::Hm, 0);
    int mb = exm.add_endpoint(Side::Hp, 0);
    exm.connect(ma, mb, HalfTag::Minus);
    relabel_components(exm);
    CHECK(structurally_equal(cp.s_minus, exm));

    Diagram ex;
    int a = ex.add_endpoint(Side::Vm, 0);
    int b = ex.add_endpoint(Side::Vm, 1);
    ex.connect(a, b, HalfTag::Plus);
    relabel_components(ex);
    CHECK(structurally_equal(cp.s_plus, ex));

    CHECK(type_of(cp.combined) == DiagramType{1, 2, 1, 0});
    CHECK(counts(cp.combined).hybrid == 0);
}

TEST_CASE("fan cut keeps a plain factor intact") {
    Diagram t = compose(shapes::trefoil(), knot_u());
    CutPair cp = fan_cut(t);
    CHECK(cp.k == 1);
    CHECK(cp.l == 0);
    check_cut_shape(t, cp);
    CHECK(crossing_count(cp.s_minus) == 3);
    CHECK(crossing_count(cp.s_plus) == 0);
    CHECK(min_vert(cp.s_minus) == 0);
    CHECK(min_vert(cp.s_plus) == 0);
}

TEST_CASE("fan cut of the looped composite is the pinned width-two instance") {
    Diagram t = looped_o();
    CutPair cp = fan_cut(t);
    CHECK(cp.k == 2);
    CHECK(cp.l == 0);
    check_cut_shape(t, cp);

    CHECK(crossing_count(cp.s_minus) == 1);
    CHECK(counts(cp.s_minus).chi_minus == 1);
    CHECK(min_vert(cp.s_minus) == 1);
    CHECK(crossing_count(cp.s_plus) == 0);
    CHECK(min_vert(cp.s_plus) == 0);
    CHECK(strand_count(cp.s_plus) == 1);
    CHECK(loop_count(cp.s_plus) == 0);

    // The cut point: one minus edge, left rank 1, right rank 0.
    REQUIRE(cp.matching.size() == 1);
    CHECK(cp.matching[0].tag == HalfTag::Minus);

    SymMatrix e = e_matrix(cp.s_minus, cp.s_plus);
    CHECK(e == mat(4, {{1, 2, 1}}));
    CHECK(check_star(e).ok);

    // This instance meets the weight floor exactly.
    auto v = v_matrix(cp.s_minus);
    SymMatrix w = w_matrix(2);
    REQUIRE(int(v.size()) == 4);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) CHECK(v[i - 1][j - 1] == w.at(i, j));

    BoundReport r = hybrid_bound_check(t);
    CHECK(r.ok());
    CHECK(r.k == 2);
    CHECK(r.l == 0);
    CHECK(r.chi == 2);
    CHECK(r.chi_minus == 1);
    CHECK(r.chi_plus == 0);
    CHECK(r.hybrid == 1);
    CHECK(r.min_ray_minus == 1);
    CHECK(r.min_ray_plus == 0);
    CHECK(r.min_vert_s_minus == 1);
    CHECK(r.min_vert_s_plus == 0);
}

TEST_CASE("e matrix on pinned region configurations") {
    // Reference (1,1,1,1)-type diagram with both side points at rank 0.
    Diagram t4;
    {
        int hp = t4.add_endpoint(Side::Hp, 0);
        int vm = t4.add_endpoint(Side::Vm, 0);
        int hm = t4.add_endpoint(Side::Hm, 0);
        int vp = t4.add_endpoint(Side::Vp, 0);
        t4.connect(vm, hm);
        t4.connect(vp, hp);
        relabel_components(t4);
        require_valid(t4, "t4");
    }

    SECTION("single crossing strand lands in the corner regions") {
        Diagram s = shapes::single_strand(Side::Vm, -5, Side::Vp, 5);
        SymMatrix e = e_matrix(t4, s);
        CHECK(e.n == 4);
        CHECK(e == mat(4, {{1, 4, 1}}));
    }
    SECTION("an arc with both ends in one region doubles the diagonal") {
        Diagram s = shapes::single_strand(Side::Vm, 1, Side::Vm, 2);
        CHECK(e_matrix(t4, s) == mat(4, {{2, 2, 2}}));
    }
    SECTION("empty second diagram gives the zero matrix") {
        CHECK(e_matrix(t4, shapes::empty_diagram()) == SymMatrix::zero(4));
    }
    SECTION("both shapes together") {
        Diagram s;
        int a = s.add_endpoint(Side::Vm, -5);
        int b = s.add_endpoint(Side::Vp, 5);
        int c = s.add_endpoint(Side::Vm, 1);
        int d = s.add_endpoint(Side::Vm, 2);
        s.connect(a, b);
        s.connect(c, d);
        relabel_components(s);
        require_valid(s, "s");
        CHECK(e_matrix(t4, s) == mat(4, {{1, 4, 1}, {2, 2, 2}}));
    }
    SECTION("rank collisions and bad types are rejected") {
        CHECK_THROWS_AS(e_matrix(t4, shapes::single_strand(Side::Vm, 0, Side::Vp, 5)), Error);
        CHECK_THROWS_AS(e_matrix(shapes::crossingless({0, 2, 0, 2}),
                                 shapes::single_strand(Side::Vm, -5, Side::Vp, 5)),
                        Error);
        CHECK_THROWS_AS(e_matrix(t4, knot_u()), Error);
    }
}

TEST_CASE("close up on pinned instances") {
    LaurentPoly unknot_poly = normalized_closure(knot_u());
    LaurentPoly trefoil_poly = normalized_closure(shapes::trefoil());

    {
        Diagram t = compose(knot_u(), knot_u());
        for (Diagram k : {close_upper(t), close_lower(t)}) {
            CHECK(type_of(k) == DiagramType{1, 0, 1, 0});
            CHECK(crossing_count(k) == 0);
            CHECK(k.find_o() < 0);
            CHECK(strand_count(k) == 1);
            CHECK(loop_count(k) == 0);
            CHECK(normalized_closure(k) == unknot_poly);
        }
    }
    {
        Diagram t = compose(shapes::trefoil(), knot_u());
        Diagram lo = close_lower(t);
        CHECK(crossing_count(lo) == 3);
        CHECK(normalized_closure(lo) == trefoil_poly);
        Diagram up = close_upper(t);
        CHECK(crossing_count(up) == 0);
        CHECK(normalized_closure(up) == unknot_poly);
    }
    {
        Diagram t = compose(shapes::trefoil(), shapes::trefoil());
        Diagram up = close_upper(t);
        CHECK(crossing_count(up) == 3);
        CHECK(normalized_closure(up) == trefoil_poly);
    }
    {
        Diagram t = looped_o();
        Diagram up = close_upper(t);
        CHECK(crossing_count(up) == 0);
        CHECK(normalized_closure(up) == unknot_poly);

        // Reference: an unknot next to a detached circle.  These closures are
        // two-component links, which the writhe normalization refuses, so they
        // are compared by the raw bracket of their closures: the moves
        // relating them introduce no kinks, and the bracket sees through the
        // rest.
        Diagram ref = knot_u();
        int j1 = ref.add_joint(), j2 = ref.add_joint();
        ref.connect(j1, j2);
        ref.connect(j2, j1);
        relabel_components(ref);
        require_valid(ref, "ref");
        LaurentPoly split_poly = bracket(closure(ref));

        Diagram lo = close_lower(t);
        CHECK(crossing_count(lo) == 2);
        CHECK(loop_count(lo) == 1);
        CHECK(bracket(closure(lo)) == split_poly);

        // Flipping the arc policy clasps the arc with the circle instead of
        // letting the circle drop off: the closure is a genuine two-component
        // link, not the split union.
        Diagram lo2 = close_lower(t, false);
        CHECK(crossing_count(lo2) == 2);
        CHECK(loop_count(lo2) == 1);
        CHECK(!(bracket(closure(lo2)) == split_poly));
    }
}

TEST_CASE("closures preserve the factors along restricted walks") {
    LaurentPoly f8_poly = normalized_closure(shapes::figure8());
    LaurentPoly trefoil_poly = normalized_closure(shapes::trefoil());
    WalkWeights heavy;
    heavy.slide = 4;
    heavy.r2_insert = 2;
    int checked = 0;
    std::uint64_t s = 0;
    for (const char* name : {"star", "opp1", "same2"}) {
        Diagram t0 = compose(shapes::trefoil(), shapes::figure8());
        MoveTrace tr = random_walk(t0, 10, 0xFA20 + s++, Ruleset::by_name(name), heavy, 16);
        Diagram cur = tr.seed;
        for (std::size_t i = 0; i < tr.steps.size(); ++i) {
            if (!tr.steps[i].noop) cur = apply_move(cur, tr.steps[i].site, Ruleset::by_name(name));
            if (i % 2) continue;
            Diagram up = close_upper(cur), lo = close_lower(cur);
            CHECK(crossing_count(up) == counts(cur).chi_plus + min_ray(cur, HalfTag::Plus));
            CHECK(crossing_count(lo) == counts(cur).chi_minus + min_ray(cur, HalfTag::Minus));
            CHECK(normalized_closure(up) == f8_poly);
            CHECK(normalized_closure(lo) == trefoil_poly);
            ++checked;
        }
    }
    CHECK(checked >= 15);
}

TEST_CASE("fan cut invariants along restricted walks") {
    const char* rulesets[] = {"star", "opp1", "opp2", "same1", "same2"};
    WalkWeights heavy;
    heavy.slide = 5;
    heavy.r2_insert = 2;
    int wide = 0, plus_cut = 0, checked = 0;
    for (int w = 0; w < 6; ++w) {
        Diagram t0 = (w % 2) ? compose(shapes::figure8(), shapes::trefoil())
                             : compose(shapes::trefoil(), shapes::trefoil());
        const Ruleset& rs = Ruleset::by_name(rulesets[w % 5]);
        MoveTrace tr = random_walk(t0, 12, 0xFA40 + w, rs, heavy, 20);
        Diagram cur = tr.seed;
        for (std::size_t i = 0; i <= tr.steps.size(); ++i) {
            if (i > 0 && !tr.steps[i - 1].noop)
                cur = apply_move(cur, tr.steps[i - 1].site, rs);
            if (i % 3) continue;
            INFO("walk " << w << " ruleset " << rulesets[w % 5] << " step " << i);
            CutPair cp = fan_cut(cur);
            check_cut_shape(cur, cp);
            BoundReport r = hybrid_bound_check(cur);
            CHECK(r.ok());
            CHECK(r.k == cp.k);
            CHECK(r.hybrid == counts(cur).hybrid);
            wide += (r.k >= 2) ? 1 : 0;
            plus_cut += (r.l >= 1) ? 1 : 0;
            ++checked;
        }
    }
    CHECK(checked >= 25);
    CHECK(wide > 0);
    CHECK(plus_cut > 0);
}

TEST_CASE("main inequality reports on short walks") {
    WalkWeights heavy;
    heavy.slide = 4;
    Diagram t0 = compose(shapes::trefoil(), shapes::trefoil());
    MoveTrace tr = random_walk(t0, 6, 0xAB, Ruleset::by_name("star"), heavy, 14);
    auto rep = main_inequality_report(tr, 3, 3);
    REQUIRE(rep.size() == 7);
    CHECK(rep.front().hash == diagram_hash(tr.seed));
    for (std::size_t i = 0; i < tr.steps.size(); ++i) CHECK(rep[i + 1].hash == tr.steps[i].hash);
    for (const auto& r : rep) {
        CHECK(r.chi_sum_ok);
        CHECK(r.hybrid_ge_ok);
        CHECK(r.main_ge_ok);
        CHECK(r.chi >= 6);
        CHECK(r.upper == r.chi_plus + r.min_ray_plus);
        CHECK(r.lower == r.chi_minus + r.min_ray_minus);
        CHECK(r.c_sum == 6);
    }
    for (std::size_t i = 0; i < rep.size(); ++i) CHECK(rep[i].step == int(i));

    // An inflated crossing-number claim is reported, not thrown.
    auto rep2 = main_inequality_report(tr, 4, 3);
    CHECK(!rep2.front().main_ge_ok);
    CHECK(rep2.front().chi_sum_ok);
}

TEST_CASE("parallel main inequality runs are deterministic") {
    MainRunConfig cfg;
    cfg.k0 = shapes::trefoil();
    cfg.k1 = shapes::trefoil();
    cfg.c0 = 3;
    cfg.c1 = 3;
    cfg.walks = 3;
    cfg.steps = 4;
    cfg.seed = 7;
    cfg.ruleset = "star";
    cfg.max_crossings = 14;
    cfg.threads = 3;
    auto out = main_inequality_run(cfg);
    REQUIRE(out.size() == 3);
    for (const auto& walk : out) {
        REQUIRE(walk.size() == 5);
        for (const auto& r : walk) {
            CHECK(r.chi_sum_ok);
            CHECK(r.hybrid_ge_ok);
            CHECK(r.main_ge_ok);
        }
    }
    cfg.threads = 1;
    auto again = main_inequality_run(cfg);
    REQUIRE(again.size() == out.size());
    for (std::size_t w = 0; w < out.size(); ++w) {
        REQUIRE(again[w].size() == out[w].size());
        for (std::size_t i = 0; i < out[w].size(); ++i) {
            CHECK(again[w][i].hash == out[w][i].hash);
            CHECK(main_report_json(again[w][i], int(w)) == main_report_json(out[w][i], int(w)));
        }
    }
}

TEST_CASE("main report serializes to one JSON line") {
    MainStepReport m;
    m.step = 2;
    m.hash = 0x1234;
    m.chi = 7;
    m.chi_plus = 3;
    m.chi_minus = 3;
    m.hybrid = 1;
    m.min_ray_plus = 0;
    m.min_ray_minus = 1;
    m.upper = 3;
    m.lower = 4;
    m.c_sum = 6;
    m.chi_sum_ok = true;
    m.hybrid_ge_ok = true;
    m.main_ge_ok = false;
    CHECK(main_report_json(m, 5) ==
          "{\"walk\":5,\"step\":2,\"hash\":\"0000000000001234\",\"chi\":7,"
          "\"chi_plus\":3,\"chi_minus\":3,\"hybrid\":1,"
          "\"min_ray_plus\":0,\"min_ray_minus\":1,\"upper\":3,\"lower\":4,"
          "\"c_sum\":6,\"chi_sum_ok\":true,\"hybrid_ge_ok\":true,\"main_ge_ok\":false}");
}

TEST_CASE("fan cut rejects bad inputs") {
    CHECK_THROWS_AS(fan_cut(shapes::trefoil()), Error);
    CHECK_THROWS_AS(fan_cut(shapes::weave(2)), Error);
    CHECK_THROWS_AS(close_upper(shapes::trefoil()), Error);
    CHECK_THROWS_AS(close_lower(shapes::figure8()), Error);

    {
        Diagram t = compose(knot_u(), knot_u());
        t.edges[0].tag = HalfTag::None;
        CHECK_THROWS_AS(fan_cut(t), Error);
    }
    {
        Diagram t = looped_o();
        SplittingRay j = minus_splitting_ray(t);
        SplittingRay empty = j;
        empty.edges.clear();
        empty.from_faces.clear();
        CHECK_THROWS_AS(fan_cut(t, empty), Error);  // not minimal
        SplittingRay doubled = j;
        doubled.edges.push_back(doubled.edges[0]);
        doubled.from_faces.push_back(doubled.from_faces[0]);
        CHECK_THROWS_AS(fan_cut(t, doubled), Error);  // not simple
    }
}

TEST_CASE("cut pair endpoint sets add up") {
    // The combined diagram holds exactly the union of both halves' endpoints.
    for (std::uint64_t s : {11u, 23u}) {
        Diagram t0 = compose(shapes::trefoil(), shapes::figure8());
        WalkWeights heavy;
        heavy.slide = 5;
        MoveTrace tr = random_walk(t0, 9, 0xFA60 + s, Ruleset::by_name("star"), heavy, 16);
        Diagram cur = tr.seed;
        for (const auto& st : tr.steps)
            if (!st.noop) cur = apply_move(cur, st.site, Ruleset::by_name("star"));
        CutPair cp = fan_cut(cur);
        auto all = endpoint_set(cp.s_minus);
        for (auto& p : endpoint_set(cp.s_plus)) all.insert(p);
        CHECK(all == endpoint_set(cp.combined));
    }
}
