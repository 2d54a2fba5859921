#include <catch2/catch_amalgamated.hpp>

#include "support/shapes.hpp"
#include "tangle/core.hpp"
#include "tangle/tdf.hpp"

using namespace tangle;

TEST_CASE("empty diagram is valid") {
    Diagram d = shapes::empty_diagram();
    CHECK(validate(d).ok());
    CHECK(type_of(d) == DiagramType{0, 0, 0, 0});
    CHECK(crossing_count(d) == 0);
    CHECK(components(d).empty());
}

TEST_CASE("single strand") {
    Diagram d = shapes::single_strand(Side::Hm, 0, Side::Hp, 0);
    CHECK(validate(d).ok());
    auto cs = components(d);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].kind == CompKind::Strand);
    CHECK(d.verts[cs[0].ep_from].side == Side::Hm);
    CHECK(d.verts[cs[0].ep_to].side == Side::Hp);
}

TEST_CASE("parallel strand families are valid") {
    for (int m : {1, 2, 3, 5}) {
        Diagram h = shapes::horizontal_strands(m);
        CHECK(validate(h).ok());
        CHECK(type_of(h) == DiagramType{0, m, 0, m});
        Diagram v = shapes::vertical_strands(m);
        CHECK(validate(v).ok());
        CHECK(type_of(v) == DiagramType{m, 0, m, 0});
    }
}

TEST_CASE("one crossing X tangle") {
    Diagram d = shapes::one_crossing(true);
    CHECK(validate(d).ok());
    CHECK(crossing_count(d) == 1);
    auto cs = components(d);
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].kind == CompKind::Strand);
    CHECK(cs[1].kind == CompKind::Strand);
    // strands run straight through the crossing: (H-,0) ends at (H+,0)
    for (const auto& c : cs) {
        CHECK(d.verts[c.ep_from].rank == d.verts[c.ep_to].rank);
    }
}

TEST_CASE("non-planar rotation system is rejected") {
    Diagram d = shapes::bad_rotation();
    auto r = validate(d);
    CHECK_FALSE(r.ok());
    bool mentions_planar = false;
    for (const auto& p : r.problems)
        if (p.find("planar") != std::string::npos) mentions_planar = true;
    CHECK(mentions_planar);
}

TEST_CASE("degree and uniqueness problems are reported") {
    SECTION("bad degree") {
        Diagram d;
        int c = d.add_crossing(0);
        int e1 = d.add_endpoint(Side::Hm, 0);
        d.connect(c, e1);
        CHECK_FALSE(validate(d).ok());
    }
    SECTION("duplicate endpoint position") {
        Diagram d;
        int a = d.add_endpoint(Side::Hm, 0);
        int b = d.add_endpoint(Side::Hm, 0);
        d.connect(a, b);
        relabel_components(d);
        CHECK_FALSE(validate(d).ok());
    }
    SECTION("two critical points") {
        Diagram d;
        int a = d.add_o();
        int b = d.add_o();
        d.connect(a, b);
        d.connect(b, a);
        relabel_components(d);
        CHECK_FALSE(validate(d).ok());
    }
}

TEST_CASE("trefoil and figure-eight import") {
    Diagram t = shapes::trefoil();
    CHECK(validate(t).ok());
    CHECK(crossing_count(t) == 3);
    CHECK(type_of(t) == DiagramType{1, 0, 1, 0});
    auto cs = components(t);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].kind == CompKind::Strand);

    Diagram tp = shapes::trefoil_pd();
    CHECK(validate(tp).ok());
    CHECK(crossing_count(tp) == 3);
    REQUIRE(components(tp).size() == 1);

    Diagram f8 = shapes::figure8();
    CHECK(validate(f8).ok());
    CHECK(crossing_count(f8) == 4);
    REQUIRE(components(f8).size() == 1);
}

TEST_CASE("mirror is an involution and preserves counts") {
    Diagram t = shapes::trefoil();
    Diagram m = mirror(t);
    CHECK(validate(m).ok());
    CHECK(crossing_count(m) == crossing_count(t));
    CHECK(structurally_equal(mirror(m), t));
    // the trefoil differs from its mirror as a diagram
    CHECK_FALSE(structurally_equal(m, t));
}

TEST_CASE("compose builds a subdivided diagram; factors splits it back") {
    Diagram t = shapes::trefoil();
    Diagram f8 = shapes::figure8();
    Diagram k = compose(t, f8);
    CHECK(validate_subdivided(k).ok());
    auto cc = counts(k);
    CHECK(cc.chi == 7);
    CHECK(cc.chi_minus == 3);
    CHECK(cc.chi_plus == 4);
    CHECK(cc.hybrid == 0);
    CHECK(permitted(k));

    auto [k0, k1] = factors(k);
    CHECK(validate(k0).ok());
    CHECK(validate(k1).ok());
    CHECK(structurally_equal(k0, t));
    CHECK(structurally_equal(k1, f8));
}

TEST_CASE("mirror preserves the subdivision structure") {
    Diagram k = compose(shapes::trefoil(), shapes::figure8());
    Diagram m = mirror(k);
    CHECK(validate_subdivided(m).ok());
    auto cc = counts(m);
    CHECK(cc.chi_minus == 3);
    CHECK(cc.chi_plus == 4);
    CHECK(cc.hybrid == 0);
    auto [m0, m1] = factors(m);
    CHECK(structurally_equal(m0, mirror(shapes::trefoil())));
    CHECK(structurally_equal(m1, mirror(shapes::figure8())));
}

TEST_CASE("canonicalization is stable under relabeling") {
    for (const Diagram& d :
         {shapes::trefoil(), shapes::figure8(), shapes::one_crossing(true),
          shapes::horizontal_strands(3), shapes::crossingless(DiagramType{2, 1, 2, 1})}) {
        std::string c0 = canonical_string(d);
        for (unsigned seed : {1u, 7u, 1234u}) {
            Diagram s = shapes::scramble(d, seed);
            REQUIRE(validate(s).ok());
            CHECK(canonical_string(s) == c0);
        }
        // idempotent
        CHECK(emit(canonicalize(canonicalize(d))) == emit(canonicalize(d)));
        CHECK(validate(canonicalize(d)).ok());
    }
}

TEST_CASE("canonical form distinguishes structure") {
    CHECK_FALSE(structurally_equal(shapes::one_crossing(true), shapes::one_crossing(false)));
    CHECK_FALSE(structurally_equal(shapes::trefoil(), shapes::figure8()));
    CHECK(diagram_hash(shapes::trefoil()) != diagram_hash(shapes::figure8()));
}

TEST_CASE("crossingless matchings are valid for assorted types") {
    for (DiagramType t :
         {DiagramType{1, 0, 1, 0}, DiagramType{0, 3, 0, 3}, DiagramType{2, 2, 2, 2},
          DiagramType{0, 0, 4, 4}, DiagramType{3, 1, 1, 3}}) {
        Diagram d = shapes::crossingless(t);
        CHECK(validate(d).ok());
        CHECK(type_of(d) == t);
        CHECK(crossing_count(d) == 0);
    }
}
