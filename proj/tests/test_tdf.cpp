#include <catch2/catch_amalgamated.hpp>

#include "support/shapes.hpp"
#include "tangle/core.hpp"
#include "tangle/tdf.hpp"

using namespace tangle;

TEST_CASE("emit/parse round-trips byte-exactly") {
    for (const Diagram& d :
         {shapes::empty_diagram(), shapes::single_strand(Side::Vm, 0, Side::Vp, 0),
          shapes::one_crossing(true), shapes::trefoil(), shapes::figure8(),
          compose(shapes::trefoil(), shapes::figure8()),
          shapes::crossingless(DiagramType{2, 2, 2, 2})}) {
        std::string s = emit(d);
        Diagram p = parse(s);
        CHECK(emit(p) == s);
        CHECK(structurally_equal(p, d));
        CHECK(validate(p).ok() == validate(d).ok());
    }
}

TEST_CASE("empty diagram emits just the header") {
    CHECK(emit(Diagram{}) == "tdf 1\n");
    Diagram d = parse("tdf 1\n");
    CHECK(d.verts.empty());
    CHECK(d.edges.empty());
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text =
        "# a comment\n"
        "tdf 1\n"
        "\n"
        "vertex 0 endpoint side=Hm rank=0   # bottom\n"
        "vertex 1 endpoint side=Hp rank=0\n"
        "rot 0 0\n"
        "rot 1 1\n"
        "edge 0 0 1 comp=strand:0\n";
    Diagram d = parse(text);
    CHECK(validate(d).ok());
    CHECK(d.verts.size() == 2);
    CHECK(d.edges.size() == 1);
}

TEST_CASE("sparse ids are renumbered in numeric order") {
    std::string text =
        "tdf 1\n"
        "vertex 10 endpoint side=Hm rank=0\n"
        "vertex 30 endpoint side=Hp rank=0\n"
        "rot 10 100\n"
        "rot 30 200\n"
        "edge 5 100 200 comp=strand:0\n";
    Diagram d = parse(text);
    CHECK(validate(d).ok());
    CHECK(d.verts[0].side == Side::Hm);
    CHECK(d.verts[1].side == Side::Hp);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse(text);
            FAIL("expected parse error for: " << text);
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("tdf 2\n", "line 1");
    expect_error("vertex 0 joint\n", "line 1");
    expect_error("tdf 1\nvertex 0 sprocket\n", "line 2");
    expect_error("tdf 1\nvertex 0 crossing over=0,1\n", "line 2");
    expect_error("tdf 1\nvertex 0 joint\nvertex 0 joint\n", "duplicate vertex id");
    expect_error("tdf 1\nrot 3 0\n", "undeclared vertex");
    expect_error(
        "tdf 1\nvertex 0 joint\nrot 0 7\nedge 0 1 2 comp=strand:0\n",
        "no declared edge");
    expect_error("tdf 1\nvertex 0 endpoint side=Xp rank=0\n", "unknown side");
    expect_error("tdf 1\nvertex 0 endpoint side=Hm rank=zero\n", "expected integer");
    expect_error("tdf 1\nvertex 0 joint\n", "no rot line");
}

TEST_CASE("hash is stable across relabeling and differs across structure") {
    Diagram t = shapes::trefoil();
    auto h0 = diagram_hash(t);
    CHECK(h0 == diagram_hash(shapes::scramble(t, 99)));
    CHECK(h0 != diagram_hash(mirror(t)));
    CHECK(hash_hex(h0).size() == 16);
}

TEST_CASE("tags and kinds survive the round trip") {
    Diagram k = compose(shapes::trefoil(), shapes::trefoil());
    Diagram p = parse(emit(k));
    CHECK(validate_subdivided(p).ok());
    auto c0 = counts(k), c1 = counts(p);
    CHECK(c0.chi == c1.chi);
    CHECK(c0.chi_minus == c1.chi_minus);
    CHECK(c0.chi_plus == c1.chi_plus);
    CHECK(c0.hybrid == c1.hybrid);
}
