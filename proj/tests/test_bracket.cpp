#include <catch2/catch_amalgamated.hpp>

#include "support/shapes.hpp"
#include "tangle/bracket.hpp"

using namespace tangle;

static LaurentPoly poly(std::initializer_list<std::pair<int, long long>> terms) {
    LaurentPoly p;
    for (auto& [e, k] : terms) p.add_term(e, k);
    return p;
}

TEST_CASE("laurent polynomial arithmetic and printing") {
    LaurentPoly p = poly({{-2, 3}, {0, 1}, {5, -4}});
    CHECK(p.to_string() == "3 A^-2 + 1 A^0 + -4 A^5");
    CHECK(LaurentPoly::one().to_string() == "1 A^0");
    CHECK(LaurentPoly::zero().to_string() == "0");

    // cancellation never leaves zero coefficients behind
    LaurentPoly q = p;
    q.add_term(5, 4);
    CHECK(q == poly({{-2, 3}, {0, 1}}));
    CHECK(q.c.count(5) == 0);

    CHECK(p.reciprocal() == poly({{2, 3}, {0, 1}, {-5, -4}}));
    CHECK((poly({{1, 2}}) * poly({{-1, 3}, {2, 1}})) == poly({{0, 6}, {3, 2}}));
}

TEST_CASE("closure of a crossingless arc is the unknot loop") {
    Diagram k = shapes::single_strand(Side::Hm, 0, Side::Hp, 0);
    Diagram c = closure(k);
    CHECK(is_closed(c));
    CHECK(crossing_count(c) == 0);
    CHECK(components(c).size() == 1);
    CHECK(components(c)[0].kind == CompKind::Loop);

    CHECK(bracket(c) == LaurentPoly::one());
    CHECK(writhe(c) == 0);
    CHECK(normalized(c) == LaurentPoly::one());

    CHECK_THROWS_AS(closure(c), Error);  // already closed
}

TEST_CASE("closure keeps the crossing count") {
    Diagram c = closure(shapes::trefoil());
    CHECK(is_closed(c));
    CHECK(crossing_count(c) == 3);
    CHECK(components(c).size() == 1);
}

TEST_CASE("single kinks: bracket -A^3 for the positive kink, normalized 1") {
    // one braid generator closes to a kinked unknot
    Diagram kink = closure(shapes::from_braid(2, {{1, +1}}));
    CHECK(crossing_count(kink) == 1);
    CHECK(writhe(kink) == -1);
    CHECK(bracket(kink) == poly({{-3, -1}}));
    CHECK(normalized(kink) == LaurentPoly::one());

    Diagram pos = closure(mirror(shapes::from_braid(2, {{1, +1}})));
    CHECK(writhe(pos) == +1);
    CHECK(bracket(pos) == poly({{3, -1}}));  // -A^3
    CHECK(normalized(pos) == LaurentPoly::one());
}

TEST_CASE("trefoil bracket and normalized values") {
    Diagram t = closure(shapes::trefoil());
    CHECK(writhe(t) == -3);
    CHECK(bracket(t) == poly({{-5, -1}, {3, -1}, {7, 1}}));
    LaurentPoly n = normalized(t);
    CHECK(n == poly({{4, 1}, {12, 1}, {16, -1}}));
    CHECK(n != LaurentPoly::one());  // trefoil is knotted
}

TEST_CASE("pd-code trefoil is the mirror chirality of the braid trefoil") {
    Diagram t = closure(shapes::trefoil_pd());
    CHECK(writhe(t) == +3);
    CHECK(bracket(t) == poly({{-7, 1}, {-3, -1}, {5, -1}}));
    CHECK(normalized(t) == poly({{-16, -1}, {-12, 1}, {-4, 1}}));
    CHECK(normalized(t) == normalized(closure(shapes::trefoil())).reciprocal());
}

TEST_CASE("mirror sends the normalized bracket to its reciprocal") {
    for (const Diagram& k : {shapes::trefoil(), shapes::figure8()}) {
        LaurentPoly n = normalized(closure(k));
        LaurentPoly m = normalized(closure(mirror(k)));
        CHECK(m == n.reciprocal());
    }
}

TEST_CASE("figure-eight values; amphichiral") {
    Diagram f = closure(shapes::figure8());
    CHECK(crossing_count(f) == 4);
    CHECK(writhe(f) == 0);
    LaurentPoly b = bracket(f);
    CHECK(b == poly({{-8, 1}, {-4, -1}, {0, 1}, {4, -1}, {8, 1}}));
    CHECK(normalized(f) == b);
    CHECK(normalized(f) == normalized(f).reciprocal());
}

TEST_CASE("normalized bracket is multiplicative over composition") {
    Diagram t = shapes::trefoil();
    Diagram f = shapes::figure8();
    LaurentPoly nt = normalized(closure(t));
    LaurentPoly nf = normalized(closure(f));
    CHECK(normalized(closure(compose(t, t))) == nt * nt);
    CHECK(normalized(closure(compose(t, f))) == nt * nf);
}

TEST_CASE("bracket pipeline is invariant under relabeling") {
    LaurentPoly base = normalized(closure(shapes::trefoil()));
    for (unsigned seed : {7u, 99u, 12345u}) {
        Diagram s = shapes::scramble(shapes::trefoil(), seed);
        CHECK(normalized(closure(s)) == base);
    }
}

TEST_CASE("links are rejected by writhe but bracket still evaluates") {
    Diagram c = closure(shapes::ringed_o());
    CHECK(components(c).size() == 2);
    CHECK_THROWS_AS(writhe(c), Error);
    CHECK_THROWS_AS(normalized(c), Error);
    CHECK_FALSE(bracket(c).is_zero());
}

TEST_CASE("crossing budget is enforced") {
    // odd powers of the 2-braid generator close to one loop (torus knots)
    std::vector<std::pair<int, int>> word(kBracketBudget + 1, {1, +1});
    Diagram big = closure(shapes::from_braid(2, word));
    CHECK(crossing_count(big) == kBracketBudget + 1);
    CHECK_THROWS_AS(bracket(big), Error);

    word.resize(kBracketBudget - 1);
    Diagram ok = closure(shapes::from_braid(2, word));
    CHECK(crossing_count(ok) == kBracketBudget - 1);
    LaurentPoly n = normalized(ok);
    CHECK_FALSE(n.is_zero());
    CHECK(n != LaurentPoly::one());  // a (2,19) torus knot is knotted
}
