#include <catch_amalgamated.hpp>

#include "tangle/bracket.hpp"
#include "tangle/render.hpp"
#include "support/shapes.hpp"

using namespace tangle;

namespace {

using Pt = std::pair<double, double>;

bool seg_cross(Pt a, Pt b, Pt c, Pt d) {
    auto orient = [](Pt o, Pt p, Pt q) {
        return (p.first - o.first) * (q.second - o.second) -
               (p.second - o.second) * (q.first - o.first);
    };
    double d1 = orient(c, d, a), d2 = orient(c, d, b);
    double d3 = orient(a, b, c), d4 = orient(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

int mixed_crossings(const RenderGeometry& g) {
    int n = 0;
    for (const auto& s1 : g.strokes)
        for (const auto& s2 : g.strokes) {
            if (s1.edge >= s2.edge) continue;
            bool mixed = (s1.tag == HalfTag::Plus && s2.tag == HalfTag::Minus) ||
                         (s1.tag == HalfTag::Minus && s2.tag == HalfTag::Plus);
            if (!mixed) continue;
            for (std::size_t i = 0; i + 1 < s1.pts.size(); ++i)
                for (std::size_t j = 0; j + 1 < s2.pts.size(); ++j)
                    if (seg_cross(s1.pts[i], s1.pts[i + 1], s2.pts[j], s2.pts[j + 1])) ++n;
        }
    return n;
}

double dist(Pt a, Pt b) {
    double dx = a.first - b.first, dy = a.second - b.second;
    return std::sqrt(dx * dx + dy * dy);
}

int count_of(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t p = text.find(needle); p != std::string::npos;
         p = text.find(needle, p + 1))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("empty diagram draws the square frame alone") {
    std::string svg = render_svg(shapes::empty_diagram());
    CHECK(count_of(svg, "<rect") == 1);
    CHECK(count_of(svg, "<path") == 0);
    CHECK(count_of(svg, "<circle") == 0);
}

TEST_CASE("bridge strands render as disjoint left-to-right polylines") {
    RenderOptions opt;
    RenderGeometry g = layout(shapes::horizontal_strands(3), opt);
    REQUIRE(g.strokes.size() == 3);
    std::vector<double> heights;
    for (const auto& s : g.strokes) {
        Pt a = s.pts.front(), b = s.pts.back();
        if (a.first > b.first) std::swap(a, b);
        CHECK(a.first == Catch::Approx(opt.margin));
        CHECK(b.first == Catch::Approx(opt.size - opt.margin));
        heights.push_back(a.second);
    }
    std::sort(heights.begin(), heights.end());
    CHECK(heights[0] < heights[1]);
    CHECK(heights[1] < heights[2]);
    CHECK(mixed_crossings(g) == 0);
}

TEST_CASE("subdivided halves keep their stroke classes apart") {
    for (const Diagram& t : {compose(shapes::trefoil(), shapes::trefoil()),
                             compose(shapes::figure8(), shapes::trefoil())}) {
        RenderGeometry g = layout(t);
        CHECK(mixed_crossings(g) == 0);
        std::string svg = render_svg(g);
        CHECK(count_of(svg, "class=\"plus\"") > 0);
        CHECK(count_of(svg, "class=\"minus\"") > 0);
        CHECK(count_of(svg, "class=\"crit\"") == 1);
    }
}

TEST_CASE("under strands are clipped short at the crossing") {
    Diagram d = shapes::one_crossing(true);
    int c = -1;
    for (int v = 0; v < int(d.verts.size()); ++v)
        if (d.verts[v].kind == VertexKind::Crossing) c = v;
    REQUIRE(c >= 0);
    RenderGeometry g = layout(d);
    Pt cp = g.vertex_pos[c];
    int touching = 0, clipped = 0;
    for (const auto& s : g.strokes) {
        double near = std::min(dist(s.pts.front(), cp), dist(s.pts.back(), cp));
        if (near < 1e-6)
            ++touching;
        else if (near > 3.0)
            ++clipped;
    }
    CHECK(touching == 2);
    CHECK(clipped == 2);
}

TEST_CASE("rendering is byte-deterministic") {
    Diagram t = compose(shapes::figure8(), shapes::trefoil());
    CHECK(render_svg(t) == render_svg(t));
    std::string svg = render_svg(shapes::trefoil());
    CHECK(svg.find("-0.00") == std::string::npos);
}
