#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "branchlap/geometry.hpp"
#include "branchlap/mesh.hpp"

using namespace branchlap;

namespace {

double min_angle_deg(const Mesh& m) {
    double worst = 180.0;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            const Vec2 u = m.nodes[t[(i + 1) % 3]] - m.nodes[t[i]];
            const Vec2 v = m.nodes[t[(i + 2) % 3]] - m.nodes[t[i]];
            const double ang = std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0));
            worst = std::min(worst, ang * 180.0 / std::numbers::pi);
        }
    }
    return worst;
}

double max_edge(const Mesh& m) {
    double h = 0.0;
    for (const auto& t : m.triangles)
        for (int i = 0; i < 3; ++i)
            h = std::max(h, norm(m.nodes[t[i]] - m.nodes[t[(i + 1) % 3]]));
    return h;
}

}  // namespace

TEST_CASE("rectangular domain with branch meshes cleanly (shape a)") {
    Mesh m = generate(build_catalog_domain('a'), 0.15);
    m.check_valid();
    CHECK(m.total_area() == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(min_angle_deg(m) > 19.0);
    CHECK(max_edge(m) <= 0.15 * 1.2);
    CHECK(m.slit_edges.empty());
}

TEST_CASE("all catalog shapes mesh with correct area") {
    struct Expect { char id; double area; double tol; };
    const double slope_extra = 0.5 * 1.0 * (0.25 - 0.125) / 2.0 * 2.0;  // shape e trapezoid
    (void)slope_extra;
    const Expect cases[] = {
        {'a', 1.0 + 0.25, 1e-10},
        {'b', 0.5 + 0.125, 1e-10},
        {'c', 1.0 + 0.5 * 0.125 + 0.5 * 0.25, 1e-10},
        {'d', 1.0 + 0.5 * 0.25 + 0.5 * 0.125, 1e-10},
        {'e', 1.0 + (0.125 + 0.25) / 2.0, 1e-10},
        {'f', 1.0 + 0.25, 1e-10},
        {'g', 1.0 + 0.25 * 0.5 - 0.25 * 0.125 / 2.0, 1e-10},
        // curved branch: polygonal boundary approximates the annulus sector
        {'h', 1.0 + std::numbers::pi / 4.0 * (0.625 * 0.625 - 0.375 * 0.375), 2e-3},
        {'i', 1.0 + 0.25 + 0.125 * 0.25, 1e-10},
        {'j', 1.0 + 0.25 + 0.25 * 1.0, 1e-10},
    };
    for (const auto& c : cases) {
        CAPTURE(c.id);
        Mesh m = generate(build_catalog_domain(c.id), 0.15);
        m.check_valid();
        CHECK(std::abs(m.total_area() - c.area) < c.tol);
    }
}

TEST_CASE("slit is kept as interior edges (shape f)") {
    Mesh m = generate(build_catalog_domain('f'), 0.15);
    CHECK(!m.slit_edges.empty());
    double slit_len = 0.0;
    for (const auto& e : m.slit_edges) {
        CHECK(m.nodes[e.a].y == doctest::Approx(0.625));
        CHECK(m.nodes[e.b].y == doctest::Approx(0.625));
        slit_len += norm(m.nodes[e.a] - m.nodes[e.b]);
    }
    CHECK(slit_len == doctest::Approx(0.4));
}

TEST_CASE("uniform refinement quadruples triangles and preserves area") {
    Mesh m = generate(build_catalog_domain('a'), 0.15);
    Mesh r = refine(m);
    r.check_valid();
    CHECK(r.triangles.size() == 4 * m.triangles.size());
    CHECK(r.boundary_edges.size() == 2 * m.boundary_edges.size());
    CHECK(r.level == m.level + 1);
    CHECK(r.total_area() == doctest::Approx(m.total_area()).epsilon(1e-13));
    // Euler bookkeeping: new nodes = one per parent edge
    std::set<std::pair<int, int>> edges;
    for (const auto& t : m.triangles)
        for (int i = 0; i < 3; ++i)
            edges.insert({std::min(t[i], t[(i + 1) % 3]), std::max(t[i], t[(i + 1) % 3])});
    CHECK(r.nodes.size() == m.nodes.size() + edges.size());
}

TEST_CASE("refinement of the curved branch converges to the annulus area") {
    const double exact = 1.0 + std::numbers::pi / 4.0 * (0.625 * 0.625 - 0.375 * 0.375);
    Mesh m = generate(build_catalog_domain('h'), 0.15);
    const double e0 = std::abs(m.total_area() - exact);
    Mesh r1 = refine(m);
    r1.check_valid();
    const double e1 = std::abs(r1.total_area() - exact);
    Mesh r2 = refine(r1);
    const double e2 = std::abs(r2.total_area() - exact);
    CHECK(e1 < 0.3 * e0);   // boundary projection gives ~4x per level
    CHECK(e2 < 0.3 * e1);
    // projected midpoints sit on the circles
    for (const auto& be : r2.boundary_edges) {
        if (be.arc < 0) continue;
        const Circle& c = r2.arcs[be.arc];
        CHECK(norm(r2.nodes[be.a] - c.center) == doctest::Approx(c.radius).epsilon(1e-12));
    }
}

TEST_CASE("rectangle generator tags the four sides") {
    Mesh m = generate_rectangle(1.0, 0.25, 0.1, 1, 2, 3, 4);
    m.check_valid();
    CHECK(m.total_area() == doctest::Approx(0.25));
    for (const auto& e : m.boundary_edges) {
        const Vec2 a = m.nodes[e.a], b = m.nodes[e.b];
        switch (e.marker) {
            case 1: CHECK(a.x == doctest::Approx(0.0)); CHECK(b.x == doctest::Approx(0.0)); break;
            case 2: CHECK(a.x == doctest::Approx(1.0)); CHECK(b.x == doctest::Approx(1.0)); break;
            case 3: CHECK(a.y == doctest::Approx(0.0)); CHECK(b.y == doctest::Approx(0.0)); break;
            case 4: CHECK(a.y == doctest::Approx(0.25)); CHECK(b.y == doctest::Approx(0.25)); break;
            default: FAIL("untagged boundary edge");
        }
    }
}

TEST_CASE("mesh io round trip") {
    Mesh m = generate(build_catalog_domain('h'), 0.2);
    std::stringstream ss;
    write_mesh(ss, m);
    Mesh back = read_mesh(ss);
    REQUIRE(back.nodes.size() == m.nodes.size());
    REQUIRE(back.triangles.size() == m.triangles.size());
    for (size_t i = 0; i < m.nodes.size(); ++i) CHECK(norm(back.nodes[i] - m.nodes[i]) == 0.0);
    CHECK(back.triangles == m.triangles);
    CHECK(back.boundary_edges.size() == m.boundary_edges.size());
    CHECK(back.arcs.size() == m.arcs.size());
    CHECK(back.level == m.level);
}

TEST_CASE("meshing is deterministic") {
    Mesh m1 = generate(build_catalog_domain('c'), 0.15);
    Mesh m2 = generate(build_catalog_domain('c'), 0.15);
    REQUIRE(m1.nodes.size() == m2.nodes.size());
    for (size_t i = 0; i < m1.nodes.size(); ++i) CHECK(norm(m1.nodes[i] - m2.nodes[i]) == 0.0);
    CHECK(m1.triangles == m2.triangles);
}

TEST_CASE("bad input is rejected") {
    CHECK_THROWS_AS(generate(build_catalog_domain('a'), -0.1), MeshError);
}
