#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "branchlap/fem.hpp"
#include "branchlap/mesh.hpp"

using namespace branchlap;

namespace {

Mesh unit_right_triangle() {
    Mesh m;
    m.nodes = {{0, 0}, {1, 0}, {0, 1}};
    m.triangles = {{0, 1, 2}};
    m.boundary_edges = {{0, 1, 0, -1}, {1, 2, 0, -1}, {2, 0, 0, -1}};
    return m;
}

double coeff(const SparseSymmetric& A, int i, int j) { return A.mat.coeff(i, j); }

}  // namespace

TEST_CASE("single-triangle element matrices match the closed form") {
    Mesh m = unit_right_triangle();
    AssembledSystem sys = assemble(m, BoundaryCondition::all_neumann());
    REQUIRE(sys.K.dimension() == 3);
    // K for the unit right triangle: 1/2 * [[2,-1,-1],[-1,1,0],[-1,0,1]]
    CHECK(coeff(sys.K, 0, 0) == doctest::Approx(1.0));
    CHECK(coeff(sys.K, 0, 1) == doctest::Approx(-0.5));
    CHECK(coeff(sys.K, 0, 2) == doctest::Approx(-0.5));
    CHECK(coeff(sys.K, 1, 1) == doctest::Approx(0.5));
    CHECK(coeff(sys.K, 1, 2) == doctest::Approx(0.0));
    CHECK(coeff(sys.K, 2, 2) == doctest::Approx(0.5));
    // M = area/12 * [[2,1,1],[1,2,1],[1,1,2]], area = 1/2
    CHECK(coeff(sys.M, 0, 0) == doctest::Approx(1.0 / 12.0));
    CHECK(coeff(sys.M, 0, 1) == doctest::Approx(1.0 / 24.0));
    CHECK(coeff(sys.M, 1, 2) == doctest::Approx(1.0 / 24.0));
}

TEST_CASE("Neumann stiffness annihilates constants; mass sums to the area") {
    Mesh m = generate(build_catalog_domain('a'), 0.15);
    m = refine(m);
    AssembledSystem sys = assemble(m, BoundaryCondition::all_neumann());
    REQUIRE(sys.K.dimension() == static_cast<int>(m.nodes.size()));
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.K.dimension());
    CHECK((sys.K.mat * ones).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(ones.dot(sys.M.mat * ones) == doctest::Approx(m.total_area()).epsilon(1e-12));
}

TEST_CASE("Dirichlet rows eliminate boundary and slit nodes") {
    Mesh m = generate(build_catalog_domain('f'), 0.15);
    AssembledSystem sys = assemble(m, BoundaryCondition::all_dirichlet());
    std::vector<bool> constrained(m.nodes.size(), false);
    for (const auto& e : m.boundary_edges) constrained[e.a] = constrained[e.b] = true;
    for (const auto& e : m.slit_edges) constrained[e.a] = constrained[e.b] = true;
    for (size_t i = 0; i < m.nodes.size(); ++i)
        CHECK((sys.free_of_node[i] < 0) == constrained[i]);
    for (int f = 0; f < sys.K.dimension(); ++f)
        CHECK(sys.free_of_node[sys.node_of_free[f]] == f);
}

TEST_CASE("per-marker types and the symmetry plane override") {
    Mesh m = generate_rectangle(1.0, 0.5, 0.1, 1, 2, 3, 4);
    BoundaryCondition bc;
    bc.default_type = BcType::Dirichlet;
    bc.by_marker[1] = BcType::Neumann;  // left side free
    AssembledSystem sys = assemble(m, bc);
    for (size_t i = 0; i < m.nodes.size(); ++i) {
        const Vec2& p = m.nodes[i];
        const bool on_left = std::abs(p.x) < 1e-12;
        const bool on_other = std::abs(p.x - 1.0) < 1e-12 || std::abs(p.y) < 1e-12 ||
                              std::abs(p.y - 0.5) < 1e-12;
        if (on_left && !on_other) CHECK(sys.free_of_node[i] >= 0);
        if (on_other) CHECK(sys.free_of_node[i] < 0);
    }

    BoundaryCondition sym = BoundaryCondition::all_neumann();
    sym.symmetry_plane = Line{{0.5, 0.0}, {0.0, 1.0}};
    AssembledSystem half = assemble(m, sym);
    for (size_t i = 0; i < m.nodes.size(); ++i)
        CHECK((half.free_of_node[i] < 0) == (std::abs(m.nodes[i].x - 0.5) < 1e-9));
}

TEST_CASE("parallel assembly is bit-identical to the serial reference") {
    Mesh m = generate(build_catalog_domain('h'), 0.15);
    m = refine(m);
    AssembledSystem par = assemble(m, BoundaryCondition::all_dirichlet());
    AssembledSystem ser = assemble_serial(m, BoundaryCondition::all_dirichlet());
    REQUIRE(par.K.dimension() == ser.K.dimension());
    CHECK(par.free_of_node == ser.free_of_node);
    Eigen::SparseMatrix<double> dk = par.K.mat - ser.K.mat;
    Eigen::SparseMatrix<double> dm = par.M.mat - ser.M.mat;
    dk.prune(0.0);
    dm.prune(0.0);
    CHECK(dk.nonZeros() == 0);
    CHECK(dm.nonZeros() == 0);
}

TEST_CASE("stiffness is positive semidefinite and symmetric") {
    Mesh m = generate(build_catalog_domain('c'), 0.15);
    AssembledSystem sys = assemble(m, BoundaryCondition::all_dirichlet());
    Eigen::SparseMatrix<double> kt = Eigen::SparseMatrix<double>(sys.K.mat.transpose()) - sys.K.mat;
    kt.prune([](int, int, double v) { return std::abs(v) > 1e-14; });
    CHECK(kt.nonZeros() == 0);
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(sys.K.dimension(), -1.0, 1.0);
    CHECK(v.dot(sys.K.mat * v) >= 0.0);
    CHECK(v.dot(sys.M.mat * v) > 0.0);
}
