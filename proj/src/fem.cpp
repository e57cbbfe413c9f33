#include "branchlap/fem.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace branchlap {

namespace {

struct ElementMatrices {
    double K[3][3];
    double M[3][3];
};

ElementMatrices element_matrices(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const double area = 0.5 * cross(p1 - p0, p2 - p0);
    if (area <= 0.0) throw FemError("non-positive element area");
    // grad of the P1 basis: perpendicular of the opposite edge / (2 area)
    const Vec2 g[3] = {perp(p2 - p1) / (2 * area), perp(p0 - p2) / (2 * area),
                       perp(p1 - p0) / (2 * area)};
    ElementMatrices em;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            em.K[i][j] = area * dot(g[i], g[j]);
            em.M[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
        }
    return em;
}

std::vector<bool> dirichlet_nodes(const Mesh& mesh, const BoundaryCondition& bc) {
    std::vector<bool> fixed(mesh.nodes.size(), false);
    for (const auto& e : mesh.boundary_edges) {
        if (bc.type_for(e.marker) == BcType::Dirichlet) fixed[e.a] = fixed[e.b] = true;
    }
    for (const auto& e : mesh.slit_edges) fixed[e.a] = fixed[e.b] = true;
    if (bc.symmetry_plane) {
        const Line& L = *bc.symmetry_plane;
        const Vec2 d = normalized(L.direction);
        for (size_t i = 0; i < mesh.nodes.size(); ++i) {
            if (std::abs(cross(d, mesh.nodes[i] - L.point)) <= bc.plane_tol) fixed[i] = true;
        }
    }
    return fixed;
}

AssembledSystem assemble_impl(const Mesh& mesh, const BoundaryCondition& bc, bool parallel) {
    mesh.check_valid();
    const auto fixed = dirichlet_nodes(mesh, bc);

    AssembledSystem sys;
    sys.free_of_node.assign(mesh.nodes.size(), -1);
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        if (!fixed[i]) {
            sys.free_of_node[i] = static_cast<int>(sys.node_of_free.size());
            sys.node_of_free.push_back(static_cast<int>(i));
        }
    }
    const int nfree = static_cast<int>(sys.node_of_free.size());
    if (nfree == 0) throw FemError("no free nodes after applying boundary conditions");

    const auto ntri = mesh.triangles.size();
    std::vector<ElementMatrices> elems(ntri);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long t = 0; t < static_cast<long long>(ntri); ++t) {
            const auto& tri = mesh.triangles[t];
            elems[t] = element_matrices(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
        }
    } else {
        for (size_t t = 0; t < ntri; ++t) {
            const auto& tri = mesh.triangles[t];
            elems[t] = element_matrices(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
        }
    }

    // accumulation in fixed element order, so results are reproducible
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(ntri * 9);
    mt.reserve(ntri * 9);
    for (size_t t = 0; t < ntri; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int fi = sys.free_of_node[tri[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int fj = sys.free_of_node[tri[j]];
                if (fj < 0) continue;
                kt.emplace_back(fi, fj, elems[t].K[i][j]);
                mt.emplace_back(fi, fj, elems[t].M[i][j]);
            }
        }
    }
    sys.K.mat.resize(nfree, nfree);
    sys.M.mat.resize(nfree, nfree);
    sys.K.mat.setFromTriplets(kt.begin(), kt.end());
    sys.M.mat.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

}  // namespace

void SparseSymmetric::write_coo(std::ostream& os) const {
    os << std::setprecision(17);
    os << mat.rows() << " " << mat.cols() << " " << mat.nonZeros() << "\n";
    for (int k = 0; k < mat.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

AssembledSystem assemble(const Mesh& mesh, const BoundaryCondition& bc) {
    return assemble_impl(mesh, bc, true);
}

AssembledSystem assemble_serial(const Mesh& mesh, const BoundaryCondition& bc) {
    return assemble_impl(mesh, bc, false);
}

}  // namespace branchlap
