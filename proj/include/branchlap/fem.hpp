#pragma once

#include <iosfwd>
#include <map>
#include <optional>

#include <Eigen/Sparse>

#include "branchlap/mesh.hpp"

namespace branchlap {

enum class BcType { Dirichlet, Neumann };

/// A line in the plane, used for symmetry-plane Dirichlet overrides and
/// symmetry classification.
struct Line {
    Vec2 point;
    Vec2 direction;
};

struct BoundaryCondition {
    BcType default_type = BcType::Dirichlet;
    std::map<int, BcType> by_marker;
    /// Nodes on this line are forced Dirichlet (half-domain runs).
    std::optional<Line> symmetry_plane;
    double plane_tol = 1e-9;

    static BoundaryCondition all_dirichlet() { return {}; }
    static BoundaryCondition all_neumann() { return {BcType::Neumann, {}, {}, 1e-9}; }

    BcType type_for(int marker) const {
        auto it = by_marker.find(marker);
        return it == by_marker.end() ? default_type : it->second;
    }
};

struct SparseSymmetric {
    Eigen::SparseMatrix<double> mat;  // full symmetric storage

    int dimension() const { return static_cast<int>(mat.rows()); }
    void write_coo(std::ostream& os) const;
};

struct AssembledSystem {
    SparseSymmetric K;               // stiffness on free nodes
    SparseSymmetric M;               // mass on free nodes
    std::vector<int> free_of_node;   // node index -> free index, -1 if Dirichlet
    std::vector<int> node_of_free;
};

/// P1 Galerkin assembly restricted to free nodes; element loops run in
/// parallel, accumulation order is fixed by element index so results are
/// bit-identical to assemble_serial.
AssembledSystem assemble(const Mesh& mesh, const BoundaryCondition& bc);

/// Single-threaded reference used by tests and the assembly benchmark.
AssembledSystem assemble_serial(const Mesh& mesh, const BoundaryCondition& bc);

class FemError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
