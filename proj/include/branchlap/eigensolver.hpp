#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchlap/fem.hpp"

namespace branchlap {

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd vector;      // free-node coefficients, M-normalized
    int index = 0;               // 1-based, ascending by lambda
    double residual_norm = 0.0;  // ||K u - lambda M u|| / ||K u||
    bool degenerate = false;     // gap to a neighbor < 1e-6 * lambda
};

/// Lowest k eigenpairs of K u = lambda M u via shift-invert Lanczos with
/// full reorthogonalization in the M-inner product; `shift` must lie below
/// the smallest eigenvalue (0 for Dirichlet, small negative for Neumann).
std::vector<EigenPair> solve_lowest(const SparseSymmetric& K, const SparseSymmetric& M, int k,
                                    double shift = 0.0);

/// Eigenpairs extended to nodal vectors (zeros on Dirichlet nodes).
struct ModeSet {
    struct Mode {
        double lambda = 0.0;
        std::vector<double> u;  // one value per mesh node
        double residual_norm = 0.0;
        bool degenerate = false;
    };
    std::vector<Mode> modes;
    std::uint64_t geometry_hash = 0;
    int level = 0;
    std::string bc_label;
};

ModeSet solve_modes(const Mesh& mesh, const BoundaryCondition& bc, int k, double shift = 0.0);

std::uint64_t mesh_hash(const Mesh& mesh);

void save_modes(const std::string& path, const ModeSet& set);
ModeSet load_modes(const std::string& path);

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
