// Compares the OpenMP element-loop assembly against the serial reference
// and verifies that both produce identical matrices.
#include <chrono>
#include <cstdio>
#include <string>

#include "branchlap/fem.hpp"
#include "branchlap/mesh.hpp"

using namespace branchlap;
using clk = std::chrono::steady_clock;

int main(int argc, char** argv) {
    const char shape = argc > 1 ? argv[1][0] : 'a';
    const int level = argc > 2 ? std::stoi(argv[2]) : 5;
    const int reps = argc > 3 ? std::stoi(argv[3]) : 5;

    Mesh mesh = generate(build_catalog_domain(shape), 0.15);
    for (int i = 0; i < level; ++i) mesh = refine(mesh);
    std::printf("shape %c level %d: %zu triangles, %zu nodes\n", shape, level,
                mesh.triangles.size(), mesh.nodes.size());

    const BoundaryCondition bc = BoundaryCondition::all_dirichlet();
    AssembledSystem ser = assemble_serial(mesh, bc);  // warm-up + reference
    AssembledSystem par = assemble(mesh, bc);

    Eigen::SparseMatrix<double> dk = par.K.mat - ser.K.mat;
    dk.prune(0.0);
    std::printf("parallel vs serial: %s\n",
                dk.nonZeros() == 0 ? "bit-identical" : "MISMATCH");

    double t_ser = 1e300, t_par = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        AssembledSystem s = assemble_serial(mesh, bc);
        auto t1 = clk::now();
        AssembledSystem p = assemble(mesh, bc);
        auto t2 = clk::now();
        t_ser = std::min(t_ser, std::chrono::duration<double>(t1 - t0).count());
        t_par = std::min(t_par, std::chrono::duration<double>(t2 - t1).count());
    }
    std::printf("assemble_serial: %8.1f ms\n", t_ser * 1e3);
    std::printf("assemble (omp):  %8.1f ms   speedup %.2fx\n", t_par * 1e3, t_ser / t_par);
    return dk.nonZeros() == 0 ? 0 : 1;
}
