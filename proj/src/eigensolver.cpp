#include "branchlap/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace branchlap {

namespace {

constexpr double kResidualTol = 1e-8;
constexpr double kDegenerateGap = 1e-6;

// deterministic start vector: smooth with a fixed aperiodic perturbation
Eigen::VectorXd start_vector(int n, int seed_index) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = 1.0 + 0.5 * std::sin((i + 1) * (0.7548776662 + 0.1 * seed_index));
    return v;
}

struct LanczosResult {
    std::vector<double> lambda;
    Eigen::MatrixXd vectors;  // columns
};

LanczosResult lanczos_shift_invert(const Eigen::SparseMatrix<double>& K,
                                   const Eigen::SparseMatrix<double>& M, int k, double shift) {
    const int n = static_cast<int>(K.rows());
    Eigen::SparseMatrix<double> S = K - shift * M;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    double sigma = shift;
    for (int attempt = 0;; ++attempt) {
        ldlt.compute(S);
        if (ldlt.info() == Eigen::Success) break;
        if (attempt >= 3) throw SolverError("factorization of K - shift*M failed");
        sigma -= std::max(1e-6, std::abs(sigma) * 1e-3);
        S = K - sigma * M;
    }

    const int m_max = std::min(n, std::max(4 * k + 60, 80));
    std::vector<Eigen::VectorXd> V;
    std::vector<double> alpha, beta;  // beta[j] couples v_j and v_{j+1}

    auto m_dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(M * b);
    };

    // M-orthonormal start
    {
        Eigen::VectorXd v = start_vector(n, 0);
        const double nrm = std::sqrt(m_dot(v, v));
        V.push_back(v / nrm);
    }

    int converged_upto = 0;
    LanczosResult out;
    auto evaluate_ritz = [&]() {
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // largest theta <-> smallest lambda
        std::vector<int> order(m);
        for (int i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return es.eigenvalues()[x] > es.eigenvalues()[y]; });

        const int want = std::min(k, m);
        converged_upto = 0;
        LanczosResult cand;
        cand.vectors.resize(n, want);
        for (int idx = 0; idx < want; ++idx) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) x += es.eigenvectors()(i, order[idx]) * V[i];
            const double xm = std::sqrt(m_dot(x, x));
            x /= xm;
            const double lam = x.dot(K * x) / x.dot(M * x);
            const Eigen::VectorXd r = K * x - lam * (M * x);
            // scale stays bounded for near-null modes (Neumann constant)
            const double rel =
                r.norm() / std::max(1e-300, (K * x).norm() + (1.0 + std::abs(lam)) * (M * x).norm());
            cand.lambda.push_back(lam);
            cand.vectors.col(idx) = x;
            if (rel <= kResidualTol && converged_upto == idx) converged_upto = idx + 1;
        }
        out = std::move(cand);
        return converged_upto >= std::min(k, m);
    };

    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXd w = ldlt.solve(M * V[j]);
        const double a = m_dot(w, V[j]);
        alpha.push_back(a);
        w -= a * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& vi : V) w -= m_dot(w, vi) * vi;
        double b = std::sqrt(std::max(0.0, m_dot(w, w)));
        bool exhausted = false;
        if (b < 1e-13) {
            // invariant subspace hit; restart with a fresh direction
            Eigen::VectorXd r = start_vector(n, j + 1);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& vi : V) r -= m_dot(r, vi) * vi;
            const double rn = std::sqrt(std::max(0.0, m_dot(r, r)));
            if (rn < 1e-13) {
                exhausted = true;  // V spans the whole space
            } else {
                w = r / rn;
                b = 0.0;
            }
        } else {
            w /= b;
        }
        beta.push_back(exhausted ? 0.0 : b);
        if (!exhausted) V.push_back(w);

        const int m = static_cast<int>(alpha.size());
        if (m >= std::min(k, n) && (m % 5 == 0 || m == m_max || exhausted)) {
            if (evaluate_ritz()) break;
        }
        if (exhausted) break;
    }
    if (converged_upto < std::min(k, n))
        throw SolverError("eigensolver did not converge to the requested tolerance");
    if (static_cast<int>(out.lambda.size()) < k)
        throw SolverError("eigensolver returned fewer modes than requested");
    return out;
}

}  // namespace

std::vector<EigenPair> solve_lowest(const SparseSymmetric& K, const SparseSymmetric& M, int k,
                                    double shift) {
    const int n = K.dimension();
    if (k < 1) throw SolverError("k must be >= 1");
    if (k > n) throw SolverError("requested more modes than degrees of freedom");

    LanczosResult res = lanczos_shift_invert(K.mat, M.mat, k, shift);

    std::vector<EigenPair> pairs(k);
    for (int i = 0; i < k; ++i) {
        EigenPair& p = pairs[i];
        p.lambda = res.lambda[i];
        p.vector = res.vectors.col(i);
        p.index = i + 1;
        // deterministic sign: largest-magnitude entry positive
        int imax = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(p.vector[j]) > std::abs(p.vector[imax])) imax = j;
        if (p.vector[imax] < 0) p.vector = -p.vector;
        const Eigen::VectorXd r = K.mat * p.vector - p.lambda * (M.mat * p.vector);
        p.residual_norm =
            r.norm() / std::max(1e-300, (K.mat * p.vector).norm() +
                                            (1.0 + std::abs(p.lambda)) * (M.mat * p.vector).norm());
    }
    for (int i = 0; i < k; ++i) {
        const double lam = std::max(std::abs(pairs[i].lambda), 1e-12);
        if (i > 0 && std::abs(pairs[i].lambda - pairs[i - 1].lambda) < kDegenerateGap * lam)
            pairs[i].degenerate = pairs[i - 1].degenerate = true;
    }
    return pairs;
}

ModeSet solve_modes(const Mesh& mesh, const BoundaryCondition& bc, int k, double shift) {
    const AssembledSystem sys = assemble(mesh, bc);
    const auto pairs = solve_lowest(sys.K, sys.M, k, shift);

    ModeSet set;
    set.geometry_hash = mesh_hash(mesh);
    set.level = mesh.level;
    set.bc_label = bc.default_type == BcType::Dirichlet ? "dirichlet" : "neumann";
    for (const auto& p : pairs) {
        ModeSet::Mode m;
        m.lambda = p.lambda;
        m.residual_norm = p.residual_norm;
        m.degenerate = p.degenerate;
        m.u.assign(mesh.nodes.size(), 0.0);
        for (size_t i = 0; i < mesh.nodes.size(); ++i) {
            const int fi = sys.free_of_node[i];
            if (fi >= 0) m.u[i] = p.vector[fi];
        }
        set.modes.push_back(std::move(m));
    }
    return set;
}

std::uint64_t mesh_hash(const Mesh& mesh) {
    // FNV-1a over the node coordinates and connectivity
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& p : mesh.nodes) mix(&p, sizeof(p));
    for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
    mix(&mesh.level, sizeof(mesh.level));
    return h;
}

void save_modes(const std::string& path, const ModeSet& set) {
    std::ofstream os(path);
    if (!os) throw SolverError("cannot open " + path + " for writing");
    os << "branchlap-modes 1\n";
    os << std::setprecision(17);
    os << set.geometry_hash << " " << set.level << " " << set.bc_label << " " << set.modes.size()
       << "\n";
    for (const auto& m : set.modes) {
        os << m.lambda << " " << m.residual_norm << " " << (m.degenerate ? 1 : 0) << " "
           << m.u.size() << "\n";
        for (double v : m.u) os << v << "\n";
    }
}

ModeSet load_modes(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SolverError("cannot open " + path);
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "branchlap-modes" || version != 1) throw SolverError("unrecognized mode file");
    ModeSet set;
    size_t nmodes = 0;
    is >> set.geometry_hash >> set.level >> set.bc_label >> nmodes;
    set.modes.resize(nmodes);
    for (auto& m : set.modes) {
        int deg = 0;
        size_t nu = 0;
        is >> m.lambda >> m.residual_norm >> deg >> nu;
        m.degenerate = deg != 0;
        m.u.resize(nu);
        for (double& v : m.u) is >> v;
    }
    if (!is) throw SolverError("truncated mode file");
    return set;
}

}  // namespace branchlap
