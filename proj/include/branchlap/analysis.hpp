#pragma once

#include <iosfwd>
#include <vector>

#include "branchlap/eigensolver.hpp"
#include "branchlap/fem.hpp"
#include "branchlap/geometry.hpp"
#include "branchlap/mesh.hpp"

namespace branchlap {

struct DecayProfile {
    enum class Kind { J_subregion, I_cross_section };
    int mode = 0;           // 1-based
    double lambda = 0.0;
    std::vector<double> x0;
    std::vector<double> values;
    Kind kind = Kind::J_subregion;
    bool arc_length = false;  // x0 is r*phi for curvilinear branches
};

struct BoundReport {
    int mode = 0;
    double mu = 0.0;
    double gamma = 0.0;  // sqrt(mu - lambda), defined when applicable
    bool applicable = false;
    bool sharp_rate_proven = false;  // non-increasing branch: 2*gamma applies
    std::vector<double> hard_bound;   // J(0) * exp(-sqrt(2)*gamma*x0)
    std::vector<double> sharp_bound;  // J(0) * exp(-2*gamma*x0)
    std::vector<std::pair<double, double>> violations;        // hard bound: (x0, ratio)
    std::vector<std::pair<double, double>> sharp_violations;  // sharp rate
    double fitted_rate = 0.0;
    double fit_lo = 0.0, fit_hi = 0.0;
    double fit_r2 = 0.0;
};

struct FitResult {
    double rate = 0.0;
    double x_lo = 0.0, x_hi = 0.0;
    double r2 = 0.0;
    int npoints = 0;
};

struct MaslovReport {
    struct Point {
        double x0 = 0.0, lhs = 0.0, rhs = 0.0;
        bool pass = false;
    };
    std::vector<Point> points;
    double pass_fraction = 0.0;
};

enum class Symmetry { Symmetric, Antisymmetric, None };

struct SymmetryReport {
    Symmetry cls = Symmetry::None;
    double score_sym = 0.0;
    double score_anti = 0.0;
};

struct RayleighReport {
    double kappa1 = 0.0;   // first eigenvalue of the basic domain alone
    double lambda1 = 0.0;  // first eigenvalue of the full domain
    bool pass = false;     // lambda1 < kappa1
    int basic_below_mu = 0;
    int full_below_mu = 0;
    bool count_pass = false;
};

struct BifurcationReport {
    double nu1 = 0.0;      // pi^2/h^2 + pi^2/(2w)^2
    double mu = 0.0;       // pi^2/b^2
    double nu1_fem = 0.0;  // mixed-bc FEM validation
    bool pass = false;     // nu1 > mu
};

std::vector<double> uniform_grid(double lo, double hi, int n);

/// Point location + P1 interpolation over a mesh, bucketed for speed.
class MeshLocator {
  public:
    explicit MeshLocator(const Mesh& mesh);
    /// Triangle containing p (barycentric within tol), or -1.
    int find(const Vec2& p) const;
    double interpolate(const std::vector<double>& u, const Vec2& p) const;

  private:
    const Mesh& mesh_;
    Vec2 lo_, hi_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

/// Squared L2 norm of mode `u` over the sub-branch {x > x0}, per grid point.
/// Exact triangle/half-plane clipping with vertex quadrature
/// (S(T)/3 * sum of squared vertex values); `literal_rule` switches to
/// all-or-nothing triangle inclusion by centroid.
DecayProfile profile_J(const Mesh& mesh, const std::vector<double>& u, double lambda, int mode,
                       const DomainSpec& spec, const std::vector<double>& grid,
                       bool literal_rule = false);

/// Line integral of u^2 over the cross-section at each grid point.
DecayProfile profile_I(const Mesh& mesh, const std::vector<double>& u, double lambda, int mode,
                       const DomainSpec& spec, const std::vector<double>& grid);

BoundReport bound_report(const DecayProfile& profile, const ThresholdReport& threshold,
                         double tolerance = 0.02);

/// Log-linear least squares on grid points with J/J(0) in [floor, cap].
FitResult fit_decay_rate(const DecayProfile& profile, double floor_rel = 1e-9,
                         double cap_rel = 1e-1);
FitResult fit_decay_rate_window(const DecayProfile& profile, double x_lo, double x_hi);

/// Rate fit against the finite-branch profile shape
/// F_beta(x0) = sinh(beta (a - x0)) / (2 beta) - (a - x0)/2, which a single
/// evanescent mode follows exactly; robust where the plain log slope is
/// biased by the sinh endpoint correction (small beta * a).
FitResult fit_decay_rate_finite(const DecayProfile& profile, double branch_length,
                                double floor_rel = 1e-9, double cap_rel = 1e-1);

/// Second-difference check of I'' >= c * gamma^2 * I on a coarsened grid.
MaslovReport maslov_check(const DecayProfile& profile_I, double gamma, double c,
                          double tolerance = 0.2, int coarsen = 4);

/// Mirror u across the axis line and compare (interpolated); the axis must
/// be a symmetry of the domain polygons.
SymmetryReport symmetry_classify(const Mesh& mesh, const std::vector<double>& u,
                                 const DomainSpec& spec, const Line& axis);

/// Domain monotonicity: first eigenvalue of the full domain lies below that
/// of the basic domain alone; counts of modes below mu compared too.
RayleighReport rayleigh_check(const DomainSpec& spec, int level, int k);

/// nu1 = pi^2/h^2 + pi^2/(2w)^2 vs mu = pi^2/b^2, with a mixed
/// Dirichlet/Neumann FEM validation of nu1 on the w x h rectangle.
BifurcationReport bifurcation_criterion(double b, double h, double w, int level = 3);

/// CSV with columns x0, J, hard_bound, sharp_bound, I (empty cells where a
/// series is absent).
void write_profile_csv(std::ostream& os, const DecayProfile& J, const BoundReport* bounds,
                       const DecayProfile* I);

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
