#include "branchlap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace branchlap {

namespace {

constexpr double kPi = std::numbers::pi;

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

// Rectangular-branch geometry in chart coordinates: [0, a] x [t0, t0 + b].
struct ChartRect {
    double a, b, t0;
};

ChartRect chart_rect(const DomainSpec& spec) {
    if (spec.axis.kind != AxisKind::Cartesian)
        throw OracleError("series solution requires a straight rectangular branch");
    double tlo = 1e300, thi = -1e300;
    for (const Vec2& p : spec.branch) {
        const Vec2 q = to_branch_chart(spec, p);
        if (q.x > 1e-9 && q.x < spec.axis.length - 1e-9)
            throw OracleError("series solution requires a straight rectangular branch");
        tlo = std::min(tlo, q.y);
        thi = std::max(thi, q.y);
    }
    return {spec.axis.length, thi - tlo, tlo};
}

}  // namespace

double SeriesSolution::evaluate(double x, double t) const {
    double s = 0.0;
    for (size_t n = 1; n <= c.size(); ++n) {
        if (c[n - 1] == 0.0) continue;
        s += c[n - 1] * std::sinh(gamma[n - 1] * (a - x)) * std::sin(kPi * n * (t - t0) / b);
    }
    return s;
}

std::vector<RectMode> rectangle_spectrum(double width, double height, int k) {
    if (width <= 0 || height <= 0 || k < 1) throw OracleError("bad rectangle spectrum request");
    // enough index range to cover the k smallest
    const double lmax_guess = kPi * kPi * (1.0 / (width * width) + 1.0 / (height * height)) *
                              (k + 4.0) * (k + 4.0);
    std::vector<RectMode> modes;
    const int mmax = static_cast<int>(std::sqrt(lmax_guess) * width / kPi) + 2;
    const int nmax = static_cast<int>(std::sqrt(lmax_guess) * height / kPi) + 2;
    for (int m = 1; m <= mmax; ++m)
        for (int n = 1; n <= nmax; ++n)
            modes.push_back(
                {kPi * kPi * (m * m / (width * width) + n * n / (height * height)), m, n});
    std::stable_sort(modes.begin(), modes.end(),
                     [](const RectMode& x, const RectMode& y) { return x.lambda < y.lambda; });
    modes.resize(k);
    return modes;
}

SeriesSolution fit_series(const Mesh& mesh, const std::vector<double>& u, double lambda,
                          const DomainSpec& spec, int N) {
    const ChartRect r = chart_rect(spec);
    if (lambda >= kPi * kPi / (r.b * r.b))
        throw OracleError("lambda at or above the cutoff pi^2/b^2; series is not evanescent");

    // junction trace: mesh nodes on the chart line x = 0 inside the opening
    std::vector<std::pair<double, double>> trace;  // (t, u)
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Vec2 q = to_branch_chart(spec, mesh.nodes[i]);
        if (std::abs(q.x) > 1e-9) continue;
        if (q.y < r.t0 - 1e-9 || q.y > r.t0 + r.b + 1e-9) continue;
        trace.emplace_back(q.y, u[i]);
    }
    std::sort(trace.begin(), trace.end());
    if (trace.size() < 4) throw OracleError("junction trace has too few nodes");

    SeriesSolution sol;
    sol.a = r.a;
    sol.b = r.b;
    sol.t0 = r.t0;
    sol.lambda = lambda;
    const int nmax = std::min<int>(N, static_cast<int>(trace.size()));
    for (int n = 1; n <= nmax; ++n) {
        const double g2 = kPi * n / r.b * (kPi * n / r.b) - lambda;
        const double g = std::sqrt(g2);
        // composite trapezoid of u(0,t) sin(pi n (t-t0)/b)
        double integral = 0.0;
        for (size_t i = 0; i + 1 < trace.size(); ++i) {
            const double dt = trace[i + 1].first - trace[i].first;
            const double fa = trace[i].second * std::sin(kPi * n * (trace[i].first - r.t0) / r.b);
            const double fb =
                trace[i + 1].second * std::sin(kPi * n * (trace[i + 1].first - r.t0) / r.b);
            integral += 0.5 * dt * (fa + fb);
        }
        const double sinh_ga = std::sinh(g * r.a);
        sol.gamma.push_back(g);
        // overflow-safe: for large g*a the transform itself carries the sinh
        sol.c.push_back(std::isfinite(sinh_ga) && sinh_ga > 0.0
                            ? (2.0 / r.b) * integral / sinh_ga
                            : 0.0);
    }
    return sol;
}

DecayProfile series_decay_curve(const SeriesSolution& sol, const std::vector<double>& grid) {
    DecayProfile prof;
    prof.kind = DecayProfile::Kind::J_subregion;
    prof.lambda = sol.lambda;
    prof.x0 = grid;
    prof.values.assign(grid.size(), 0.0);
    for (size_t g = 0; g < grid.size(); ++g) {
        const double delta = std::max(0.0, sol.a - grid[g]);
        double J = 0.0;
        for (size_t n = 0; n < sol.c.size(); ++n) {
            const double gam = sol.gamma[n];
            const double term = std::sinh(2.0 * gam * delta) / (4.0 * gam) - delta / 2.0;
            J += sol.c[n] * sol.c[n] * (sol.b / 2.0) * term;
        }
        prof.values[g] = J;
    }
    return prof;
}

double series_l2_error(const Mesh& mesh, const std::vector<double>& u, const DomainSpec& spec,
                       const SeriesSolution& sol) {
    double err2 = 0.0, ref2 = 0.0;
    for (const auto& tr : mesh.triangles) {
        const Vec2 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
        const Vec2 cen = (p0 + p1 + p2) / 3.0;
        if (point_in_polygon(spec.basic, cen)) continue;
        const double area = tri_area(p0, p1, p2);
        // edge-midpoint quadrature, exact for quadratics
        const Vec2 mids[3] = {(p0 + p1) * 0.5, (p1 + p2) * 0.5, (p2 + p0) * 0.5};
        const double umid[3] = {0.5 * (u[tr[0]] + u[tr[1]]), 0.5 * (u[tr[1]] + u[tr[2]]),
                                0.5 * (u[tr[2]] + u[tr[0]])};
        for (int i = 0; i < 3; ++i) {
            const Vec2 q = to_branch_chart(spec, mids[i]);
            const double us = sol.evaluate(q.x, q.y);
            err2 += area / 3.0 * (umid[i] - us) * (umid[i] - us);
            ref2 += area / 3.0 * umid[i] * umid[i];
        }
    }
    if (ref2 <= 0.0) throw OracleError("mode vanishes on the branch");
    return std::sqrt(err2 / ref2);
}

}  // namespace branchlap
