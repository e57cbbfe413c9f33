#include "branchlap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

namespace branchlap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroTol = 1e-12;
constexpr double kWindowFloor = 1e-9;
constexpr double kWindowCap = 1e-1;

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

// Linear functional s(p) whose positive side is the sub-branch {x > x0};
// for curvilinear branches this is the half-plane bounded by the radial ray.
struct SectionCut {
    Vec2 grad;
    double offset = 0.0;
    double operator()(const Vec2& p) const { return dot(grad, p) + offset; }
};

SectionCut section_cut(const DomainSpec& spec, double x0) {
    const BranchAxis& ax = spec.axis;
    SectionCut cut;
    if (ax.kind == AxisKind::Cartesian) {
        cut.grad = ax.direction;
        cut.offset = -dot(ax.origin, ax.direction) - x0;
    } else {
        const double sgn = (ax.angle_end - ax.angle_begin) >= 0 ? 1.0 : -1.0;
        const double phi0 = ax.angle_begin + sgn * x0 / ax.radius;
        const Vec2 d{std::cos(phi0), std::sin(phi0)};
        cut.grad = Vec2{-d.y, d.x} * sgn;
        cut.offset = -dot(cut.grad, ax.center);
    }
    return cut;
}

// area fraction of triangle (p0,p1,p2) on the side {s > 0}
double clipped_fraction(const Vec2 p[3], const double s[3]) {
    Vec2 poly[7];
    int np = 0;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        if (s[i] >= 0.0) poly[np++] = p[i];
        if ((s[i] > 0.0) != (s[j] > 0.0) && s[i] != s[j]) {
            const double t = s[i] / (s[i] - s[j]);
            if (t > 0.0 && t < 1.0) poly[np++] = p[i] + (p[j] - p[i]) * t;
        }
    }
    if (np < 3) return 0.0;
    double area2 = 0.0;
    for (int i = 0; i < np; ++i) area2 += cross(poly[i], poly[(i + 1) % np]);
    const double full2 = cross(p[1] - p[0], p[2] - p[0]);
    return std::clamp(area2 / full2, 0.0, 1.0);
}

struct BranchTriangles {
    std::vector<int> tri;                    // indices into mesh.triangles
    std::vector<double> xmin, xmax;          // chart-x range of the vertices
    std::vector<double> quad;                // S(T)/3 * sum_j u(v_j)^2
};

BranchTriangles collect_branch(const Mesh& mesh, const std::vector<double>& u,
                               const DomainSpec& spec) {
    BranchTriangles bt;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 cen = (mesh.nodes[tr[0]] + mesh.nodes[tr[1]] + mesh.nodes[tr[2]]) / 3.0;
        if (point_in_polygon(spec.basic, cen)) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i = 0; i < 3; ++i) {
            const double x = to_branch_chart(spec, mesh.nodes[tr[i]]).x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double area =
            tri_area(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
        double s2 = 0.0;
        for (int i = 0; i < 3; ++i) s2 += u[tr[i]] * u[tr[i]];
        bt.tri.push_back(static_cast<int>(t));
        bt.xmin.push_back(lo);
        bt.xmax.push_back(hi);
        bt.quad.push_back(area / 3.0 * s2);
    }
    if (bt.tri.empty()) throw AnalysisError("no branch triangles found");
    return bt;
}

void validate_grid(const DomainSpec& spec, const std::vector<double>& grid) {
    if (grid.empty()) throw AnalysisError("empty profile grid");
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i + 1] <= grid[i]) throw AnalysisError("profile grid must be ascending");
    if (grid.front() < -1e-9 || grid.back() > spec.axis.length + 1e-9)
        throw AnalysisError("profile grid outside the branch range");
}

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    if (sxx <= 0.0) throw AnalysisError("degenerate fit abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

std::vector<size_t> window_indices(const DecayProfile& p, double floor_rel, double cap_rel) {
    if (p.values.empty()) throw AnalysisError("empty profile");
    const double J0 = p.values.front();
    if (J0 <= 0.0) throw AnalysisError("profile vanishes at the branch entrance");
    std::vector<size_t> idx;
    for (size_t i = 0; i < p.values.size(); ++i) {
        const double rel = p.values[i] / J0;
        if (p.values[i] > 0.0 && rel >= floor_rel && rel <= cap_rel) idx.push_back(i);
    }
    return idx;
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2 || hi <= lo) throw AnalysisError("bad grid parameters");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(mesh) {
    lo_ = {1e300, 1e300};
    hi_ = {-1e300, -1e300};
    for (const auto& p : mesh.nodes) {
        lo_.x = std::min(lo_.x, p.x);
        lo_.y = std::min(lo_.y, p.y);
        hi_.x = std::max(hi_.x, p.x);
        hi_.y = std::max(hi_.y, p.y);
    }
    const int target = static_cast<int>(std::sqrt(double(mesh.triangles.size()))) + 1;
    nx_ = std::clamp(target, 1, 512);
    ny_ = nx_;
    buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
    auto bx = [&](double x) {
        return std::clamp(static_cast<int>((x - lo_.x) / (hi_.x - lo_.x) * nx_), 0, nx_ - 1);
    };
    auto by = [&](double y) {
        return std::clamp(static_cast<int>((y - lo_.y) / (hi_.y - lo_.y) * ny_), 0, ny_ - 1);
    };
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int i = 0; i < 3; ++i) {
            const Vec2& p = mesh.nodes[tr[i]];
            x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
        }
        for (int ix = bx(x0); ix <= bx(x1); ++ix)
            for (int iy = by(y0); iy <= by(y1); ++iy)
                buckets_[static_cast<size_t>(iy) * nx_ + ix].push_back(static_cast<int>(t));
    }
}

int MeshLocator::find(const Vec2& p) const {
    const int ix = std::clamp(static_cast<int>((p.x - lo_.x) / (hi_.x - lo_.x) * nx_), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>((p.y - lo_.y) / (hi_.y - lo_.y) * ny_), 0, ny_ - 1);
    for (int t : buckets_[static_cast<size_t>(iy) * nx_ + ix]) {
        const auto& tr = mesh_.triangles[t];
        const Vec2& a = mesh_.nodes[tr[0]];
        const Vec2& b = mesh_.nodes[tr[1]];
        const Vec2& c = mesh_.nodes[tr[2]];
        const double full = cross(b - a, c - a);
        const double w0 = cross(b - p, c - p) / full;
        const double w1 = cross(c - p, a - p) / full;
        const double w2 = cross(a - p, b - p) / full;
        if (w0 >= -1e-9 && w1 >= -1e-9 && w2 >= -1e-9) return t;
    }
    return -1;
}

double MeshLocator::interpolate(const std::vector<double>& u, const Vec2& p) const {
    const int t = find(p);
    if (t < 0) throw AnalysisError("interpolation point outside the mesh");
    const auto& tr = mesh_.triangles[t];
    const Vec2& a = mesh_.nodes[tr[0]];
    const Vec2& b = mesh_.nodes[tr[1]];
    const Vec2& c = mesh_.nodes[tr[2]];
    const double full = cross(b - a, c - a);
    const double w0 = cross(b - p, c - p) / full;
    const double w1 = cross(c - p, a - p) / full;
    const double w2 = cross(a - p, b - p) / full;
    return w0 * u[tr[0]] + w1 * u[tr[1]] + w2 * u[tr[2]];
}

DecayProfile profile_J(const Mesh& mesh, const std::vector<double>& u, double lambda, int mode,
                       const DomainSpec& spec, const std::vector<double>& grid,
                       bool literal_rule) {
    validate_grid(spec, grid);
    if (u.size() != mesh.nodes.size()) throw AnalysisError("mode vector does not match the mesh");
    const BranchTriangles bt = collect_branch(mesh, u, spec);

    DecayProfile prof;
    prof.mode = mode;
    prof.lambda = lambda;
    prof.kind = DecayProfile::Kind::J_subregion;
    prof.arc_length = spec.axis.kind == AxisKind::Curvilinear;
    prof.x0 = grid;
    prof.values.assign(grid.size(), 0.0);

    for (size_t g = 0; g < grid.size(); ++g) {
        const SectionCut cut = section_cut(spec, grid[g]);
        double sum = 0.0;
        for (size_t i = 0; i < bt.tri.size(); ++i) {
            if (bt.xmax[i] <= grid[g]) continue;
            double w = 1.0;
            if (bt.xmin[i] < grid[g]) {
                const auto& tr = mesh.triangles[bt.tri[i]];
                const Vec2 p[3] = {mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]};
                if (literal_rule) {
                    const Vec2 cen = (p[0] + p[1] + p[2]) / 3.0;
                    w = cut(cen) > 0.0 ? 1.0 : 0.0;
                } else {
                    const double s[3] = {cut(p[0]), cut(p[1]), cut(p[2])};
                    w = clipped_fraction(p, s);
                }
            }
            sum += w * bt.quad[i];
        }
        prof.values[g] = sum;
    }
    return prof;
}

DecayProfile profile_I(const Mesh& mesh, const std::vector<double>& u, double lambda, int mode,
                       const DomainSpec& spec, const std::vector<double>& grid) {
    validate_grid(spec, grid);
    if (u.size() != mesh.nodes.size()) throw AnalysisError("mode vector does not match the mesh");
    const BranchTriangles bt = collect_branch(mesh, u, spec);

    DecayProfile prof;
    prof.mode = mode;
    prof.lambda = lambda;
    prof.kind = DecayProfile::Kind::I_cross_section;
    prof.arc_length = spec.axis.kind == AxisKind::Curvilinear;
    prof.x0 = grid;
    prof.values.assign(grid.size(), 0.0);

    auto seg_integral = [](double len, double ua, double ub) {
        return len / 3.0 * (ua * ua + ua * ub + ub * ub);
    };

    for (size_t g = 0; g < grid.size(); ++g) {
        const SectionCut cut = section_cut(spec, grid[g]);
        double sum = 0.0;
        // edges lying exactly on the section line, integrated once each
        std::set<std::pair<int, int>> on_line;
        for (size_t i = 0; i < bt.tri.size(); ++i) {
            if (bt.xmax[i] < grid[g] - 1e-12 || bt.xmin[i] > grid[g] + 1e-12) continue;
            const auto& tr = mesh.triangles[bt.tri[i]];
            const Vec2 p[3] = {mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]};
            double s[3] = {cut(p[0]), cut(p[1]), cut(p[2])};
            const double scale = norm(p[1] - p[0]) + norm(p[2] - p[0]);
            for (double& v : s)
                if (std::abs(v) < 1e-12 * scale) v = 0.0;
            // collinear edge: both endpoints on the line
            bool handled = false;
            for (int e = 0; e < 3 && !handled; ++e) {
                const int a = e, b = (e + 1) % 3;
                if (s[a] == 0.0 && s[b] == 0.0) {
                    on_line.insert({std::min(tr[a], tr[b]), std::max(tr[a], tr[b])});
                    handled = true;
                }
            }
            if (handled) continue;
            // proper crossing: collect the (up to 2) intersection points
            Vec2 q[2];
            double uq[2];
            int nq = 0;
            for (int e = 0; e < 3 && nq < 2; ++e) {
                const int a = e, b = (e + 1) % 3;
                if (s[a] == 0.0) {
                    bool dup = false;
                    for (int j = 0; j < nq; ++j)
                        if (norm(q[j] - p[a]) < 1e-14) dup = true;
                    if (!dup) {
                        q[nq] = p[a];
                        uq[nq++] = u[tr[a]];
                    }
                } else if (s[b] != 0.0 && (s[a] > 0) != (s[b] > 0)) {
                    const double t = s[a] / (s[a] - s[b]);
                    q[nq] = p[a] + (p[b] - p[a]) * t;
                    uq[nq++] = u[tr[a]] + (u[tr[b]] - u[tr[a]]) * t;
                }
            }
            if (nq == 2) sum += seg_integral(norm(q[1] - q[0]), uq[0], uq[1]);
        }
        for (const auto& [a, b] : on_line)
            sum += seg_integral(norm(mesh.nodes[a] - mesh.nodes[b]), u[a], u[b]);
        prof.values[g] = sum;
    }
    return prof;
}

BoundReport bound_report(const DecayProfile& profile, const ThresholdReport& threshold,
                         double tolerance) {
    if (profile.values.empty()) throw AnalysisError("empty profile");
    BoundReport rep;
    rep.mode = profile.mode;
    rep.mu = threshold.mu;
    rep.applicable = profile.lambda < threshold.mu;
    rep.sharp_rate_proven = threshold.non_increasing;
    if (!rep.applicable) {
        // no bound claims; still record the empirical rate when fittable
        try {
            const FitResult f = fit_decay_rate(profile);
            rep.fitted_rate = f.rate;
            rep.fit_lo = f.x_lo;
            rep.fit_hi = f.x_hi;
            rep.fit_r2 = f.r2;
        } catch (const AnalysisError&) {
        }
        return rep;
    }
    rep.gamma = std::sqrt(threshold.mu - profile.lambda);
    const double J0 = profile.values.front();
    const double x_first = profile.x0.front();
    rep.hard_bound.resize(profile.x0.size());
    rep.sharp_bound.resize(profile.x0.size());
    const double beta_hard = std::sqrt(2.0) * rep.gamma;
    const double beta_sharp = 2.0 * rep.gamma;
    for (size_t i = 0; i < profile.x0.size(); ++i) {
        const double dx = profile.x0[i] - x_first;
        rep.hard_bound[i] = J0 * std::exp(-beta_hard * dx);
        rep.sharp_bound[i] = J0 * std::exp(-beta_sharp * dx);
    }
    for (size_t i : window_indices(profile, kWindowFloor, kWindowCap)) {
        const double rh = profile.values[i] / rep.hard_bound[i];
        if (rh > 1.0 + tolerance) rep.violations.emplace_back(profile.x0[i], rh);
        const double rs = profile.values[i] / rep.sharp_bound[i];
        if (rs > 1.0 + tolerance) rep.sharp_violations.emplace_back(profile.x0[i], rs);
    }
    try {
        const FitResult f = fit_decay_rate(profile);
        rep.fitted_rate = f.rate;
        rep.fit_lo = f.x_lo;
        rep.fit_hi = f.x_hi;
        rep.fit_r2 = f.r2;
    } catch (const AnalysisError&) {
    }
    return rep;
}

FitResult fit_decay_rate(const DecayProfile& profile, double floor_rel, double cap_rel) {
    const auto idx = window_indices(profile, floor_rel, cap_rel);
    if (idx.size() < 4) throw AnalysisError("fewer than 4 grid points in the fit window");
    std::vector<double> x, y;
    for (size_t i : idx) {
        x.push_back(profile.x0[i]);
        y.push_back(std::log(profile.values[i]));
    }
    const LinearFit f = least_squares(x, y);
    return {-f.slope, x.front(), x.back(), f.r2, static_cast<int>(x.size())};
}

FitResult fit_decay_rate_window(const DecayProfile& profile, double x_lo, double x_hi) {
    std::vector<double> x, y;
    for (size_t i = 0; i < profile.x0.size(); ++i) {
        if (profile.x0[i] < x_lo || profile.x0[i] > x_hi || profile.values[i] <= 0.0) continue;
        x.push_back(profile.x0[i]);
        y.push_back(std::log(profile.values[i]));
    }
    if (x.size() < 4) throw AnalysisError("fewer than 4 grid points in the fit window");
    const LinearFit f = least_squares(x, y);
    return {-f.slope, x.front(), x.back(), f.r2, static_cast<int>(x.size())};
}

FitResult fit_decay_rate_finite(const DecayProfile& profile, double branch_length,
                                double floor_rel, double cap_rel) {
    const auto idx0 = window_indices(profile, floor_rel, cap_rel);
    std::vector<double> x, y;
    for (size_t i : idx0) {
        if (branch_length - profile.x0[i] < 1e-9) continue;
        x.push_back(profile.x0[i]);
        y.push_back(std::log(profile.values[i]));
    }
    if (x.size() < 4) throw AnalysisError("fewer than 4 grid points in the fit window");

    auto sse = [&](double beta) {
        double mean = 0.0;
        std::vector<double> d(x.size());
        for (size_t i = 0; i < x.size(); ++i) {
            const double delta = branch_length - x[i];
            const double F = std::sinh(beta * delta) / (2.0 * beta) - delta / 2.0;
            d[i] = y[i] - std::log(std::max(F, 1e-300));
            mean += d[i];
        }
        mean /= d.size();
        double s = 0.0;
        for (double v : d) s += (v - mean) * (v - mean);
        return s;
    };

    // golden-section on log(beta)
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(1e-2), hi = std::log(1e3);
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = sse(std::exp(c1)), f2 = sse(std::exp(c2));
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = c2; c2 = c1; f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = sse(std::exp(c1));
        } else {
            lo = c1; c1 = c2; f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = sse(std::exp(c2));
        }
        if (hi - lo < 1e-12) break;
    }
    const double beta = std::exp((lo + hi) / 2.0);

    // report r^2 of ln J against the fitted model curve
    double my = 0.0;
    for (double v : y) my += v;
    my /= y.size();
    double ss_tot = 0.0, ss_res = sse(beta);
    for (double v : y) ss_tot += (v - my) * (v - my);
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {beta, x.front(), x.back(), r2, static_cast<int>(x.size())};
}

MaslovReport maslov_check(const DecayProfile& profile_I, double gamma, double c, double tolerance,
                          int coarsen) {
    if (coarsen < 1) throw AnalysisError("coarsen must be >= 1");
    const auto& x = profile_I.x0;
    const auto& v = profile_I.values;
    std::vector<double> cx, cv;
    for (size_t i = 0; i < x.size(); i += coarsen) {
        cx.push_back(x[i]);
        cv.push_back(v[i]);
    }
    if (cx.size() < 5) throw AnalysisError("grid too coarse for second differences");
    const double dx = cx[1] - cx[0];
    for (size_t i = 0; i + 1 < cx.size(); ++i)
        if (std::abs(cx[i + 1] - cx[i] - dx) > 1e-9)
            throw AnalysisError("maslov_check requires a uniform grid");

    MaslovReport rep;
    int passed = 0;
    for (size_t i = 2; i + 2 < cx.size(); ++i) {
        MaslovReport::Point pt;
        pt.x0 = cx[i];
        pt.lhs = (cv[i - 1] - 2.0 * cv[i] + cv[i + 1]) / (dx * dx);
        pt.rhs = c * gamma * gamma * cv[i];
        pt.pass = pt.lhs >= pt.rhs * (1.0 - tolerance);
        passed += pt.pass ? 1 : 0;
        rep.points.push_back(pt);
    }
    if (rep.points.empty()) throw AnalysisError("no interior points for maslov_check");
    rep.pass_fraction = double(passed) / double(rep.points.size());
    return rep;
}

namespace {

Vec2 reflect(const Line& axis, const Vec2& p) {
    const Vec2 d = normalized(axis.direction);
    const Vec2 r = p - axis.point;
    const Vec2 along = d * dot(r, d);
    return axis.point + along * 2.0 - r;
}

bool vertex_matches(const Polygon& poly, const Vec2& p, double tol) {
    for (const auto& q : poly)
        if (norm(q - p) <= tol) return true;
    return false;
}

}  // namespace

SymmetryReport symmetry_classify(const Mesh& mesh, const std::vector<double>& u,
                                 const DomainSpec& spec, const Line& axis) {
    constexpr double tol = 1e-9;
    for (const auto& p : spec.basic)
        if (!vertex_matches(spec.basic, reflect(axis, p), tol))
            throw AnalysisError("axis is not a symmetry of the basic domain");
    for (const auto& p : spec.branch)
        if (!vertex_matches(spec.branch, reflect(axis, p), tol))
            throw AnalysisError("axis is not a symmetry of the branch");
    for (const auto& s : spec.slits) {
        const Vec2 ra = reflect(axis, s.a), rb = reflect(axis, s.b);
        bool ok = false;
        for (const auto& t : spec.slits)
            if ((norm(ra - t.a) <= tol && norm(rb - t.b) <= tol) ||
                (norm(ra - t.b) <= tol && norm(rb - t.a) <= tol))
                ok = true;
        if (!ok) throw AnalysisError("axis is not a symmetry of the slits");
    }

    // lumped-mass weights
    std::vector<double> w(mesh.nodes.size(), 0.0);
    for (const auto& tr : mesh.triangles) {
        const double a3 =
            tri_area(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]) / 3.0;
        for (int i = 0; i < 3; ++i) w[tr[i]] += a3;
    }

    const MeshLocator loc(mesh);
    double ss = 0.0, sa = 0.0, base = 0.0;
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Vec2 m = reflect(axis, mesh.nodes[i]);
        const int t = loc.find(m);
        if (t < 0) continue;  // rounding pushed a boundary image outside
        const double v = loc.interpolate(u, m);
        ss += w[i] * (v - u[i]) * (v - u[i]);
        sa += w[i] * (v + u[i]) * (v + u[i]);
        base += w[i] * u[i] * u[i];
    }
    if (base <= 0.0) throw AnalysisError("zero mode vector");
    SymmetryReport rep;
    rep.score_sym = std::sqrt(ss / base);
    rep.score_anti = std::sqrt(sa / base);
    if (rep.score_sym <= 0.1 * rep.score_anti)
        rep.cls = Symmetry::Symmetric;
    else if (rep.score_anti <= 0.1 * rep.score_sym)
        rep.cls = Symmetry::Antisymmetric;
    else
        rep.cls = Symmetry::None;
    return rep;
}

namespace {

Mesh mesh_polygon(const Polygon& poly, double target_h) {
    Pslg pslg;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const double len = norm(b - a);
        const int nseg = std::max(1, static_cast<int>(std::ceil(len / target_h)));
        for (int s = 0; s < nseg; ++s) {
            const int ia = static_cast<int>(pslg.points.size());
            pslg.points.push_back(a + (b - a) * (double(s) / nseg));
            pslg.points.push_back(a + (b - a) * (double(s + 1) / nseg));
            pslg.segments.push_back({ia, ia + 1, 0, -1, false});
        }
    }
    pslg.regions = {poly};
    MeshOptions opts;
    opts.target_h = target_h;
    return triangulate_pslg(pslg, opts);
}

}  // namespace

RayleighReport rayleigh_check(const DomainSpec& spec, int level, int k) {
    spec.validate();
    if (k < 1) throw AnalysisError("k must be >= 1");

    Mesh basic = mesh_polygon(spec.basic, 0.15);
    for (int i = 0; i < level; ++i) basic = refine(basic);
    const ModeSet vb = solve_modes(basic, BoundaryCondition::all_dirichlet(), k);

    Mesh full = generate(spec, 0.15);
    for (int i = 0; i < level; ++i) full = refine(full);
    const ModeSet fd = solve_modes(full, BoundaryCondition::all_dirichlet(), k);

    const ThresholdReport th = threshold(spec, 201);
    RayleighReport rep;
    rep.kappa1 = vb.modes.front().lambda;
    rep.lambda1 = fd.modes.front().lambda;
    rep.pass = rep.lambda1 < rep.kappa1;
    for (const auto& m : vb.modes)
        if (m.lambda < th.mu) ++rep.basic_below_mu;
    for (const auto& m : fd.modes)
        if (m.lambda < th.mu) ++rep.full_below_mu;
    rep.count_pass = rep.full_below_mu >= rep.basic_below_mu;
    return rep;
}

BifurcationReport bifurcation_criterion(double b, double h, double w, int level) {
    if (b <= 0 || h <= 0 || w <= 0) throw AnalysisError("dimensions must be positive");
    BifurcationReport rep;
    rep.nu1 = kPi * kPi / (h * h) + kPi * kPi / (4.0 * w * w);
    rep.mu = kPi * kPi / (b * b);
    rep.pass = rep.nu1 > rep.mu;

    // transverse bar h x w, Dirichlet except the attachment side (Neumann)
    Mesh mesh = generate_rectangle(w, h, std::min(w, h) / 4.0, 1, 2, 3, 4);
    for (int i = 0; i < level; ++i) mesh = refine(mesh);
    BoundaryCondition bc;
    bc.default_type = BcType::Dirichlet;
    bc.by_marker[1] = BcType::Neumann;
    const ModeSet set = solve_modes(mesh, bc, 1);
    rep.nu1_fem = set.modes.front().lambda;
    return rep;
}

void write_profile_csv(std::ostream& os, const DecayProfile& J, const BoundReport* bounds,
                       const DecayProfile* I) {
    os << "x0,J";
    if (bounds && bounds->applicable) os << ",hard_bound,sharp_bound";
    if (I) os << ",I";
    os << "\n";
    os.precision(17);
    for (size_t i = 0; i < J.x0.size(); ++i) {
        os << J.x0[i] << "," << J.values[i];
        if (bounds && bounds->applicable)
            os << "," << bounds->hard_bound[i] << "," << bounds->sharp_bound[i];
        if (I) os << "," << (i < I->values.size() ? I->values[i] : 0.0);
        os << "\n";
    }
}

}  // namespace branchlap
