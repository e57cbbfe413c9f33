#include "branchlap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

namespace branchlap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMergeTol = 1e-10;  // endpoint-merge tolerance, domain units
constexpr double kOnBoundaryTol = 1e-9;

double sq(double v) { return v * v; }

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double tol) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a) <= tol;
    const double t = dot(p - a, ab) / len2;
    if (t < -tol || t > 1.0 + tol) return false;
    const Vec2 proj = a + ab * std::clamp(t, 0.0, 1.0);
    return norm(p - proj) <= tol;
}

bool point_on_polygon_boundary(const Polygon& poly, const Vec2& p, double tol) {
    for (size_t i = 0; i < poly.size(); ++i) {
        if (point_on_segment(p, poly[i], poly[(i + 1) % poly.size()], tol)) return true;
    }
    return false;
}

void ensure_ccw(Polygon& poly, std::vector<ArcEdge>* arcs = nullptr) {
    if (polygon_area(poly) >= 0.0) return;
    const int n = static_cast<int>(poly.size());
    std::reverse(poly.begin(), poly.end());
    if (arcs) {
        for (auto& arc : *arcs) arc.first_vertex = (n - 2 - arc.first_vertex + n) % n;
    }
}

std::vector<Segment> compute_junction(const DomainSpec& spec) {
    std::vector<Segment> result;
    const size_t n = spec.branch.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = spec.branch[i];
        const Vec2& q = spec.branch[(i + 1) % n];
        const Vec2 mid = (p + q) * 0.5;
        if (point_on_polygon_boundary(spec.basic, p, kOnBoundaryTol) &&
            point_on_polygon_boundary(spec.basic, q, kOnBoundaryTol) &&
            point_on_polygon_boundary(spec.basic, mid, kOnBoundaryTol)) {
            result.push_back({p, q});
        }
    }
    return result;
}

}  // namespace

double polygon_area(const Polygon& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        s += cross(p, q);
    }
    return 0.5 * s;
}

bool polygon_is_simple(const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j],
                                            poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

void DomainSpec::validate() const {
    if (basic.size() < 3 || branch.size() < 3) throw GeometryError("polygon with fewer than 3 vertices");
    if (std::abs(polygon_area(basic)) < 1e-12) throw GeometryError("degenerate basic polygon");
    if (std::abs(polygon_area(branch)) < 1e-12) throw GeometryError("degenerate branch polygon");
    if (!polygon_is_simple(basic)) throw GeometryError("basic polygon is not simple");
    if (!polygon_is_simple(branch)) throw GeometryError("branch polygon is not simple");
    if (junction.empty()) throw GeometryError("empty junction between basic domain and branch");
    if (axis.kind == AxisKind::Cartesian) {
        for (const Vec2& p : branch) {
            const double x = dot(p - axis.origin, axis.direction);
            if (x < -kOnBoundaryTol || x > axis.length + kOnBoundaryTol)
                throw GeometryError("branch vertex outside axis range");
        }
    }
}

Vec2 to_branch_chart(const DomainSpec& spec, const Vec2& p) {
    const BranchAxis& ax = spec.axis;
    if (ax.kind == AxisKind::Cartesian) {
        const Vec2 d = p - ax.origin;
        return {dot(d, ax.direction), dot(d, perp(ax.direction))};
    }
    const Vec2 d = p - ax.center;
    const double rho = norm(d);
    // phi measured from the angle_begin ray toward angle_end
    const double phi0 = std::atan2(d.y, d.x);
    double phi = phi0 - ax.angle_begin;
    const double span = ax.angle_end - ax.angle_begin;
    const double sgn = span >= 0 ? 1.0 : -1.0;
    phi *= sgn;
    while (phi < -kPi) phi += 2 * kPi;
    while (phi > kPi) phi -= 2 * kPi;
    return {ax.radius * phi, rho};
}

Vec2 from_branch_chart(const DomainSpec& spec, const Vec2& q) {
    const BranchAxis& ax = spec.axis;
    if (ax.kind == AxisKind::Cartesian) {
        return ax.origin + ax.direction * q.x + perp(ax.direction) * q.y;
    }
    const double sgn = (ax.angle_end - ax.angle_begin) >= 0 ? 1.0 : -1.0;
    const double phi = ax.angle_begin + sgn * q.x / ax.radius;
    return ax.center + Vec2{std::cos(phi), std::sin(phi)} * q.y;
}

Polygon branch_chart_polygon(const DomainSpec& spec) {
    Polygon out;
    out.reserve(spec.branch.size());
    for (const Vec2& p : spec.branch) out.push_back(to_branch_chart(spec, p));
    if (polygon_area(out) < 0.0) std::reverse(out.begin(), out.end());
    return out;
}

DomainSpec build_catalog_domain(char shape_id) {
    double a = 1.0, b = 0.25, shift = 0.125;
    if (shape_id == 'g') a = 1.0 / std::sqrt(2.0);
    if (shape_id == 'h') a = 0.625;
    if (shape_id == 'a' || shape_id == 'b' || shape_id == 'g' || shape_id == 'h') shift = 0.0;
    return build_catalog_domain(shape_id, a, b, shift);
}

DomainSpec build_catalog_domain(char shape_id, double a, double b, double shift) {
    if (b <= 0.0 || a <= 0.0) throw GeometryError("degenerate polygon: non-positive branch dimensions");
    DomainSpec spec;
    spec.shape_id = std::string(1, shape_id);
    spec.basic = {{-1, 0}, {0, 0}, {0, 1}, {-1, 1}};
    spec.axis.kind = AxisKind::Cartesian;
    spec.axis.direction = {1, 0};
    spec.axis.origin = {0, 0};
    spec.axis.length = a;

    const double y0 = (1.0 - b) / 2.0 + shift;  // branch bottom edge
    const double yc = y0 + b / 2.0;             // branch centerline

    switch (shape_id) {
        case 'a':
            spec.branch = {{0, y0}, {a, y0}, {a, y0 + b}, {0, y0 + b}};
            break;
        case 'b':
            // half of shape 'a': lower half-square with the branch's lower half
            spec.basic = {{-1, 0}, {0, 0}, {0, 0.5}, {-1, 0.5}};
            spec.branch = {{0, (1.0 - b) / 2.0}, {a, (1.0 - b) / 2.0}, {a, 0.5}, {0, 0.5}};
            break;
        case 'c':
            // narrow (width b/2) then wide (width b)
            spec.branch = {{0, yc - b / 4},     {a / 2, yc - b / 4}, {a / 2, y0},
                           {a, y0},             {a, y0 + b},         {a / 2, y0 + b},
                           {a / 2, yc + b / 4}, {0, yc + b / 4}};
            break;
        case 'd':
            // wide then narrow
            spec.branch = {{0, y0},         {a / 2, y0},         {a / 2, yc - b / 4},
                           {a, yc - b / 4}, {a, yc + b / 4},     {a / 2, yc + b / 4},
                           {a / 2, y0 + b}, {0, y0 + b}};
            break;
        case 'e':
            // width linearly changing from b/2 to b, symmetric about the centerline
            spec.branch = {{0, yc - b / 4}, {a, yc - b / 2}, {a, yc + b / 2}, {0, yc + b / 4}};
            break;
        case 'f':
            spec.branch = {{0, y0}, {a, y0}, {a, y0 + b}, {0, y0 + b}};
            spec.slits.push_back({{0, yc}, {0.4 * a, yc}});
            break;
        case 'g': {
            // rectangular branch tilted by 45 degrees, clipped to the outside
            // of the basic domain: a vertical junction of width b, two slant
            // edges, and a far end perpendicular to the tilted axis.  a is the
            // slant length, so the horizontal extent is d = a/sqrt(2).
            const double ybase = (1.0 - b) / 2.0 + shift;
            const double d = a / std::sqrt(2.0);
            if (d <= b / 2.0) throw GeometryError("tilted branch too short for its width");
            spec.branch = {
                {0, ybase}, {d, ybase + d}, {d - b / 2.0, ybase + d + b / 2.0}, {0, ybase + b}};
            spec.axis.length = d;
            break;
        }
        case 'h': {
            // quarter-annulus branch: outer radius a, inner radius a - b
            const double router = a;
            const double rinner = a - b;
            if (rinner <= 0.0) throw GeometryError("degenerate polygon: annulus inner radius <= 0");
            const double ycen = (1.0 - b) / 2.0 + shift + router;
            const Vec2 center{0.0, ycen};
            const int nseg = 12;  // per arc; meshing re-subdivides from the arc data
            Polygon poly;
            std::vector<ArcEdge> arcs;
            // junction radial edge at phi = -pi/2 (pointing down from center)
            auto on_arc = [&](double rho, double phi) {
                return center + Vec2{rho * std::cos(phi), rho * std::sin(phi)};
            };
            const double phi_lo = -kPi / 2.0;
            const double phi_hi = 0.0;
            poly.push_back(on_arc(router, phi_lo));
            // outer arc, phi_lo -> phi_hi
            for (int i = 1; i <= nseg; ++i) {
                arcs.push_back({static_cast<int>(poly.size()) - 1, center, router});
                poly.push_back(on_arc(router, phi_lo + (phi_hi - phi_lo) * i / nseg));
            }
            poly.push_back(on_arc(rinner, phi_hi));
            // inner arc, phi_hi -> phi_lo
            for (int i = 1; i <= nseg; ++i) {
                arcs.push_back({static_cast<int>(poly.size()) - 1, center, rinner});
                poly.push_back(on_arc(rinner, phi_hi - (phi_hi - phi_lo) * i / nseg));
            }
            spec.branch = poly;
            spec.branch_arcs = arcs;
            spec.axis.kind = AxisKind::Curvilinear;
            spec.axis.center = center;
            spec.axis.radius = rinner;
            spec.axis.angle_begin = phi_lo;
            spec.axis.angle_end = phi_hi;
            spec.axis.length = rinner * (phi_hi - phi_lo);
            break;
        }
        case 'i':
            // rectangular branch with a symmetric broadening in the middle:
            // width b/2, extending b/2 beyond the branch on both sides
            spec.branch = {{0, y0},
                           {a / 2 - b / 4, y0},
                           {a / 2 - b / 4, y0 - b / 2},
                           {a / 2 + b / 4, y0 - b / 2},
                           {a / 2 + b / 4, y0},
                           {a, y0},
                           {a, y0 + b},
                           {a / 2 + b / 4, y0 + b},
                           {a / 2 + b / 4, y0 + 3 * b / 2},
                           {a / 2 - b / 4, y0 + 3 * b / 2},
                           {a / 2 - b / 4, y0 + b},
                           {0, y0 + b}};
            break;
        case 'j': {
            // branch bifurcating into a transverse bar of height 1 and width b
            const double h = 1.0;
            spec.branch = {{0, y0},          {a, y0},          {a, yc - h / 2},
                           {a + b, yc - h / 2}, {a + b, yc + h / 2}, {a, yc + h / 2},
                           {a, y0 + b},      {0, y0 + b}};
            spec.axis.length = a + b;
            break;
        }
        default:
            throw GeometryError(std::string("unknown shape id '") + shape_id + "'");
    }

    ensure_ccw(spec.basic);
    ensure_ccw(spec.branch, &spec.branch_arcs);
    spec.junction = compute_junction(spec);
    spec.validate();
    return spec;
}

CrossSection cross_section_at(const DomainSpec& spec, double x0) {
    const double L = spec.axis.length;
    if (x0 < -kOnBoundaryTol || x0 > L + kOnBoundaryTol)
        throw GeometryError("cross-section coordinate outside branch range");
    x0 = std::clamp(x0, 0.0, L);

    const Polygon chart = branch_chart_polygon(spec);
    const size_t n = chart.size();

    auto collect = [&](double xq, std::vector<std::array<double, 2>>& intervals) -> bool {
        std::vector<double> crossings;
        for (size_t i = 0; i < n; ++i) {
            const Vec2& p = chart[i];
            const Vec2& q = chart[(i + 1) % n];
            if (std::abs(p.x - xq) <= kMergeTol && std::abs(q.x - xq) <= kMergeTol) {
                intervals.push_back({std::min(p.y, q.y), std::max(p.y, q.y)});
            } else {
                const double xmin = std::min(p.x, q.x);
                const double xmax = std::max(p.x, q.x);
                if (xq >= xmin && xq < xmax) {
                    crossings.push_back(p.y + (q.y - p.y) * (xq - p.x) / (q.x - p.x));
                }
            }
        }
        if (crossings.size() % 2 != 0) return false;
        std::sort(crossings.begin(), crossings.end());
        for (size_t i = 0; i + 1 < crossings.size(); i += 2)
            intervals.push_back({crossings[i], crossings[i + 1]});
        return true;
    };

    std::vector<std::array<double, 2>> raw;
    if (!collect(x0, raw)) {
        raw.clear();
        if (!collect(x0 + 64 * kMergeTol, raw))  // degenerate tangency, nudge
            throw GeometryError("inconsistent cross-section parity");
    }

    // union with merge at shared endpoints
    std::sort(raw.begin(), raw.end());
    std::vector<std::array<double, 2>> merged;
    for (const auto& iv : raw) {
        if (iv[1] - iv[0] <= kMergeTol) continue;
        if (!merged.empty() && iv[0] <= merged.back()[1] + kMergeTol) {
            merged.back()[1] = std::max(merged.back()[1], iv[1]);
        } else {
            merged.push_back(iv);
        }
    }

    // slits act as Dirichlet separators: split intervals at slit crossings
    for (const Segment& slit : spec.slits) {
        const Vec2 a = to_branch_chart(spec, slit.a);
        const Vec2 b = to_branch_chart(spec, slit.b);
        const double xmin = std::min(a.x, b.x), xmax = std::max(a.x, b.x);
        if (x0 < xmin - kMergeTol || x0 > xmax + kMergeTol) continue;
        double ycut;
        if (std::abs(b.x - a.x) <= kMergeTol) continue;  // slit parallel to section
        ycut = a.y + (b.y - a.y) * (x0 - a.x) / (b.x - a.x);
        std::vector<std::array<double, 2>> split;
        for (const auto& iv : merged) {
            if (ycut > iv[0] + kMergeTol && ycut < iv[1] - kMergeTol) {
                split.push_back({iv[0], ycut});
                split.push_back({ycut, iv[1]});
            } else {
                split.push_back(iv);
            }
        }
        merged = std::move(split);
    }

    CrossSection cs;
    cs.x0 = x0;
    cs.intervals = merged;
    cs.largest_length = 0.0;
    for (const auto& iv : merged) cs.largest_length = std::max(cs.largest_length, iv[1] - iv[0]);
    cs.mu1 = cs.largest_length > 0.0 ? sq(kPi) / sq(cs.largest_length)
                                     : std::numeric_limits<double>::infinity();
    return cs;
}

ThresholdReport threshold(const DomainSpec& spec, int n_samples) {
    if (n_samples < 2) throw GeometryError("threshold needs n_samples >= 2");
    const double L = spec.axis.length;

    std::vector<double> xs;
    for (int i = 0; i < n_samples; ++i) xs.push_back(L * i / (n_samples - 1));
    for (const Vec2& p : branch_chart_polygon(spec))
        if (p.x > -kMergeTol && p.x < L + kMergeTol) xs.push_back(std::clamp(p.x, 0.0, L));
    for (const Segment& s : spec.slits) {
        xs.push_back(std::clamp(to_branch_chart(spec, s.a).x, 0.0, L));
        xs.push_back(std::clamp(to_branch_chart(spec, s.b).x, 0.0, L));
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             xs.end());

    ThresholdReport rep;
    rep.mu = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        CrossSection cs = cross_section_at(spec, x);
        if (std::isfinite(cs.mu1) && cs.mu1 < rep.mu) {
            rep.mu = cs.mu1;
            rep.argmin_x = x;
        }
        rep.grid.push_back(std::move(cs));
    }

    // non-increasing condition, evaluated on chart edge normals
    // (junction edges excluded; corners carry no normal)
    Polygon chart;
    chart.reserve(spec.branch.size());
    for (const Vec2& p : spec.branch) chart.push_back(to_branch_chart(spec, p));
    const double orient_sgn = polygon_area(chart) >= 0.0 ? 1.0 : -1.0;
    auto on_junction = [&](const Vec2& p, const Vec2& q) {
        for (const Segment& j : spec.junction)
            if (point_on_segment(p, j.a, j.b, kOnBoundaryTol) &&
                point_on_segment(q, j.a, j.b, kOnBoundaryTol))
                return true;
        return false;
    };
    bool ok = true;
    const size_t n = chart.size();
    for (size_t i = 0; i < n && ok; ++i) {
        if (on_junction(spec.branch[i], spec.branch[(i + 1) % n])) continue;
        const Vec2 e = chart[(i + 1) % n] - chart[i];
        if (norm(e) < kMergeTol) continue;
        const Vec2 nrm = normalized(Vec2{e.y, -e.x}) * orient_sgn;  // outward
        if (nrm.x < -1e-12) ok = false;
    }
    for (const Segment& s : spec.slits) {
        const Vec2 a = to_branch_chart(spec, s.a);
        const Vec2 b = to_branch_chart(spec, s.b);
        const Vec2 e = b - a;
        if (norm(e) < kMergeTol) continue;
        const Vec2 nrm = normalized(Vec2{e.y, -e.x});
        if (std::abs(nrm.x) > 1e-12) ok = false;  // both orientations are boundary
    }
    rep.non_increasing = ok;
    return rep;
}

DomainSpec rotate_to_axis(const DomainSpec& spec, const Vec2& direction) {
    const double len = norm(direction);
    if (len == 0.0) throw GeometryError("zero axis direction");
    const Vec2 d = direction / len;
    const double c = d.x, s = -d.y;  // rotation taking d to (1, 0)
    auto rot = [&](const Vec2& p) { return Vec2{c * p.x - s * p.y, s * p.x + c * p.y}; };

    if (std::abs(d.x - 1.0) < 1e-15 && std::abs(d.y) < 1e-15) return spec;

    DomainSpec out = spec;
    for (auto& p : out.basic) p = rot(p);
    for (auto& p : out.branch) p = rot(p);
    for (auto& a : out.branch_arcs) a.center = rot(a.center);
    for (auto& sl : out.slits) { sl.a = rot(sl.a); sl.b = rot(sl.b); }
    for (auto& j : out.junction) { j.a = rot(j.a); j.b = rot(j.b); }

    if (out.axis.kind == AxisKind::Cartesian) {
        double xmin = std::numeric_limits<double>::infinity();
        double xmax = -xmin;
        for (const Vec2& p : out.branch) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
        }
        out.axis.direction = {1, 0};
        out.axis.origin = {xmin, 0};
        out.axis.length = xmax - xmin;
    } else {
        out.axis.center = rot(out.axis.center);
        const double dphi = std::atan2(s, c);
        out.axis.angle_begin += dphi;
        out.axis.angle_end += dphi;
    }
    return out;
}

DomainSpec translate(const DomainSpec& spec, const Vec2& t) {
    DomainSpec out = spec;
    for (auto& p : out.basic) p = p + t;
    for (auto& p : out.branch) p = p + t;
    for (auto& a : out.branch_arcs) a.center = a.center + t;
    for (auto& s : out.slits) { s.a = s.a + t; s.b = s.b + t; }
    for (auto& j : out.junction) { j.a = j.a + t; j.b = j.b + t; }
    out.axis.origin = out.axis.origin + t;
    out.axis.center = out.axis.center + t;
    return out;
}

namespace {

using nlohmann::json;

json vec_to_json(const Vec2& p) { return json::array({p.x, p.y}); }
Vec2 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json poly_to_json(const Polygon& poly) {
    json arr = json::array();
    for (const auto& p : poly) arr.push_back(vec_to_json(p));
    return arr;
}

Polygon poly_from_json(const json& j) {
    Polygon poly;
    for (const auto& e : j) poly.push_back(vec_from_json(e));
    return poly;
}

}  // namespace

std::string spec_to_json(const DomainSpec& spec) {
    json j;
    j["schema_version"] = 1;
    if (!spec.shape_id.empty()) j["shape"] = spec.shape_id;
    j["basic"] = poly_to_json(spec.basic);
    j["branch"] = poly_to_json(spec.branch);
    json arcs = json::array();
    for (const auto& a : spec.branch_arcs)
        arcs.push_back({{"first_vertex", a.first_vertex},
                        {"center", vec_to_json(a.center)},
                        {"radius", a.radius}});
    j["branch_arcs"] = arcs;
    json slits = json::array();
    for (const auto& s : spec.slits) slits.push_back({vec_to_json(s.a), vec_to_json(s.b)});
    j["slits"] = slits;
    json ax;
    ax["kind"] = spec.axis.kind == AxisKind::Cartesian ? "cartesian" : "curvilinear";
    ax["direction"] = vec_to_json(spec.axis.direction);
    ax["origin"] = vec_to_json(spec.axis.origin);
    ax["length"] = spec.axis.length;
    ax["center"] = vec_to_json(spec.axis.center);
    ax["radius"] = spec.axis.radius;
    ax["angle_begin"] = spec.axis.angle_begin;
    ax["angle_end"] = spec.axis.angle_end;
    j["axis"] = ax;
    return j.dump(2);
}

DomainSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", 1) != 1) throw GeometryError("unsupported spec schema version");

    if (j.contains("shape") && !j.contains("basic")) {
        const std::string sid = j.at("shape").get<std::string>();
        if (sid.size() != 1) throw GeometryError("shape id must be a single letter a..j");
        DomainSpec defaults = build_catalog_domain(sid[0]);
        if (!j.contains("params")) return defaults;
        const json& p = j["params"];
        double a = defaults.axis.kind == AxisKind::Cartesian && sid[0] != 'g'
                       ? defaults.axis.length
                       : (sid[0] == 'g' ? 1.0 / std::sqrt(2.0) : 0.625);
        if (sid[0] == 'j') a = 1.0;
        a = p.value("a", a);
        const double b = p.value("b", 0.25);
        double shift =
            (sid[0] == 'a' || sid[0] == 'b' || sid[0] == 'g' || sid[0] == 'h') ? 0.0 : 0.125;
        shift = p.value("shift", shift);
        return build_catalog_domain(sid[0], a, b, shift);
    }

    DomainSpec spec;
    if (j.contains("shape")) spec.shape_id = j["shape"].get<std::string>();
    spec.basic = poly_from_json(j.at("basic"));
    spec.branch = poly_from_json(j.at("branch"));
    if (j.contains("branch_arcs"))
        for (const auto& e : j["branch_arcs"])
            spec.branch_arcs.push_back({e.at("first_vertex").get<int>(),
                                        vec_from_json(e.at("center")),
                                        e.at("radius").get<double>()});
    if (j.contains("slits"))
        for (const auto& e : j["slits"])
            spec.slits.push_back({vec_from_json(e.at(0)), vec_from_json(e.at(1))});
    const json& ax = j.at("axis");
    spec.axis.kind =
        ax.at("kind").get<std::string>() == "curvilinear" ? AxisKind::Curvilinear : AxisKind::Cartesian;
    spec.axis.direction = vec_from_json(ax.value("direction", json::array({1.0, 0.0})));
    spec.axis.origin = vec_from_json(ax.value("origin", json::array({0.0, 0.0})));
    spec.axis.length = ax.at("length").get<double>();
    if (ax.contains("center")) spec.axis.center = vec_from_json(ax["center"]);
    spec.axis.radius = ax.value("radius", 0.0);
    spec.axis.angle_begin = ax.value("angle_begin", 0.0);
    spec.axis.angle_end = ax.value("angle_end", 0.0);
    spec.junction = compute_junction(spec);
    spec.validate();
    return spec;
}

}  // namespace branchlap
