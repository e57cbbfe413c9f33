#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace branchlap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline Vec2 normalized(const Vec2& a) { return a / norm(a); }
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

using Polygon = std::vector<Vec2>;

struct Segment {
    Vec2 a, b;
};

double polygon_area(const Polygon& poly);
bool polygon_is_simple(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p);

/// Circular-arc annotation for a polygon edge: the edge starting at
/// vertex index `first_vertex` lies on the circle (center, radius).
struct ArcEdge {
    int first_vertex = -1;
    Vec2 center;
    double radius = 0.0;
};

enum class AxisKind { Cartesian, Curvilinear };

/// Branch parameterization. The branch coordinate x0 runs in [0, length].
/// Cartesian: x0 = (p - origin) . direction.
/// Curvilinear: x0 = radius * (phi - angle_begin), phi the polar angle of p
/// about `center`, measured so that phi = angle_begin at the junction.
struct BranchAxis {
    AxisKind kind = AxisKind::Cartesian;
    Vec2 direction{1.0, 0.0};
    Vec2 origin{0.0, 0.0};
    double length = 0.0;
    // curvilinear only
    Vec2 center;
    double radius = 0.0;
    double angle_begin = 0.0;
    double angle_end = 0.0;
};

/// A basic domain plus one branch. Polygons are simple, positively oriented,
/// with disjoint interiors; the junction is the shared boundary piece.
struct DomainSpec {
    Polygon basic;
    Polygon branch;
    std::vector<ArcEdge> branch_arcs;
    std::vector<Segment> slits;   // interior Dirichlet cuts, e.g. shape f
    BranchAxis axis;
    std::vector<Segment> junction;
    std::string shape_id;         // empty for custom specs

    void validate() const;
};

struct CrossSection {
    double x0 = 0.0;
    std::vector<std::array<double, 2>> intervals;  // disjoint, sorted
    double largest_length = 0.0;
    double mu1 = 0.0;  // pi^2 / largest_length^2
};

struct ThresholdReport {
    double mu = 0.0;
    double argmin_x = 0.0;
    std::vector<CrossSection> grid;
    bool non_increasing = false;
    int eligible_count = 0;  // filled by callers that know the spectrum
};

/// Maps between world coordinates and the branch chart (x0, t). For a
/// Cartesian axis this is a rigid motion; for a curvilinear axis
/// (arc-length, radius) coordinates are used and arc edges become
/// horizontal segments in the chart.
Vec2 to_branch_chart(const DomainSpec& spec, const Vec2& p);
Vec2 from_branch_chart(const DomainSpec& spec, const Vec2& q);

/// Branch polygon mapped into the chart (vertex-wise).
Polygon branch_chart_polygon(const DomainSpec& spec);

DomainSpec build_catalog_domain(char shape_id);
DomainSpec build_catalog_domain(char shape_id, double a, double b, double shift);

CrossSection cross_section_at(const DomainSpec& spec, double x0);
ThresholdReport threshold(const DomainSpec& spec, int n_samples);
DomainSpec rotate_to_axis(const DomainSpec& spec, const Vec2& direction);
DomainSpec translate(const DomainSpec& spec, const Vec2& offset);

/// Structured-text (JSON) config for domain specs; schema documented in the
/// README. Accepts either {"shape": "a", params...} or raw vertex lists.
DomainSpec spec_from_json(const std::string& text);
std::string spec_to_json(const DomainSpec& spec);

class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
