#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "branchlap/geometry.hpp"

namespace branchlap {

/// Circle supporting curved boundary pieces; boundary edges referencing an
/// arc get their midpoints projected back onto it during refinement.
struct Circle {
    Vec2 center;
    double radius = 0.0;
};

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    int marker = 0;
    int arc = -1;  // index into Mesh::arcs, -1 for straight edges
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;   // CCW
    std::vector<BoundaryEdge> boundary_edges;    // exactly one adjacent triangle
    std::vector<BoundaryEdge> slit_edges;        // interior Dirichlet cuts
    std::vector<Circle> arcs;
    int level = 0;

    double total_area() const;
    /// Conformity / orientation / adjacency invariants; throws on violation.
    void check_valid() const;
};

/// Planar straight-line graph input for the triangulator.
struct Pslg {
    struct Seg {
        int a = -1;
        int b = -1;
        int marker = 0;
        int arc = -1;
        bool slit = false;
    };
    std::vector<Vec2> points;
    std::vector<Seg> segments;
    std::vector<Circle> arcs;
    std::vector<Polygon> regions;  // triangle kept iff centroid inside any
};

struct MeshOptions {
    double target_h = 0.15;
    double min_angle_deg = 20.0;
    int max_steiner = 400000;
};

Mesh triangulate_pslg(const Pslg& pslg, const MeshOptions& opts);

/// Conforming triangulation of basic domain + branch with the junction and
/// slits as constrained edges.
Mesh generate(const DomainSpec& spec, double target_h);

/// Axis-aligned rectangle [0,w] x [0,h] with per-side markers
/// (left, right, bottom, top), for mixed boundary-condition checks.
Mesh generate_rectangle(double w, double h, double target_h, int marker_left, int marker_right,
                        int marker_bottom, int marker_top);

/// Uniform 4-way refinement via edge midpoints; arc-edge midpoints are
/// projected onto the true circle.
Mesh refine(const Mesh& mesh);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

class MeshError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
