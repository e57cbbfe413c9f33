#include "branchlap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace branchlap {

namespace {

constexpr double kPointTol = 1e-12;
constexpr double kCollinearTol = 1e-9;

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

struct ConstraintInfo {
    int marker = 0;
    int arc = -1;
    bool slit = false;
};

// Incremental Delaunay triangulation with constrained edges.
// adj[i] is the neighbor across the edge opposite vertex v[i]; every input
// vertex is interior thanks to the enclosing super-box, so vertex fans are
// always complete until the final pruning step.
class Triangulator {
  public:
    std::vector<Vec2> pts;
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> adj;
        bool alive = true;
    };
    std::vector<Tri> tris;
    std::unordered_map<uint64_t, ConstraintInfo> constraints;
    std::vector<int> vert_tri;  // one alive incident triangle per vertex
    int last_tri = 0;

    explicit Triangulator(const std::vector<Vec2>& input) {
        Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
        for (const auto& p : input) {
            lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
        }
        const double d = std::max(hi.x - lo.x, hi.y - lo.y) * 12.0 + 1.0;
        const Vec2 c = (lo + hi) * 0.5;
        pts = {{c.x - d, c.y - d}, {c.x + d, c.y - d}, {c.x + d, c.y + d}, {c.x - d, c.y + d}};
        vert_tri = {0, 0, 0, 1};
        tris.push_back({{0, 1, 2}, {-1, 1, -1}, true});
        tris.push_back({{0, 2, 3}, {-1, -1, 0}, true});
    }

    static double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
        return cross(b - a, c - a);
    }

    bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) const {
        const double ax = a.x - d.x, ay = a.y - d.y;
        const double bx = b.x - d.x, by = b.y - d.y;
        const double cx = c.x - d.x, cy = c.y - d.y;
        const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                           (bx * bx + by * by) * (ax * cy - cx * ay) +
                           (cx * cx + cy * cy) * (ax * by - bx * ay);
        return det > 1e-14;
    }

    int index_of(const Tri& t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        throw MeshError("triangulation adjacency corrupted");
    }

    int adj_index(int t, int nb) const {
        for (int i = 0; i < 3; ++i)
            if (tris[t].adj[i] == nb) return i;
        throw MeshError("triangulation adjacency corrupted");
    }

    void set_adj(int t, int across, int nb) {
        if (t < 0) return;
        tris[t].adj[adj_index(t, across)] = nb;
    }

    // replace neighbor `old_nb` of t with `nb`
    void replace_adj(int t, int old_nb, int nb) {
        if (t < 0) return;
        tris[t].adj[adj_index(t, old_nb)] = nb;
    }

    // Walks toward p; returns triangle containing p and, via `on_edge`, the
    // local edge index if p lies on an edge (within tolerance).
    int locate(const Vec2& p, int& on_edge) {
        int t = last_tri;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) t = first_alive();
        int guard = 0;
        const int cap = static_cast<int>(tris.size()) * 4 + 64;
        while (true) {
            if (++guard > cap) return locate_linear(p, on_edge);
            const Tri& tr = tris[t];
            int next = -1;
            double worst = -1e-13;
            for (int i = 0; i < 3; ++i) {
                const Vec2& a = pts[tr.v[(i + 1) % 3]];
                const Vec2& b = pts[tr.v[(i + 2) % 3]];
                const double o = orient(a, b, p);
                if (o < worst) {
                    worst = o;
                    next = tr.adj[i];
                }
            }
            if (next == -1) {
                on_edge = -1;
                for (int i = 0; i < 3; ++i) {
                    const Vec2& a = pts[tr.v[(i + 1) % 3]];
                    const Vec2& b = pts[tr.v[(i + 2) % 3]];
                    if (std::abs(orient(a, b, p)) <= 1e-13 &&
                        dot(p - a, b - a) > 0 && dot(p - b, a - b) > 0)
                        on_edge = i;
                }
                last_tri = t;
                return t;
            }
            t = next;
        }
    }

    int first_alive() const {
        for (size_t i = 0; i < tris.size(); ++i)
            if (tris[i].alive) return static_cast<int>(i);
        throw MeshError("no alive triangles");
    }

    int locate_linear(const Vec2& p, int& on_edge) {
        for (size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const Tri& tr = tris[t];
            bool inside = true;
            for (int i = 0; i < 3 && inside; ++i)
                if (orient(pts[tr.v[(i + 1) % 3]], pts[tr.v[(i + 2) % 3]], p) < -1e-13)
                    inside = false;
            if (!inside) continue;
            on_edge = -1;
            for (int i = 0; i < 3; ++i) {
                const Vec2& a = pts[tr.v[(i + 1) % 3]];
                const Vec2& b = pts[tr.v[(i + 2) % 3]];
                if (std::abs(orient(a, b, p)) <= 1e-13 && dot(p - a, b - a) > 0 &&
                    dot(p - b, a - b) > 0)
                    on_edge = i;
            }
            last_tri = static_cast<int>(t);
            return static_cast<int>(t);
        }
        throw MeshError("point location failed");
    }

    int make_tri(int a, int b, int c) {
        tris.push_back({{a, b, c}, {-1, -1, -1}, true});
        const int id = static_cast<int>(tris.size()) - 1;
        vert_tri.resize(pts.size(), -1);
        vert_tri[a] = vert_tri[b] = vert_tri[c] = id;
        return id;
    }

    bool is_constrained(int a, int b) const { return constraints.count(edge_key(a, b)) > 0; }

    void legalize(int t, int i) {
        const int o = tris[t].adj[i];
        if (o < 0) return;
        const int a = tris[t].v[i];
        const int b = tris[t].v[(i + 1) % 3];
        const int c = tris[t].v[(i + 2) % 3];
        if (is_constrained(b, c)) return;
        const int oi = index_of(tris[o], find_opposite(o, b, c));
        const int d = tris[o].v[oi];
        if (!in_circle(pts[a], pts[b], pts[c], pts[d])) return;
        flip(t, i);
        // after flip, t = (a,b,d), o = (a,d,c); legalize the two far edges
        legalize(t, index_of(tris[t], a));
        legalize(o, index_of(tris[o], a));
    }

    int find_opposite(int t, int b, int c) const {
        for (int i = 0; i < 3; ++i) {
            const int v = tris[t].v[i];
            if (v != b && v != c) return v;
        }
        throw MeshError("triangulation adjacency corrupted");
    }

    // Flip the edge opposite vertex i of triangle t with its neighbor.
    // Afterwards t = (a,b,d) and o = (a,d,c) where a = t.v[i], edge was (b,c).
    void flip(int t, int i) {
        const int o = tris[t].adj[i];
        const int a = tris[t].v[i];
        const int b = tris[t].v[(i + 1) % 3];
        const int c = tris[t].v[(i + 2) % 3];
        const int d = find_opposite(o, b, c);
        const int oi = index_of(tris[o], d);
        // neighbors
        const int t_ab = tris[t].adj[(i + 2) % 3];  // across edge (a,b)
        const int t_ca = tris[t].adj[(i + 1) % 3];  // across edge (c,a)
        // in o, vertices are (d, c, b) in CCW order around edge
        const int o_db = tris[o].adj[index_of(tris[o], c)];  // across (d,b)
        const int o_cd = tris[o].adj[index_of(tris[o], b)];  // across (c,d)
        tris[t].v = {a, b, d};
        tris[o].v = {a, d, c};
        tris[t].adj = {o_db, o, t_ab};   // opp a: (b,d); opp b: (d,a)->o; opp d: (a,b)
        tris[o].adj = {o_cd, t_ca, t};   // opp a: (d,c); opp d: (c,a); opp c: (a,d)->t
        replace_adj(o_db, o, t);
        replace_adj(t_ca, t, o);
        vert_tri[a] = t; vert_tri[b] = t; vert_tri[d] = t; vert_tri[c] = o;
        (void)oi;
    }

    // Insert p; returns its vertex index. Duplicates (within tol) are reused.
    int insert(const Vec2& p) {
        int on_edge = -1;
        const int t = locate(p, on_edge);
        for (int i = 0; i < 3; ++i) {
            if (norm(pts[tris[t].v[i]] - p) <= kPointTol) return tris[t].v[i];
        }
        pts.push_back(p);
        const int np = static_cast<int>(pts.size()) - 1;
        vert_tri.resize(pts.size(), -1);
        if (on_edge < 0) {
            split_interior(t, np);
        } else {
            split_on_edge(t, on_edge, np);
        }
        return np;
    }

    void split_interior(int t, int np) {
        const int a = tris[t].v[0], b = tris[t].v[1], c = tris[t].v[2];
        const int n_ab = tris[t].adj[2], n_bc = tris[t].adj[0], n_ca = tris[t].adj[1];
        tris[t].alive = false;
        const int t1 = make_tri(a, b, np);
        const int t2 = make_tri(b, c, np);
        const int t3 = make_tri(c, a, np);
        tris[t1].adj = {t2, t3, n_ab};
        tris[t2].adj = {t3, t1, n_bc};
        tris[t3].adj = {t1, t2, n_ca};
        replace_adj(n_ab, t, t1);
        replace_adj(n_bc, t, t2);
        replace_adj(n_ca, t, t3);
        legalize(t1, index_of(tris[t1], np));
        legalize(t2, index_of(tris[t2], np));
        legalize(t3, index_of(tris[t3], np));
    }

    void split_on_edge(int t, int i, int np) {
        const int o = tris[t].adj[i];
        const int a = tris[t].v[i];
        const int b = tris[t].v[(i + 1) % 3];
        const int c = tris[t].v[(i + 2) % 3];
        // preserve constraint status across the split
        ConstraintInfo info;
        bool constrained = false;
        auto it = constraints.find(edge_key(b, c));
        if (it != constraints.end()) {
            info = it->second;
            constrained = true;
            constraints.erase(it);
        }
        const int t_ab = tris[t].adj[(i + 2) % 3];
        const int t_ca = tris[t].adj[(i + 1) % 3];
        tris[t].alive = false;
        const int t1 = make_tri(a, b, np);
        const int t2 = make_tri(c, a, np);
        int t3 = -1, t4 = -1, d = -1;
        if (o >= 0) {
            d = find_opposite(o, b, c);
            const int o_db = tris[o].adj[index_of(tris[o], c)];
            const int o_cd = tris[o].adj[index_of(tris[o], b)];
            tris[o].alive = false;
            t3 = make_tri(b, d, np);
            t4 = make_tri(d, c, np);
            tris[t3].adj = {t4, t1, o_db};
            tris[t4].adj = {t2, t3, o_cd};
            replace_adj(o_db, o, t3);
            replace_adj(o_cd, o, t4);
        }
        tris[t1].adj = {t3, t2, t_ab};
        tris[t2].adj = {t1, t4, t_ca};
        replace_adj(t_ab, t, t1);
        replace_adj(t_ca, t, t2);
        if (constrained) {
            constraints[edge_key(b, np)] = info;
            constraints[edge_key(c, np)] = info;
        }
        legalize(t1, index_of(tris[t1], np));
        legalize(t2, index_of(tris[t2], np));
        if (t3 >= 0) legalize(t3, index_of(tris[t3], np));
        if (t4 >= 0) legalize(t4, index_of(tris[t4], np));
    }

    bool edge_exists(int a, int b) {
        int t = vert_tri[a];
        if (t < 0 || !tris[t].alive) t = find_incident(a);
        // rotate around vertex a
        const int start = t;
        int cur = t;
        int guard = 0;
        do {
            if (++guard > 1 << 20) throw MeshError("vertex fan corrupted");
            const Tri& tr = tris[cur];
            for (int i = 0; i < 3; ++i)
                if (tr.v[i] == b) return true;
            cur = tr.adj[(index_of(tr, a) + 1) % 3];  // neighbor across edge not containing... rotate
            if (cur < 0) return scan_edge(a, b);
        } while (cur != start);
        return false;
    }

    int find_incident(int v) {
        for (size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            for (int i = 0; i < 3; ++i)
                if (tris[t].v[i] == v) {
                    vert_tri[v] = static_cast<int>(t);
                    return static_cast<int>(t);
                }
        }
        throw MeshError("vertex has no incident triangle");
    }

    bool scan_edge(int a, int b) const {
        for (const auto& tr : tris) {
            if (!tr.alive) continue;
            int hit = 0;
            for (int i = 0; i < 3; ++i)
                if (tr.v[i] == a || tr.v[i] == b) ++hit;
            if (hit == 2) return true;
        }
        return false;
    }

    // Force edge (a,b) into the triangulation by flipping crossing edges.
    void recover_edge(int a, int b) {
        for (int round = 0; round < 1 << 16; ++round) {
            if (edge_exists_robust(a, b)) return;
            // find a crossing edge and flip it if the surrounding quad is convex
            bool flipped = false;
            for (size_t t = 0; t < tris.size() && !flipped; ++t) {
                if (!tris[t].alive) continue;
                for (int i = 0; i < 3 && !flipped; ++i) {
                    const int u = tris[t].v[(i + 1) % 3];
                    const int v = tris[t].v[(i + 2) % 3];
                    if (u == a || u == b || v == a || v == b) continue;
                    if (!segments_cross(pts[a], pts[b], pts[u], pts[v])) continue;
                    if (is_constrained(u, v))
                        throw MeshError("crossing constrained segments in input");
                    // convexity: the two opposite vertices must straddle (u,v)
                    const int o = tris[t].adj[i];
                    if (o < 0) continue;
                    const int w1 = tris[t].v[i];
                    const int w2 = find_opposite(o, u, v);
                    if (orient(pts[u], pts[v], pts[w1]) * orient(pts[u], pts[v], pts[w2]) >= 0)
                        continue;
                    // flipping must not create inverted triangles
                    if (orient(pts[w1], pts[w2], pts[u]) * orient(pts[w1], pts[w2], pts[v]) >= 0)
                        continue;
                    flip(static_cast<int>(t), i);
                    flipped = true;
                }
            }
            if (!flipped) throw MeshError("constraint recovery stalled");
        }
        throw MeshError("constraint recovery did not terminate");
    }

    bool edge_exists_robust(int a, int b) {
        for (const auto& tr : tris) {
            if (!tr.alive) continue;
            int hit = 0;
            for (int i = 0; i < 3; ++i)
                if (tr.v[i] == a || tr.v[i] == b) ++hit;
            if (hit == 2) {
                bool has_a = false, has_b = false;
                for (int i = 0; i < 3; ++i) {
                    if (tr.v[i] == a) has_a = true;
                    if (tr.v[i] == b) has_b = true;
                }
                if (has_a && has_b) return true;
            }
        }
        return false;
    }

    static bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
        const double d1 = orient(a, b, c);
        const double d2 = orient(a, b, d);
        const double d3 = orient(c, d, a);
        const double d4 = orient(c, d, b);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
    }
};

struct SubSeg {
    int a, b;
    ConstraintInfo info;
};

Vec2 arc_midpoint(const Vec2& a, const Vec2& b, const Circle& c) {
    const Vec2 m = (a + b) * 0.5;
    const Vec2 d = m - c.center;
    const double n = norm(d);
    if (n < 1e-15) return m;  // diametrically opposite; cannot happen for short chords
    return c.center + d * (c.radius / n);
}

}  // namespace

double Mesh::total_area() const {
    double s = 0.0;
    for (const auto& t : triangles) s += tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    return s;
}

void Mesh::check_valid() const {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : triangles) {
        if (tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) <= 0.0)
            throw MeshError("non-positive triangle area");
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[{a, b}]++;
        }
    }
    for (const auto& [e, c] : edge_count)
        if (c > 2) throw MeshError("non-conforming mesh: edge shared by >2 triangles");
    size_t nb = 0;
    for (const auto& [e, c] : edge_count)
        if (c == 1) ++nb;
    if (nb != boundary_edges.size()) throw MeshError("boundary edge bookkeeping mismatch");
    for (const auto& be : boundary_edges) {
        int a = be.a, b = be.b;
        if (a > b) std::swap(a, b);
        auto it = edge_count.find({a, b});
        if (it == edge_count.end() || it->second != 1)
            throw MeshError("boundary edge not on boundary");
    }
    for (const auto& se : slit_edges) {
        int a = se.a, b = se.b;
        if (a > b) std::swap(a, b);
        auto it = edge_count.find({a, b});
        if (it == edge_count.end() || it->second != 2)
            throw MeshError("slit edge must be interior");
    }
}

Mesh triangulate_pslg(const Pslg& pslg, const MeshOptions& opts) {
    if (opts.target_h <= 0.0) throw MeshError("target_h must be positive");

    // deduplicate points, remap segments
    std::vector<Vec2> pts = pslg.points;
    std::vector<int> remap(pts.size());
    {
        std::vector<int> order(pts.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            if (pts[i].x != pts[j].x) return pts[i].x < pts[j].x;
            return pts[i].y < pts[j].y;
        });
        std::vector<Vec2> unique_pts;
        for (int idx : order) {
            if (!unique_pts.empty() && norm(unique_pts.back() - pts[idx]) <= kPointTol) {
                remap[idx] = static_cast<int>(unique_pts.size()) - 1;
            } else {
                unique_pts.push_back(pts[idx]);
                remap[idx] = static_cast<int>(unique_pts.size()) - 1;
            }
        }
        pts = std::move(unique_pts);
    }

    Triangulator T(pts);  // constructor stores only the super-box
    // insert points in lexicographic order for deterministic output
    std::vector<int> tri_vertex(pts.size(), -1);
    for (size_t i = 0; i < pts.size(); ++i) tri_vertex[i] = T.insert(pts[i]);

    std::vector<SubSeg> subsegs;
    for (const auto& s : pslg.segments) {
        const int a = tri_vertex[remap[s.a]];
        const int b = tri_vertex[remap[s.b]];
        if (a == b) continue;
        ConstraintInfo info{s.marker, s.arc, s.slit};
        const uint64_t k = edge_key(a, b);
        if (T.constraints.count(k)) continue;  // duplicate (e.g. junction)
        T.recover_edge(a, b);
        T.constraints[k] = info;
        subsegs.push_back({a, b, info});
    }

    // --- Ruppert-style refinement -------------------------------------
    const double min_len = opts.target_h / 64.0;
    const double min_angle = opts.min_angle_deg * std::numbers::pi / 180.0;
    const double size_bound = opts.target_h;
    int steiner = 0;

    auto subseg_len = [&](const SubSeg& s) { return norm(T.pts[s.a] - T.pts[s.b]); };

    auto encroached_by = [&](const SubSeg& s, const Vec2& p) {
        const Vec2 mid = (T.pts[s.a] + T.pts[s.b]) * 0.5;
        const double r2 = dot(T.pts[s.a] - mid, T.pts[s.a] - mid);
        const Vec2 d = p - mid;
        return dot(d, d) < r2 * (1.0 - 1e-12);
    };

    auto split_subseg = [&](size_t si) {
        SubSeg s = subsegs[si];
        Vec2 mid = (T.pts[s.a] + T.pts[s.b]) * 0.5;
        if (s.info.arc >= 0) mid = arc_midpoint(T.pts[s.a], T.pts[s.b], pslg.arcs[s.info.arc]);
        const int m = T.insert(mid);
        // split_on_edge updated the constraint map when the midpoint landed
        // on the edge; cover the off-edge (projected arc) case explicitly
        T.constraints.erase(edge_key(s.a, s.b));
        if (!T.edge_exists_robust(s.a, m)) T.recover_edge(s.a, m);
        if (!T.edge_exists_robust(m, s.b)) T.recover_edge(m, s.b);
        T.constraints[edge_key(s.a, m)] = s.info;
        T.constraints[edge_key(m, s.b)] = s.info;
        subsegs[si] = {s.a, m, s.info};
        subsegs.push_back({m, s.b, s.info});
        ++steiner;
    };

    auto point_in_regions = [&](const Vec2& p) {
        for (const auto& poly : pslg.regions)
            if (point_in_polygon(poly, p)) return true;
        return false;
    };

    // split encroached segments first
    bool changed = true;
    while (changed && steiner < opts.max_steiner) {
        changed = false;
        for (size_t si = 0; si < subsegs.size(); ++si) {
            if (subseg_len(subsegs[si]) <= 2 * min_len) continue;
            bool enc = false;
            for (size_t vi = 4; vi < T.pts.size() && !enc; ++vi) {
                if (static_cast<int>(vi) == subsegs[si].a || static_cast<int>(vi) == subsegs[si].b)
                    continue;
                if (encroached_by(subsegs[si], T.pts[vi])) enc = true;
            }
            if (enc) {
                split_subseg(si);
                changed = true;
            }
        }
    }

    // then fix bad / oversized triangles by circumcenter insertion
    for (int round = 0; round < opts.max_steiner && steiner < opts.max_steiner; ++round) {
        int worst = -1;
        double worst_score = 0.0;
        for (size_t t = 0; t < T.tris.size(); ++t) {
            if (!T.tris[t].alive) continue;
            const auto& tr = T.tris[t];
            bool super = false;
            for (int i = 0; i < 3; ++i)
                if (tr.v[i] < 4) super = true;
            if (super) continue;
            const Vec2 a = T.pts[tr.v[0]], b = T.pts[tr.v[1]], c = T.pts[tr.v[2]];
            const Vec2 cen = (a + b + c) / 3.0;
            if (!point_in_regions(cen)) continue;
            const double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
            const double lmin = std::min({la, lb, lc});
            const double lmax = std::max({la, lb, lc});
            if (lmin < 2 * min_len) continue;  // protected (small input angles)
            const double area = std::abs(tri_area(a, b, c));
            // law of sines: sin(alpha_min) = 2*area / (product of the two longer sides)
            const double s_min = 2.0 * area / (la * lb * lc / lmin);
            double score = 0.0;
            if (lmax > size_bound) score = std::max(score, lmax / size_bound);
            if (s_min < std::sin(min_angle)) score = std::max(score, std::sin(min_angle) / std::max(s_min, 1e-12));
            if (score > worst_score + 1e-12) {
                worst_score = score;
                worst = static_cast<int>(t);
            }
        }
        if (worst < 0) break;

        const auto& tr = T.tris[worst];
        const Vec2 a = T.pts[tr.v[0]], b = T.pts[tr.v[1]], c = T.pts[tr.v[2]];
        // circumcenter
        const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        if (std::abs(d) < 1e-30) break;
        const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
        const Vec2 cc{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                      (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};

        int enc_seg = -1;
        for (size_t si = 0; si < subsegs.size(); ++si) {
            if (encroached_by(subsegs[si], cc) && subseg_len(subsegs[si]) > 2 * min_len) {
                enc_seg = static_cast<int>(si);
                break;
            }
        }
        if (enc_seg >= 0) {
            split_subseg(static_cast<size_t>(enc_seg));
            continue;
        }
        if (!point_in_regions(cc)) {
            // circumcenter escaped across a protected short segment; accept triangle
            // by excluding it from further consideration via a tiny perturbation:
            // insert the off-center point toward the triangle instead
            const Vec2 cen = (a + b + c) / 3.0;
            const Vec2 q = cen + (cc - cen) * 0.5;
            if (!point_in_regions(q)) break;
            T.insert(q);
            ++steiner;
            continue;
        }
        T.insert(cc);
        ++steiner;
    }

    // --- extract kept triangles ----------------------------------------
    Mesh mesh;
    mesh.arcs = pslg.arcs;
    std::vector<int> node_map(T.pts.size(), -1);
    std::vector<std::array<int, 3>> kept;
    for (const auto& tr : T.tris) {
        if (!tr.alive) continue;
        bool super = false;
        for (int i = 0; i < 3; ++i)
            if (tr.v[i] < 4) super = true;
        if (super) continue;
        const Vec2 cen = (T.pts[tr.v[0]] + T.pts[tr.v[1]] + T.pts[tr.v[2]]) / 3.0;
        if (!point_in_regions(cen)) continue;
        kept.push_back({tr.v[0], tr.v[1], tr.v[2]});
    }
    // deterministic node numbering: order of first appearance after sorting
    // triangles by their vertex coordinates
    std::sort(kept.begin(), kept.end(), [&](const auto& x, const auto& y) {
        const Vec2 cx = (T.pts[x[0]] + T.pts[x[1]] + T.pts[x[2]]) / 3.0;
        const Vec2 cy = (T.pts[y[0]] + T.pts[y[1]] + T.pts[y[2]]) / 3.0;
        if (cx.x != cy.x) return cx.x < cy.x;
        return cx.y < cy.y;
    });
    for (const auto& t : kept)
        for (int i = 0; i < 3; ++i)
            if (node_map[t[i]] < 0) {
                node_map[t[i]] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(T.pts[t[i]]);
            }
    for (const auto& t : kept)
        mesh.triangles.push_back({node_map[t[0]], node_map[t[1]], node_map[t[2]]});

    // classify boundary vs slit edges
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles)
        for (int i = 0; i < 3; ++i) {
            int u = t[i], v = t[(i + 1) % 3];
            if (u > v) std::swap(u, v);
            edge_count[{u, v}]++;
        }
    for (const auto& [k, info] : T.constraints) {
        const int a0 = static_cast<int>(k >> 32);
        const int b0 = static_cast<int>(k & 0xffffffffu);
        const int a = node_map[a0], b = node_map[b0];
        if (a < 0 || b < 0) continue;
        int u = a, v = b;
        if (u > v) std::swap(u, v);
        auto it = edge_count.find({u, v});
        if (it == edge_count.end()) continue;
        if (it->second == 1) {
            mesh.boundary_edges.push_back({u, v, info.marker, info.arc});
        } else if (info.slit) {
            mesh.slit_edges.push_back({u, v, info.marker, info.arc});
        }
    }
    // any unconstrained single-count edge would indicate a bug; surface it
    size_t nb = 0;
    for (const auto& [e, c] : edge_count)
        if (c == 1) ++nb;
    if (nb != mesh.boundary_edges.size())
        throw MeshError("boundary edges not covered by constraints");
    std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
              [](const BoundaryEdge& x, const BoundaryEdge& y) {
                  return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    std::sort(mesh.slit_edges.begin(), mesh.slit_edges.end(),
              [](const BoundaryEdge& x, const BoundaryEdge& y) {
                  return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    mesh.level = 0;
    mesh.check_valid();
    return mesh;
}

namespace {

struct RawSeg {
    Vec2 a, b;
    int marker = 0;
    int arc = -1;
    bool slit = false;
};

// split raw segments at endpoints of other segments lying on them (handles
// the junction lying on the basic-domain edge and slit endpoints)
std::vector<RawSeg> split_at_collinear_points(std::vector<RawSeg> segs) {
    std::vector<Vec2> endpoints;
    for (const auto& s : segs) {
        endpoints.push_back(s.a);
        endpoints.push_back(s.b);
    }
    std::vector<RawSeg> out;
    for (const auto& s : segs) {
        const Vec2 d = s.b - s.a;
        const double len = norm(d);
        std::vector<double> ts{0.0, 1.0};
        for (const auto& p : endpoints) {
            const double t = dot(p - s.a, d) / (len * len);
            if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
            const Vec2 proj = s.a + d * t;
            if (norm(p - proj) <= kCollinearTol) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                 ts.end());
        for (size_t i = 0; i + 1 < ts.size(); ++i) {
            RawSeg piece = s;
            piece.a = s.a + d * ts[i];
            piece.b = s.a + d * ts[i + 1];
            out.push_back(piece);
        }
    }
    return out;
}

void add_polygon_segments(std::vector<RawSeg>& segs, const Polygon& poly,
                          const std::vector<ArcEdge>& arcs, int marker,
                          std::vector<Circle>& circles, std::vector<int>& arc_of_edge) {
    const size_t n = poly.size();
    arc_of_edge.assign(n, -1);
    for (const auto& ae : arcs) {
        circles.push_back({ae.center, ae.radius});
        arc_of_edge[ae.first_vertex] = static_cast<int>(circles.size()) - 1;
    }
    for (size_t i = 0; i < n; ++i) {
        segs.push_back({poly[i], poly[(i + 1) % n], marker, arc_of_edge[i], false});
    }
}

// subdivide a segment to pieces of length <= h; arc segments are subdivided
// along the true circle
void subdivide(const RawSeg& s, double h, const std::vector<Circle>& circles, Pslg& pslg) {
    auto add_point = [&](const Vec2& p) {
        pslg.points.push_back(p);
        return static_cast<int>(pslg.points.size()) - 1;
    };
    std::vector<int> chain;
    if (s.arc >= 0) {
        const Circle& c = circles[s.arc];
        const double phi_a = std::atan2(s.a.y - c.center.y, s.a.x - c.center.x);
        double phi_b = std::atan2(s.b.y - c.center.y, s.b.x - c.center.x);
        while (phi_b - phi_a > std::numbers::pi) phi_b -= 2 * std::numbers::pi;
        while (phi_b - phi_a < -std::numbers::pi) phi_b += 2 * std::numbers::pi;
        const double arclen = std::abs(phi_b - phi_a) * c.radius;
        const int nseg = std::max(1, static_cast<int>(std::ceil(arclen / h)));
        chain.push_back(add_point(s.a));
        for (int i = 1; i < nseg; ++i) {
            const double phi = phi_a + (phi_b - phi_a) * i / nseg;
            chain.push_back(add_point(c.center + Vec2{std::cos(phi), std::sin(phi)} * c.radius));
        }
        chain.push_back(add_point(s.b));
    } else {
        const double len = norm(s.b - s.a);
        const int nseg = std::max(1, static_cast<int>(std::ceil(len / h)));
        chain.push_back(add_point(s.a));
        for (int i = 1; i < nseg; ++i) chain.push_back(add_point(s.a + (s.b - s.a) * (double(i) / nseg)));
        chain.push_back(add_point(s.b));
    }
    for (size_t i = 0; i + 1 < chain.size(); ++i)
        pslg.segments.push_back({chain[i], chain[i + 1], s.marker, s.arc, s.slit});
}

}  // namespace

Mesh generate(const DomainSpec& spec, double target_h) {
    spec.validate();
    if (target_h <= 0.0) throw MeshError("target_h must be positive");

    Pslg pslg;
    std::vector<RawSeg> raw;
    std::vector<int> arc_of_edge;
    {
        std::vector<ArcEdge> none;
        add_polygon_segments(raw, spec.basic, none, 0, pslg.arcs, arc_of_edge);
    }
    add_polygon_segments(raw, spec.branch, spec.branch_arcs, 0, pslg.arcs, arc_of_edge);
    for (const auto& s : spec.slits) raw.push_back({s.a, s.b, 0, -1, true});

    raw = split_at_collinear_points(raw);

    // drop duplicate segments (the junction appears in both polygons)
    std::vector<RawSeg> dedup;
    for (const auto& s : raw) {
        bool dup = false;
        for (const auto& t : dedup) {
            if ((norm(s.a - t.a) <= kPointTol && norm(s.b - t.b) <= kPointTol) ||
                (norm(s.a - t.b) <= kPointTol && norm(s.b - t.a) <= kPointTol)) {
                dup = true;
                break;
            }
        }
        if (!dup) dedup.push_back(s);
    }

    for (const auto& s : dedup) subdivide(s, target_h, pslg.arcs, pslg);
    pslg.regions = {spec.basic, spec.branch};

    MeshOptions opts;
    opts.target_h = target_h;
    return triangulate_pslg(pslg, opts);
}

Mesh generate_rectangle(double w, double h, double target_h, int ml, int mr, int mb, int mt) {
    Pslg pslg;
    pslg.points = {{0, 0}, {w, 0}, {w, h}, {0, h}};
    std::vector<RawSeg> raw = {{{0, 0}, {w, 0}, mb, -1, false},
                               {{w, 0}, {w, h}, mr, -1, false},
                               {{w, h}, {0, h}, mt, -1, false},
                               {{0, h}, {0, 0}, ml, -1, false}};
    pslg.points.clear();
    for (const auto& s : raw) subdivide(s, target_h, pslg.arcs, pslg);
    pslg.regions = {{{0, 0}, {w, 0}, {w, h}, {0, h}}};
    MeshOptions opts;
    opts.target_h = target_h;
    return triangulate_pslg(pslg, opts);
}

Mesh refine(const Mesh& mesh) {
    Mesh out;
    out.nodes = mesh.nodes;
    out.arcs = mesh.arcs;
    out.level = mesh.level + 1;

    std::unordered_map<uint64_t, int> midpoint;
    std::unordered_map<uint64_t, const BoundaryEdge*> curved;
    for (const auto& be : mesh.boundary_edges)
        if (be.arc >= 0) curved[edge_key(be.a, be.b)] = &be;
    for (const auto& se : mesh.slit_edges)
        if (se.arc >= 0) curved[edge_key(se.a, se.b)] = &se;

    auto get_mid = [&](int a, int b) {
        const uint64_t k = edge_key(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        Vec2 m = (mesh.nodes[a] + mesh.nodes[b]) * 0.5;
        auto ci = curved.find(k);
        if (ci != curved.end()) m = arc_midpoint(mesh.nodes[a], mesh.nodes[b], mesh.arcs[ci->second->arc]);
        out.nodes.push_back(m);
        const int id = static_cast<int>(out.nodes.size()) - 1;
        midpoint[k] = id;
        return id;
    };

    for (const auto& t : mesh.triangles) {
        const int m01 = get_mid(t[0], t[1]);
        const int m12 = get_mid(t[1], t[2]);
        const int m20 = get_mid(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }

    auto split_edges = [&](const std::vector<BoundaryEdge>& in, std::vector<BoundaryEdge>& dst) {
        for (const auto& be : in) {
            const int m = get_mid(be.a, be.b);
            dst.push_back({std::min(be.a, m), std::max(be.a, m), be.marker, be.arc});
            dst.push_back({std::min(m, be.b), std::max(m, be.b), be.marker, be.arc});
        }
        std::sort(dst.begin(), dst.end(), [](const BoundaryEdge& x, const BoundaryEdge& y) {
            return std::tie(x.a, x.b) < std::tie(y.a, y.b);
        });
    };
    split_edges(mesh.boundary_edges, out.boundary_edges);
    split_edges(mesh.slit_edges, out.slit_edges);
    return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "branchlap-mesh 1\n";
    os << std::setprecision(17);
    os << mesh.level << "\n";
    os << mesh.nodes.size() << "\n";
    for (const auto& p : mesh.nodes) os << p.x << " " << p.y << "\n";
    os << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges)
        os << e.a << " " << e.b << " " << e.marker << " " << e.arc << "\n";
    os << mesh.slit_edges.size() << "\n";
    for (const auto& e : mesh.slit_edges)
        os << e.a << " " << e.b << " " << e.marker << " " << e.arc << "\n";
    os << mesh.arcs.size() << "\n";
    for (const auto& c : mesh.arcs) os << c.center.x << " " << c.center.y << " " << c.radius << "\n";
}

Mesh read_mesh(std::istream& is) {
    std::string tag;
    int version = 0;
    is >> tag >> version;
    if (tag != "branchlap-mesh" || version != 1) throw MeshError("unrecognized mesh format");
    Mesh mesh;
    size_t n = 0;
    is >> mesh.level >> n;
    mesh.nodes.resize(n);
    for (auto& p : mesh.nodes) is >> p.x >> p.y;
    is >> n;
    mesh.triangles.resize(n);
    for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
    is >> n;
    mesh.boundary_edges.resize(n);
    for (auto& e : mesh.boundary_edges) is >> e.a >> e.b >> e.marker >> e.arc;
    is >> n;
    mesh.slit_edges.resize(n);
    for (auto& e : mesh.slit_edges) is >> e.a >> e.b >> e.marker >> e.arc;
    is >> n;
    mesh.arcs.resize(n);
    for (auto& c : mesh.arcs) is >> c.center.x >> c.center.y >> c.radius;
    if (!is) throw MeshError("truncated mesh file");
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw MeshError("cannot open " + path + " for writing");
    write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MeshError("cannot open " + path);
    return read_mesh(is);
}

}  // namespace branchlap
