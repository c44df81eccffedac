#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfem/geometry.hpp"

namespace wfem {

struct DomainDesc {
    enum class Kind { Disk, Square };
    Kind kind = Kind::Disk;
    double radius = 1.0; // disk radius; the square is fixed [0,1]^2
};

// exact analytic distance to the domain boundary, never the polygonal one
inline double domain_distance(const DomainDesc& dom, Vec2 p) {
    if (dom.kind == DomainDesc::Kind::Disk) return dom.radius - norm(p);
    return std::min(std::min(p.x, 1.0 - p.x), std::min(p.y, 1.0 - p.y));
}

enum class EdgeLabel { Dirichlet, Flux };

struct BoundaryPartitionRule {
    enum class Kind { FullDirichlet, AngularSplit, AxisSplit };
    Kind kind = Kind::FullDirichlet;
    // AngularSplit: Flux iff edge-midpoint polar angle in [0, param)
    // AxisSplit:    Flux iff edge-midpoint y >= param
    double param = 0.0;
};

struct BoundaryEdge {
    int a = 0, b = 0;
    EdgeLabel label = EdgeLabel::Dirichlet;
};

struct Mesh {
    DomainDesc domain;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW
    std::vector<BoundaryEdge> boundary_edges;
    double h_max = 0.0;
};

inline double mesh_h_max(const Mesh& m) {
    double h = 0.0;
    for (auto& t : m.triangles)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, norm(m.vertices[t[e]] - m.vertices[t[(e + 1) % 3]]));
    return h;
}

inline double distance_to_boundary(const Mesh& m, Vec2 p) {
    double d = domain_distance(m.domain, p);
    if (d < -1e-12 * std::max(1.0, m.domain.radius))
        throw std::domain_error("distance_to_boundary: point outside the domain");
    return std::max(d, 0.0);
}

// invariants: positive areas, edge-manifoldness, boundary edges = edges with
// exactly one adjacent triangle, labels cover the boundary, Dirichlet nonempty
inline void validate_mesh(const Mesh& m) {
    if (m.vertices.empty() || m.triangles.empty())
        throw std::invalid_argument("mesh: empty");
    std::map<std::pair<int, int>, int> edge_count;
    for (auto& t : m.triangles) {
        for (int e : t)
            if (e < 0 || e >= static_cast<int>(m.vertices.size()))
                throw std::invalid_argument("mesh: vertex index out of range");
        if (signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) <= 0.0)
            throw std::invalid_argument("mesh: non-positive triangle area");
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    }
    for (auto& [e, c] : edge_count)
        if (c > 2) throw std::invalid_argument("mesh: edge shared by >2 triangles");
    std::map<std::pair<int, int>, int> bdry; // -> index into boundary_edges
    int ndir = 0;
    for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
        auto& be = m.boundary_edges[i];
        auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
        if (bdry.count(key)) throw std::invalid_argument("mesh: duplicate boundary edge");
        auto it = edge_count.find(key);
        if (it == edge_count.end() || it->second != 1)
            throw std::invalid_argument("mesh: labeled edge is not a boundary edge");
        bdry[key] = static_cast<int>(i);
        if (be.label == EdgeLabel::Dirichlet) ++ndir;
    }
    for (auto& [e, c] : edge_count)
        if (c == 1 && !bdry.count(e))
            throw std::invalid_argument("mesh: unlabeled boundary edge");
    if (ndir == 0) throw std::invalid_argument("mesh: Dirichlet part is empty");
}

inline void apply_partition(Mesh& m, const BoundaryPartitionRule& rule) {
    Vec2 center = m.domain.kind == DomainDesc::Kind::Disk ? Vec2{0.0, 0.0}
                                                          : Vec2{0.5, 0.5};
    for (auto& be : m.boundary_edges) {
        Vec2 mid = 0.5 * (m.vertices[be.a] + m.vertices[be.b]);
        switch (rule.kind) {
        case BoundaryPartitionRule::Kind::FullDirichlet:
            be.label = EdgeLabel::Dirichlet;
            break;
        case BoundaryPartitionRule::Kind::AngularSplit: {
            double ang = std::atan2(mid.y - center.y, mid.x - center.x);
            if (ang < 0.0) ang += 2.0 * M_PI;
            be.label = ang < rule.param ? EdgeLabel::Flux : EdgeLabel::Dirichlet;
            break;
        }
        case BoundaryPartitionRule::Kind::AxisSplit:
            be.label = mid.y >= rule.param - 1e-12 ? EdgeLabel::Flux
                                                   : EdgeLabel::Dirichlet;
            break;
        }
    }
}

namespace detail {
constexpr size_t kMaxTriangles = 6'000'000;

// concentric rings: ring k carries 6k vertices on the circle radius k*R/m,
// annuli triangulated by a two-pointer merge ordered by angle
inline Mesh disk_mesh_unlabeled(double radius, double h_target) {
    int m = static_cast<int>(std::ceil(radius / h_target));
    if (6ull * m * m > kMaxTriangles)
        throw std::length_error("generate_disk_mesh: triangle budget exceeded");
    Mesh mesh;
    mesh.domain = {DomainDesc::Kind::Disk, radius};
    mesh.vertices.push_back({0.0, 0.0});
    std::vector<int> ring_start(m + 1);
    ring_start[0] = 0;
    for (int k = 1; k <= m; ++k) {
        ring_start[k] = static_cast<int>(mesh.vertices.size());
        double r = radius * k / m;
        int nk = 6 * k;
        for (int j = 0; j < nk; ++j) {
            double a = 2.0 * M_PI * j / nk;
            mesh.vertices.push_back({r * std::cos(a), r * std::sin(a)});
        }
    }
    for (int j = 0; j < 6; ++j)
        mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % 6});
    for (int k = 2; k <= m; ++k) {
        int ni = 6 * (k - 1), no = 6 * k;
        int si = ring_start[k - 1], so = ring_start[k];
        int i = 0, j = 0;
        while (i < ni || j < no) {
            double ain = i < ni ? 2.0 * M_PI * (i + 1) / ni : 1e300;
            double aout = j < no ? 2.0 * M_PI * (j + 1) / no : 1e300;
            if (aout <= ain) {
                mesh.triangles.push_back(
                    {si + i % ni, so + j % no, so + (j + 1) % no});
                ++j;
            } else {
                mesh.triangles.push_back(
                    {si + i % ni, so + j % no, si + (i + 1) % ni});
                ++i;
            }
        }
    }
    int so = ring_start[m], no = 6 * m;
    for (int j = 0; j < no; ++j)
        mesh.boundary_edges.push_back({so + j, so + (j + 1) % no, EdgeLabel::Dirichlet});
    mesh.h_max = mesh_h_max(mesh);
    return mesh;
}

// union-jack grid, even cell count: every triangle lies in one wedge of
// min(x,1-x,y,1-y), so the distance is a single linear function per element
inline Mesh square_mesh_unlabeled(double h_target) {
    int n = static_cast<int>(std::ceil(1.0 / h_target));
    if (n % 2) ++n;
    if (2ull * n * n > kMaxTriangles)
        throw std::length_error("generate_square_mesh: triangle budget exceeded");
    Mesh mesh;
    mesh.domain = {DomainDesc::Kind::Square, 1.0};
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.push_back({static_cast<double>(i) / n,
                                     static_cast<double>(j) / n});
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j);
            int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), EdgeLabel::Dirichlet});
        mesh.boundary_edges.push_back({vid(i + 1, n), vid(i, n), EdgeLabel::Dirichlet});
        mesh.boundary_edges.push_back({vid(0, i + 1), vid(0, i), EdgeLabel::Dirichlet});
        mesh.boundary_edges.push_back({vid(n, i), vid(n, i + 1), EdgeLabel::Dirichlet});
    }
    mesh.h_max = mesh_h_max(mesh);
    return mesh;
}
} // namespace detail

inline Mesh generate_disk_mesh(double radius, double h_target,
                               const BoundaryPartitionRule& rule = {}) {
    if (!(radius > 0.0) || !(h_target > 0.0) || !(h_target < radius))
        throw std::invalid_argument("generate_disk_mesh: need 0 < h_target < radius");
    Mesh mesh = detail::disk_mesh_unlabeled(radius, h_target);
    apply_partition(mesh, rule);
    validate_mesh(mesh);
    return mesh;
}

inline Mesh generate_square_mesh(double h_target,
                                 const BoundaryPartitionRule& rule = {}) {
    if (!(h_target > 0.0) || !(h_target < 1.0))
        throw std::invalid_argument("generate_square_mesh: need 0 < h_target < 1");
    Mesh mesh = detail::square_mesh_unlabeled(h_target);
    apply_partition(mesh, rule);
    validate_mesh(mesh);
    return mesh;
}

// red refinement; new boundary vertices are projected to the exact curve;
// boundary labels are inherited, never recomputed
inline Mesh refine(const Mesh& m) {
    if (4ull * m.triangles.size() > detail::kMaxTriangles)
        throw std::length_error("refine: triangle budget exceeded");
    Mesh out;
    out.domain = m.domain;
    out.vertices = m.vertices;
    std::map<std::pair<int, int>, int> midpoint;
    std::map<std::pair<int, int>, EdgeLabel> bdry_label;
    for (auto& be : m.boundary_edges)
        bdry_label[{std::min(be.a, be.b), std::max(be.a, be.b)}] = be.label;
    auto mid = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Vec2 p = 0.5 * (m.vertices[a] + m.vertices[b]);
        if (bdry_label.count(key) && m.domain.kind == DomainDesc::Kind::Disk) {
            double r = norm(p);
            if (r > 0.0) p = (m.domain.radius / r) * p;
        }
        int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(p);
        midpoint[key] = id;
        return id;
    };
    for (auto& t : m.triangles) {
        int a = t[0], b = t[1], c = t[2];
        int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
    }
    for (auto& be : m.boundary_edges) {
        int mm = mid(be.a, be.b);
        out.boundary_edges.push_back({be.a, mm, be.label});
        out.boundary_edges.push_back({mm, be.b, be.label});
    }
    out.h_max = mesh_h_max(out);
    validate_mesh(out);
    return out;
}

// flags over vertices: on the (polygonal) boundary / endpoint of a Dirichlet edge
inline std::vector<char> boundary_vertex_flags(const Mesh& m) {
    std::vector<char> f(m.vertices.size(), 0);
    for (auto& be : m.boundary_edges) f[be.a] = f[be.b] = 1;
    return f;
}

inline std::vector<char> dirichlet_vertex_flags(const Mesh& m) {
    std::vector<char> f(m.vertices.size(), 0);
    for (auto& be : m.boundary_edges)
        if (be.label == EdgeLabel::Dirichlet) f[be.a] = f[be.b] = 1;
    return f;
}

inline double polygon_area(const Mesh& m) {
    double s = 0.0;
    for (auto& t : m.triangles)
        s += signed_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    return s;
}

inline double boundary_length(const Mesh& m, EdgeLabel label) {
    double s = 0.0;
    for (auto& be : m.boundary_edges)
        if (be.label == label) s += norm(m.vertices[be.b] - m.vertices[be.a]);
    return s;
}

} // namespace wfem
