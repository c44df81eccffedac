#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfem/mesh.hpp"
#include "wfem/quadrature.hpp"

namespace wfem {

enum class MeasureSupport { Interior, Gamma2 };

struct Atom {
    Vec2 pos;
    double mass = 0.0;
};

// density catalogue, addressed by symbolic id for serialization:
//   "one" | "const(c)" | "gauss(cx,cy,s)" | "cos_k(k)"  (cos_k: polar-angle mode)
inline std::function<double(Vec2)> density_from_id(const std::string& id) {
    if (id.empty() || id == "none") return {};
    if (id == "one") return [](Vec2) { return 1.0; };
    if (id.rfind("const(", 0) == 0 && id.back() == ')') {
        double c;
        if (std::sscanf(id.c_str(), "const(%lf)", &c) == 1)
            return [c](Vec2) { return c; };
    }
    if (id.rfind("gauss(", 0) == 0 && id.back() == ')') {
        double cx, cy, s;
        if (std::sscanf(id.c_str(), "gauss(%lf,%lf,%lf)", &cx, &cy, &s) == 3 && s > 0)
            return [cx, cy, s](Vec2 p) {
                double q = (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
                return std::exp(-0.5 * q / (s * s));
            };
    }
    if (id.rfind("cos_k(", 0) == 0 && id.back() == ')') {
        double k;
        if (std::sscanf(id.c_str(), "cos_k(%lf)", &k) == 1)
            return [k](Vec2 p) { return std::cos(k * std::atan2(p.y, p.x)); };
    }
    throw std::invalid_argument("density_from_id: unknown density id " + id);
}

struct MeasureData {
    std::vector<Atom> atoms;
    std::string density_id; // "" = no density
    MeasureSupport support = MeasureSupport::Interior;
};

inline nlohmann::json measure_to_json(const MeasureData& m) {
    nlohmann::json atoms = nlohmann::json::array();
    for (auto& a : m.atoms)
        atoms.push_back({{"x", a.pos.x}, {"y", a.pos.y}, {"mass", a.mass}});
    return {{"atoms", atoms},
            {"density", m.density_id.empty() ? nlohmann::json() : nlohmann::json(m.density_id)},
            {"support", m.support == MeasureSupport::Interior ? "interior" : "gamma2"}};
}

inline MeasureData measure_from_json(const nlohmann::json& j) {
    MeasureData m;
    for (auto& a : j.at("atoms"))
        m.atoms.push_back({{a.at("x").get<double>(), a.at("y").get<double>()},
                           a.at("mass").get<double>()});
    if (j.contains("density") && !j.at("density").is_null())
        m.density_id = j.at("density").get<std::string>();
    density_from_id(m.density_id); // validates the id
    std::string s = j.at("support").get<std::string>();
    if (s == "interior")
        m.support = MeasureSupport::Interior;
    else if (s == "gamma2")
        m.support = MeasureSupport::Gamma2;
    else
        throw std::invalid_argument("measure_from_json: unknown support " + s);
    return m;
}

// the flux part of the boundary as one connected polyline with an arc-length
// coordinate; multiple components are rejected (no configuration here needs them)
struct Gamma2Chain {
    std::vector<int> vertex_ids; // ordered, size = edges + 1; open chain
    std::vector<double> s_of;    // cumulative arc coordinate per chain vertex
    std::vector<Vec2> pts;
    double length = 0.0;

    Vec2 point_at(double s) const {
        if (s <= 0.0) return pts.front();
        if (s >= length) return pts.back();
        size_t lo = 0, hi = s_of.size() - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (s_of[mid] <= s ? lo : hi) = mid;
        }
        double t = (s - s_of[lo]) / (s_of[lo + 1] - s_of[lo]);
        return pts[lo] + t * (pts[lo + 1] - pts[lo]);
    }
    // arc coordinate of the closest chain point
    double project(Vec2 p, double* dist_out = nullptr) const {
        double best = 1e300, sbest = 0.0;
        for (size_t e = 0; e + 1 < pts.size(); ++e) {
            Vec2 a = pts[e], b = pts[e + 1], ab = b - a;
            double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
            double d = norm(p - (a + t * ab));
            if (d < best) {
                best = d;
                sbest = s_of[e] + t * (s_of[e + 1] - s_of[e]);
            }
        }
        if (dist_out) *dist_out = best;
        return sbest;
    }
};

inline std::optional<Gamma2Chain> build_gamma2_chain(const Mesh& mesh) {
    std::vector<const BoundaryEdge*> flux;
    for (auto& be : mesh.boundary_edges)
        if (be.label == EdgeLabel::Flux) flux.push_back(&be);
    if (flux.empty()) return std::nullopt;
    std::map<int, std::vector<const BoundaryEdge*>> touch;
    for (auto* e : flux) {
        touch[e->a].push_back(e);
        touch[e->b].push_back(e);
    }
    int start = -1;
    for (auto& [v, es] : touch) {
        if (es.size() > 2)
            throw std::invalid_argument("gamma2: branching flux boundary");
        if (es.size() == 1 && (start < 0 || v < start)) start = v;
    }
    if (start < 0)
        throw std::invalid_argument("gamma2: flux boundary is closed (Dirichlet part empty?)");
    Gamma2Chain ch;
    ch.vertex_ids.push_back(start);
    const BoundaryEdge* prev = nullptr;
    int cur = start;
    while (true) {
        const BoundaryEdge* next = nullptr;
        for (auto* e : touch[cur])
            if (e != prev) next = e;
        if (!next) break;
        cur = next->a == cur ? next->b : next->a;
        ch.vertex_ids.push_back(cur);
        prev = next;
    }
    if (ch.vertex_ids.size() != flux.size() + 1)
        throw std::invalid_argument("gamma2: flux boundary has several components");
    ch.pts.reserve(ch.vertex_ids.size());
    for (int v : ch.vertex_ids) ch.pts.push_back(mesh.vertices[v]);
    ch.s_of.resize(ch.pts.size());
    ch.s_of[0] = 0.0;
    for (size_t i = 1; i < ch.pts.size(); ++i)
        ch.s_of[i] = ch.s_of[i - 1] + norm(ch.pts[i] - ch.pts[i - 1]);
    ch.length = ch.s_of.back();
    return ch;
}

// C^1 quartic bump profiles with closed-form mass normalization
//   interior: c (1 - |x-x0|^2/r^2)^2 on the r-disk, c = 3 m / (pi r^2)
//   boundary: c (1 - (s-s0)^2/r^2)^2 along the arc,  c = 15 m / (16 r)
struct MollifiedBump {
    Vec2 center;
    double mass = 0.0, r = 0.0;
    double value(Vec2 p) const {
        double q = dot(p - center, p - center) / (r * r);
        if (q >= 1.0) return 0.0;
        double c = 3.0 * mass / (M_PI * r * r);
        return c * (1.0 - q) * (1.0 - q);
    }
};

struct MollifiedArcBump {
    double s0 = 0.0, mass = 0.0, r = 0.0;
    double value(double s) const {
        double q = (s - s0) * (s - s0) / (r * r);
        if (q >= 1.0) return 0.0;
        double c = 15.0 * mass / (16.0 * r);
        return c * (1.0 - q) * (1.0 - q);
    }
};

struct MollifiedMeasure {
    int n = 1;
    MeasureSupport support = MeasureSupport::Interior;
    std::vector<MollifiedBump> bumps;
    std::vector<MollifiedArcBump> arc_bumps;
    std::string density_id;
    Gamma2Chain chain; // only meaningful for boundary measures
    std::vector<std::string> warnings;

    double field_value(Vec2 p) const {
        double v = 0.0;
        for (auto& b : bumps) v += b.value(p);
        if (support == MeasureSupport::Gamma2)
            for (auto& b : arc_bumps) {
                double d = 0.0;
                double s = chain.project(p, &d);
                if (d < 1e-9) v += b.value(s);
            }
        if (!density_id.empty()) v += density_from_id(density_id)(p);
        return v;
    }
};

namespace detail {
inline double polygon_boundary_distance(const Mesh& mesh, Vec2 p) {
    double d = 1e300;
    for (auto& be : mesh.boundary_edges)
        d = std::min(d, dist_point_segment(p, mesh.vertices[be.a], mesh.vertices[be.b]));
    return d;
}

inline bool point_in_mesh(const Mesh& mesh, Vec2 p) {
    double tol = -1e-14 * std::max(1.0, mesh.domain.radius * mesh.domain.radius);
    for (auto& t : mesh.triangles) {
        Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        if (signed_area(a, b, p) >= tol && signed_area(b, c, p) >= tol &&
            signed_area(c, a, p) >= tol)
            return true; // triangles are CCW
    }
    return false;
}
} // namespace detail

// atoms become normalized bumps of radius r0 * 2^-n; r0 is half the distance
// to the boundary (interior) or half the arc distance to the flux-part
// endpoints (boundary); the radius additionally stays inside the mesh polygon
// so no mass leaks across chords
inline MollifiedMeasure mollify(const MeasureData& mu, int n, const Mesh& mesh) {
    if (n < 1) throw std::invalid_argument("mollify: n must be >= 1");
    MollifiedMeasure out;
    out.n = n;
    out.support = mu.support;
    out.density_id = mu.density_id;
    if (mu.support == MeasureSupport::Interior) {
        for (auto& a : mu.atoms) {
            double dex = domain_distance(mesh.domain, a.pos);
            if (dex <= 0.0)
                throw std::invalid_argument("mollify: interior atom not inside the domain");
            if (!detail::point_in_mesh(mesh, a.pos))
                throw std::invalid_argument("mollify: interior atom outside the mesh polygon");
            double dpoly = detail::polygon_boundary_distance(mesh, a.pos);
            double r = 0.5 * dex * std::pow(2.0, -n);
            if (r >= 0.99 * dpoly) {
                out.warnings.push_back("mollify: bump radius shrunk to stay inside the mesh");
                r = 0.99 * dpoly;
            }
            out.bumps.push_back({a.pos, a.mass, r});
        }
    } else {
        auto ch = build_gamma2_chain(mesh);
        if (!ch) {
            if (mu.atoms.empty() && mu.density_id.empty()) return out; // nothing to carry
            throw std::invalid_argument("mollify: boundary measure but flux part is empty");
        }
        out.chain = *ch;
        for (auto& a : mu.atoms) {
            double dist = 0.0;
            double s0 = out.chain.project(a.pos, &dist);
            double snap_tol = 0.5 * mesh.h_max * mesh.h_max + 1e-9 * std::max(1.0, mesh.domain.radius);
            if (dist > snap_tol)
                throw std::invalid_argument("mollify: boundary atom is not on the flux part");
            double dend = std::min(s0, out.chain.length - s0);
            if (dend <= 1e-12)
                throw std::invalid_argument("mollify: boundary atom at a flux-part endpoint");
            out.arc_bumps.push_back({s0, a.mass, 0.5 * dend * std::pow(2.0, -n)});
        }
    }
    return out;
}

namespace detail {

// exact polar tensor rule on the bump support: polynomial test fields up to
// degree ~13 integrate exactly (radial Gauss x uniform angles)
inline double bump_pair_smooth(const MollifiedBump& b,
                               const std::function<double(Vec2)>& phi) {
    const int na = 24;
    const auto& rad = gauss_legendre01(8);
    double c = 3.0 * b.mass / (M_PI * b.r * b.r);
    double acc = 0.0;
    for (auto [t, wt] : rad) {
        double rho = b.r * t;
        double prof = (1.0 - t * t) * (1.0 - t * t);
        double ring = 0.0;
        for (int i = 0; i < na; ++i) {
            double a = 2.0 * M_PI * (i + 0.5) / na;
            ring += phi(b.center + Vec2{rho * std::cos(a), rho * std::sin(a)});
        }
        acc += wt * prof * rho * ring * (2.0 * M_PI / na) * b.r;
    }
    return c * acc;
}

// integral of bump * phi over one triangle, recursing on triangles that
// straddle the support circle; exact once a triangle is fully inside
inline double bump_pair_triangle(const MollifiedBump& b, Vec2 p0, Vec2 p1, Vec2 p2,
                                 const std::function<double(Vec2)>& phi,
                                 int phi_degree, int depth) {
    double d0 = norm(p0 - b.center), d1 = norm(p1 - b.center), d2 = norm(p2 - b.center);
    bool all_in = d0 <= b.r && d1 <= b.r && d2 <= b.r;
    if (!all_in) {
        bool maybe = dist_point_segment(b.center, p0, p1) <= b.r ||
                     dist_point_segment(b.center, p1, p2) <= b.r ||
                     dist_point_segment(b.center, p2, p0) <= b.r;
        if (!maybe) {
            // circle either misses the triangle or sits fully inside it
            double s0 = signed_area(p0, p1, b.center), s1 = signed_area(p1, p2, b.center),
                   s2 = signed_area(p2, p0, b.center);
            bool center_in = (s0 >= 0 && s1 >= 0 && s2 >= 0) || (s0 <= 0 && s1 <= 0 && s2 <= 0);
            if (!center_in) return 0.0;
        }
        if (depth > 0) {
            Vec2 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
            return bump_pair_triangle(b, p0, m01, m20, phi, phi_degree, depth - 1) +
                   bump_pair_triangle(b, m01, p1, m12, phi, phi_degree, depth - 1) +
                   bump_pair_triangle(b, m20, m12, p2, phi, phi_degree, depth - 1) +
                   bump_pair_triangle(b, m01, m12, m20, phi, phi_degree, depth - 1);
        }
    }
    double acc = 0.0;
    for (auto [p, w] : tri_rule(p0, p1, p2, 4 + phi_degree))
        acc += w * b.value(p) * phi(p);
    return acc;
}

} // namespace detail

inline double pair_measure(const MeasureData& mu, const Mesh& mesh,
                           const std::function<double(Vec2)>& phi) {
    double acc = 0.0;
    for (auto& a : mu.atoms) acc += a.mass * phi(a.pos);
    if (!mu.density_id.empty()) {
        auto dens = density_from_id(mu.density_id);
        if (mu.support == MeasureSupport::Interior) {
            for (auto& t : mesh.triangles)
                for (auto [p, w] :
                     tri_rule(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], 8))
                    acc += w * dens(p) * phi(p);
        } else {
            auto ch = build_gamma2_chain(mesh);
            if (!ch) throw std::invalid_argument("pair: boundary measure but flux part empty");
            for (size_t e = 0; e + 1 < ch->pts.size(); ++e) {
                Vec2 a = ch->pts[e], b = ch->pts[e + 1];
                double L = norm(b - a);
                for (auto [t, w] : gauss_legendre01(8))
                    acc += L * w * dens(a + t * (b - a)) * phi(a + t * (b - a));
            }
        }
    }
    return acc;
}

inline double pair_measure(const MollifiedMeasure& mu, const Mesh& mesh,
                           const std::function<double(Vec2)>& phi) {
    double acc = 0.0;
    for (auto& b : mu.bumps) acc += detail::bump_pair_smooth(b, phi);
    for (auto& b : mu.arc_bumps) {
        // clip the support to each chain edge; the integrand is then smooth
        for (size_t e = 0; e + 1 < mu.chain.pts.size(); ++e) {
            double sa = std::max(mu.chain.s_of[e], b.s0 - b.r);
            double sb = std::min(mu.chain.s_of[e + 1], b.s0 + b.r);
            if (sb <= sa) continue;
            for (auto [t, w] : scale_rule(gauss_legendre01(10), sa, sb))
                acc += w * b.value(t) * phi(mu.chain.point_at(t));
        }
    }
    if (!mu.density_id.empty()) {
        MeasureData dens_only;
        dens_only.density_id = mu.density_id;
        dens_only.support = mu.support;
        acc += pair_measure(dens_only, mesh, phi);
    }
    return acc;
}

inline double total_mass(const MollifiedMeasure& mu, const Mesh& mesh) {
    return pair_measure(mu, mesh, [](Vec2) { return 1.0; });
}

inline double total_variation(const MeasureData& mu, const Mesh& mesh) {
    double tv = 0.0;
    for (auto& a : mu.atoms) tv += std::abs(a.mass);
    if (!mu.density_id.empty()) {
        auto dens = density_from_id(mu.density_id);
        tv += [&] {
            double acc = 0.0;
            if (mu.support == MeasureSupport::Interior) {
                for (auto& t : mesh.triangles)
                    for (auto [p, w] : tri_rule(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                                mesh.vertices[t[2]], 8))
                        acc += w * std::abs(dens(p));
            } else {
                auto ch = build_gamma2_chain(mesh);
                if (ch)
                    for (size_t e = 0; e + 1 < ch->pts.size(); ++e) {
                        Vec2 a = ch->pts[e], b = ch->pts[e + 1];
                        for (auto [t, w] : gauss_legendre01(8))
                            acc += norm(b - a) * w * std::abs(dens(a + t * (b - a)));
                    }
            }
            return acc;
        }();
    }
    return tv;
}

// default weak-star test suite: monomials through degree 3 plus two
// trigonometric fields
inline std::vector<std::function<double(Vec2)>> default_test_suite() {
    std::vector<std::function<double(Vec2)>> suite;
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j)
            suite.push_back([i, j](Vec2 p) { return std::pow(p.x, i) * std::pow(p.y, j); });
    suite.push_back([](Vec2 p) { return std::cos(p.x + 2.0 * p.y); });
    suite.push_back([](Vec2 p) { return std::sin(3.0 * p.x - p.y); });
    return suite;
}

inline double weakstar_gap(const MeasureData& mu, const MollifiedMeasure& mn,
                           const Mesh& mesh,
                           const std::vector<std::function<double(Vec2)>>& suite) {
    if (suite.empty()) throw std::invalid_argument("weakstar_gap: empty test suite");
    double gap = 0.0;
    for (auto& phi : suite)
        gap = std::max(gap, std::abs(pair_measure(mu, mesh, phi) - pair_measure(mn, mesh, phi)));
    return gap;
}

// per-vertex pairings against the P1 hat basis, for load assembly
inline std::vector<double> p1_load(const MollifiedMeasure& mu, const Mesh& mesh) {
    std::vector<double> load(mesh.vertices.size(), 0.0);
    auto hat_on = [&](const std::array<int, 3>& t, int local) {
        Vec2 a = mesh.vertices[t[local]];
        Vec2 b = mesh.vertices[t[(local + 1) % 3]];
        Vec2 c = mesh.vertices[t[(local + 2) % 3]];
        double det = cross(b - a, c - a);
        return [b, c, det](Vec2 p) { return cross(b - p, c - p) / det; };
    };
    for (auto& t : mesh.triangles) {
        Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
        for (auto& b : mu.bumps) {
            // quick reject: triangle far from the support
            double dmin = std::min({norm(p0 - b.center), norm(p1 - b.center),
                                    norm(p2 - b.center)}) - b.r;
            if (dmin > std::max({norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)})) continue;
            for (int l = 0; l < 3; ++l) {
                double v = detail::bump_pair_triangle(b, p0, p1, p2, hat_on(t, l), 1, 10);
                load[t[l]] += v;
            }
        }
    }
    if (!mu.density_id.empty()) {
        auto dens = density_from_id(mu.density_id);
        if (mu.support == MeasureSupport::Interior) {
            for (auto& t : mesh.triangles) {
                Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
                for (int l = 0; l < 3; ++l) {
                    auto hat = hat_on(t, l);
                    double acc = 0.0;
                    for (auto [p, w] : tri_rule(p0, p1, p2, 8)) acc += w * dens(p) * hat(p);
                    load[t[l]] += acc;
                }
            }
        }
    }
    if (mu.support == MeasureSupport::Gamma2) {
        // arc bumps and boundary densities pair with the trace of the hats
        auto dens = mu.density_id.empty() ? std::function<double(Vec2)>{}
                                          : density_from_id(mu.density_id);
        for (size_t e = 0; e + 1 < mu.chain.pts.size(); ++e) {
            int va = mu.chain.vertex_ids[e], vb = mu.chain.vertex_ids[e + 1];
            double s_lo = mu.chain.s_of[e], s_hi = mu.chain.s_of[e + 1];
            auto add_segment = [&](double sa, double sb, auto f) {
                if (sb <= sa) return;
                for (auto [s, w] : scale_rule(gauss_legendre01(10), sa, sb)) {
                    double t = (s - s_lo) / (s_hi - s_lo);
                    double v = f(s);
                    load[va] += w * v * (1.0 - t);
                    load[vb] += w * v * t;
                }
            };
            for (auto& b : mu.arc_bumps)
                add_segment(std::max(s_lo, b.s0 - b.r), std::min(s_hi, b.s0 + b.r),
                            [&b](double s) { return b.value(s); });
            if (dens)
                add_segment(s_lo, s_hi,
                            [&](double s) { return dens(mu.chain.point_at(s)); });
        }
    }
    return load;
}

} // namespace wfem
