#pragma once
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wfem/mesh.hpp"
#include "wfem/quadrature.hpp"

namespace wfem {

struct WeightSpec {
    double alpha = 0.0;
    DomainDesc domain;
};

inline void validate_weight_spec(const WeightSpec& s) {
    if (!(s.alpha > -1.0 && s.alpha < 1.0))
        throw std::invalid_argument("weight: alpha must lie in (-1,1)");
}

// d(x,boundary)^alpha with the exact analytic distance; rejects boundary and
// exterior points (for alpha < 0 the value blows up at the boundary)
inline double weight_value(const WeightSpec& s, Vec2 p) {
    validate_weight_spec(s);
    double d = domain_distance(s.domain, p);
    if (d <= 0.0) throw std::domain_error("weight_value: point not strictly inside");
    return std::pow(d, s.alpha);
}

namespace detail {

inline double boundary_tol(const DomainDesc& dom) {
    return 1e-12 * std::max(1.0, dom.radius);
}

// nodes and geometric weights for integrands of the form d^alpha * smooth on
// a triangle whose distance function vanishes at vertex a only; rho graded
// toward a (Jacobi innermost), sigma graded toward the b side (pass as b the
// far vertex closer to the boundary: the smooth factor varies fastest there)
inline void vertex_duffy(std::vector<QPoint2>& out, Vec2 a, Vec2 b, Vec2 c,
                         double alpha) {
    double j2 = 2.0 * std::abs(signed_area(a, b, c));
    auto rho = graded01(1.0 + alpha, 12, 7);
    auto sig = graded01(0.0, 8, 7);
    for (auto [r, wr] : rho)
        for (auto [s, ws] : sig)
            out.push_back({a + r * ((1.0 - s) * (b - a) + s * (c - a)),
                           j2 * r * wr * ws});
}

// distance vanishes on the whole edge ab (square sides): map (t,u) with
// d = t * d(c) exactly; t carries the t^alpha Jacobi rule, de-embedded so the
// caller's d^alpha factor supplies the singular part
inline void transverse_duffy(std::vector<QPoint2>& out, Vec2 a, Vec2 b, Vec2 c,
                             double alpha, int order) {
    double j2 = 2.0 * std::abs(signed_area(a, b, c));
    int n = (order + 5) / 2;
    auto trule = gauss_jacobi01(n, alpha);
    const auto& urule = gauss_legendre01(n);
    for (auto [t, wt] : trule)
        for (auto [u, wu] : urule)
            out.push_back({(1.0 - t) * (a + u * (b - a)) + t * c,
                           j2 * (1.0 - t) * wt * std::pow(t, -alpha) * wu});
}

} // namespace detail

// quadrature for int_T d^alpha p(x) dx, returned as (point, weight * d^alpha)
// pairs; alpha = 0 short-circuits to the plain rule bit-exactly
inline std::vector<QPoint2> element_quadrature(const WeightSpec& spec,
                                               const Mesh& mesh, int tri,
                                               int order) {
    validate_weight_spec(spec);
    if (order < 1) throw std::invalid_argument("element_quadrature: order < 1");
    auto& t = mesh.triangles.at(tri);
    Vec2 v0 = mesh.vertices[t[0]], v1 = mesh.vertices[t[1]], v2 = mesh.vertices[t[2]];
    if (std::abs(signed_area(v0, v1, v2)) < 1e-300)
        throw std::runtime_error("element_quadrature: degenerate triangle");
    if (spec.alpha == 0.0) return tri_rule(v0, v1, v2, order);

    double tol = detail::boundary_tol(spec.domain);
    double d0 = domain_distance(spec.domain, v0);
    double d1 = domain_distance(spec.domain, v1);
    double d2 = domain_distance(spec.domain, v2);
    int on0 = d0 <= tol, on1 = d1 <= tol, on2 = d2 <= tol;
    int nb = on0 + on1 + on2;

    std::vector<QPoint2> rule;
    if (nb == 0) {
        rule = tri_rule(v0, v1, v2, std::max(order, 9));
    } else if (nb == 1) {
        Vec2 a = on0 ? v0 : on1 ? v1 : v2;
        Vec2 f1 = on0 ? v1 : on1 ? v2 : v0;
        Vec2 f2 = on0 ? v2 : on1 ? v0 : v1;
        double e1 = domain_distance(spec.domain, f1);
        double e2 = domain_distance(spec.domain, f2);
        if (e1 > e2) std::swap(f1, f2);
        detail::vertex_duffy(rule, a, f1, f2, spec.alpha);
    } else if (nb == 2) {
        Vec2 a = on0 ? v0 : v1;
        Vec2 b = on2 ? v2 : v1;
        Vec2 c = !on0 ? v0 : !on1 ? v1 : v2;
        if (spec.domain.kind == DomainDesc::Kind::Square) {
            detail::transverse_duffy(rule, a, b, c, spec.alpha, order);
        } else {
            // chord triangle: split at the chord midpoint so each part has a
            // single boundary vertex; the midpoint side is near-tangential
            Vec2 m = 0.5 * (a + b);
            detail::vertex_duffy(rule, a, m, c, spec.alpha);
            detail::vertex_duffy(rule, b, m, c, spec.alpha);
        }
    } else {
        throw std::runtime_error("element_quadrature: triangle with 3 boundary vertices");
    }
    for (auto& qp : rule) {
        double d = domain_distance(spec.domain, qp.p);
        if (d <= 0.0) throw std::runtime_error("element_quadrature: node left the domain");
        qp.w *= std::pow(d, spec.alpha);
    }
    return rule;
}

struct A2Report {
    double alpha = 0.0;
    double constant_estimate = 1.0;
    int ball_count = 0;
    Vec2 worst_center{};
    double worst_radius = 0.0;
};

inline nlohmann::json a2_to_json(const A2Report& r) {
    return {{"alpha", r.alpha},
            {"constant_estimate", r.constant_estimate},
            {"ball_count", r.ball_count},
            {"worst_ball",
             {{"cx", r.worst_center.x}, {"cy", r.worst_center.y}, {"r", r.worst_radius}}}};
}

// lower bound for the A2 constant by deterministic ball sampling, balls kept
// strictly inside the domain; the quadrature node set per ball is independent
// of alpha, which makes the estimate exactly even in alpha and exactly
// monotone in |alpha| for a fixed seed
inline A2Report a2_constant_estimate(const WeightSpec& spec, int n_balls,
                                     uint64_t seed) {
    validate_weight_spec(spec);
    if (n_balls < 1) throw std::invalid_argument("a2_constant_estimate: n_balls < 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto& rad = gauss_legendre01(16);
    const auto& ang = gauss_legendre01(16);
    A2Report rep;
    rep.alpha = spec.alpha;
    rep.ball_count = n_balls;
    double R = spec.domain.kind == DomainDesc::Kind::Disk ? spec.domain.radius : 1.0;
    Vec2 lo = spec.domain.kind == DomainDesc::Kind::Disk ? Vec2{-R, -R} : Vec2{0.0, 0.0};
    Vec2 hi = spec.domain.kind == DomainDesc::Kind::Disk ? Vec2{R, R} : Vec2{1.0, 1.0};
    for (int b = 0; b < n_balls; ++b) {
        Vec2 c;
        double dc = 0.0;
        do {
            c = {lo.x + (hi.x - lo.x) * uni(rng), lo.y + (hi.y - lo.y) * uni(rng)};
            dc = domain_distance(spec.domain, c);
        } while (dc < 1e-3 * R);
        double r = dc * (0.05 + 0.90 * uni(rng));
        // averages of d^alpha and d^-alpha over the ball, same nodes for both
        double sw = 0.0, sp = 0.0, sm = 0.0;
        for (auto [tr, wr] : rad) {
            for (auto [ta, wa] : ang) {
                double rr = r * tr, aa = 2.0 * M_PI * ta;
                Vec2 p = c + Vec2{rr * std::cos(aa), rr * std::sin(aa)};
                double w = wr * wa * rr; // polar area element
                double d = domain_distance(spec.domain, p);
                sw += w;
                sp += w * std::pow(d, spec.alpha);
                sm += w * std::pow(d, -spec.alpha);
            }
        }
        double prod = (sp / sw) * (sm / sw);
        if (prod > rep.constant_estimate) {
            rep.constant_estimate = prod;
            rep.worst_center = c;
            rep.worst_radius = r;
        }
    }
    return rep;
}

// the one-dimensional product {1/R int_0^R (R-r)^a dr}{1/R int_0^R (R-r)^-a dr}
// via the graded rule; closed form 1/(1-a^2)
inline double a2_radial_product(double alpha, double R = 1.0) {
    if (!(alpha > -1.0 && alpha < 1.0))
        throw std::invalid_argument("a2_radial_product: alpha must lie in (-1,1)");
    double up = 0.0, dn = 0.0;
    for (auto [t, w] : scale_rule(graded01(alpha), 0.0, R)) up += w * std::pow(t, alpha);
    for (auto [t, w] : scale_rule(graded01(-alpha), 0.0, R)) dn += w * std::pow(t, -alpha);
    return (up / R) * (dn / R);
}

} // namespace wfem
