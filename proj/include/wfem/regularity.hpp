#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfem/solver.hpp"

namespace wfem {

// phi_theta(r) = int_0^r (1+t)^-theta dt, extended oddly; closed form
// ((1+r)^{1-theta} - 1)/(1-theta), stable near theta = 1 via expm1/log1p
inline double phi_theta(double r, double theta) {
    if (!(theta > 1.0)) throw std::invalid_argument("phi_theta: theta must exceed 1");
    double a = std::abs(r);
    double v = -std::expm1((1.0 - theta) * std::log1p(a)) / (theta - 1.0);
    return r < 0 ? -v : v;
}

// psi(s) = inf((s-t)^+, 1) for s >= 0, odd extension
inline double psi_trunc(double s, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("psi_trunc: level must be >= 0");
    double v = std::min(std::max(std::abs(s) - t, 0.0), 1.0);
    return s < 0 ? -v : v;
}

namespace detail {

struct ElementView {
    std::array<int, 3> ids;
    Vec2 a, b, c;
    Vec2 grad;    // gradient of the P1 interpolant, constant per element
    double area2; // twice the signed area
    double value(Vec2 p, const std::vector<double>& u) const {
        double l0 = cross(b - p, c - p) / area2;
        double l1 = cross(c - p, a - p) / area2;
        double l2 = 1.0 - l0 - l1;
        return l0 * u[ids[0]] + l1 * u[ids[1]] + l2 * u[ids[2]];
    }
};

inline ElementView element_view(const Mesh& mesh, size_t ti, const std::vector<double>& u) {
    auto& t = mesh.triangles[ti];
    ElementView ev;
    ev.ids = t;
    ev.a = mesh.vertices[t[0]];
    ev.b = mesh.vertices[t[1]];
    ev.c = mesh.vertices[t[2]];
    ev.area2 = cross(ev.b - ev.a, ev.c - ev.a);
    Vec2 g0{(ev.b.y - ev.c.y) / ev.area2, (ev.c.x - ev.b.x) / ev.area2};
    Vec2 g1{(ev.c.y - ev.a.y) / ev.area2, (ev.a.x - ev.c.x) / ev.area2};
    Vec2 g2{(ev.a.y - ev.b.y) / ev.area2, (ev.b.x - ev.a.x) / ev.area2};
    ev.grad = u[t[0]] * g0 + u[t[1]] * g1 + u[t[2]] * g2;
    return ev;
}

constexpr int kFunctionalOrder = 6;

} // namespace detail

// int_Omega d^alpha |grad u|^2 / (1+|u|)^theta, the quantity the uniform
// energy estimates are stated in
inline double phi_theta_energy(const Mesh& mesh, const std::vector<double>& u,
                               double theta, double alpha) {
    if (!(theta > 1.0)) throw std::invalid_argument("phi_theta_energy: theta must exceed 1");
    WeightSpec w{alpha, mesh.domain};
    double acc = 0.0;
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto ev = detail::element_view(mesh, ti, u);
        double g2 = dot(ev.grad, ev.grad);
        if (g2 == 0.0) continue;
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti),
                                           detail::kFunctionalOrder))
            acc += qp.w * g2 / std::pow(1.0 + std::abs(ev.value(qp.p, u)), theta);
    }
    return acc;
}

// (int d^alpha (|u|^q + |grad u|^q))^{1/q}
inline double weighted_W1q_norm(const Mesh& mesh, const std::vector<double>& u,
                                double q, double alpha) {
    // q > 2 is past the critical exponent: the norm is still a well-defined
    // quadrature sum there, and refinement studies rely on watching it blow up
    if (!(q >= 1.0) || !std::isfinite(q))
        throw std::invalid_argument("weighted_W1q_norm: q must be >= 1");
    WeightSpec w{alpha, mesh.domain};
    double acc = 0.0;
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto ev = detail::element_view(mesh, ti, u);
        double gq = std::pow(norm(ev.grad), q);
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti),
                                           detail::kFunctionalOrder))
            acc += qp.w * (std::pow(std::abs(ev.value(qp.p, u)), q) + gq);
    }
    return std::pow(acc, 1.0 / q);
}

// (int_{flux part} |trace u|^gamma)^{1/gamma}
inline double boundary_Lgamma_norm(const Mesh& mesh, const std::vector<double>& u,
                                   double gamma) {
    if (!(gamma > 1.0))
        throw std::invalid_argument("boundary_Lgamma_norm: gamma must exceed 1");
    bool any = false;
    for (auto& be : mesh.boundary_edges)
        if (be.label == EdgeLabel::Flux) any = true;
    if (!any) throw std::domain_error("boundary_Lgamma_norm: flux part is empty");
    return std::pow(boundary_power_integral(mesh, u, gamma), 1.0 / gamma);
}

namespace detail {

// Gagliardo double integral of the P1 trace over all boundary edge pairs.
// Same edge: |u(x)-u(y)| = |slope||x-y| gives int int |x-y|^alpha in closed
// form. Adjacent edges: integrand ~ (xi+eta)^alpha at the shared corner,
// handled by grading both arc parameters toward it. Distant pairs are smooth.
inline double gagliardo_double_sum(const Mesh& mesh, const std::vector<double>& u,
                                   double q, double sstar) {
    struct Edge {
        Vec2 a, b;
        double ua, ub, len;
    };
    std::vector<Edge> edges;
    for (auto& be : mesh.boundary_edges)
        edges.push_back({mesh.vertices[be.a], mesh.vertices[be.b], u[be.a], u[be.b],
                         norm(mesh.vertices[be.b] - mesh.vertices[be.a])});
    double p = q - 1.0 - sstar * q; // same-edge kernel exponent, > -1
    double acc = 0.0;
    const auto& graded = graded01(0.0, 10, 5);
    const auto& gl = gauss_legendre01(5);
    auto point = [](const Edge& e, double t) { return e.a + t * (e.b - e.a); };
    auto val = [](const Edge& e, double t) { return e.ua + t * (e.ub - e.ua); };
    for (size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        double slope = (e.ub - e.ua) / e.len;
        acc += std::pow(std::abs(slope), q) * 2.0 * std::pow(e.len, p + 2.0) /
               ((p + 1.0) * (p + 2.0));
        for (size_t j = i + 1; j < edges.size(); ++j) {
            const Edge& f = edges[j];
            // shared endpoint, if any, as parameter values (t_e, t_f)
            double te = -1, tf = -1;
            if (norm(e.a - f.a) < 1e-14) te = 0, tf = 0;
            if (norm(e.a - f.b) < 1e-14) te = 0, tf = 1;
            if (norm(e.b - f.a) < 1e-14) te = 1, tf = 0;
            if (norm(e.b - f.b) < 1e-14) te = 1, tf = 1;
            double part = 0.0;
            if (te >= 0) {
                for (auto [x, wx] : graded)
                    for (auto [y, wy] : graded) {
                        double s = te == 0 ? x : 1.0 - x;
                        double t = tf == 0 ? y : 1.0 - y;
                        double d = norm(point(e, s) - point(f, t));
                        double du = std::abs(val(e, s) - val(f, t));
                        part += wx * wy * std::pow(du, q) /
                                std::pow(d, 1.0 + sstar * q);
                    }
            } else {
                for (auto [x, wx] : gl)
                    for (auto [y, wy] : gl) {
                        double d = norm(point(e, x) - point(f, y));
                        double du = std::abs(val(e, x) - val(f, y));
                        part += wx * wy * std::pow(du, q) /
                                std::pow(d, 1.0 + sstar * q);
                    }
            }
            acc += 2.0 * part * e.len * f.len; // both (x,y) orderings
        }
    }
    return acc;
}

} // namespace detail

// L^q(boundary) plus Gagliardo seminorm of order s* = 1 - (1+alpha)/q, the
// trace space the interior regularity embeds into
inline double trace_gagliardo_seminorm(const Mesh& mesh, const std::vector<double>& u,
                                       double q, double alpha) {
    if (!(q > 1.0)) throw std::invalid_argument("trace_gagliardo: q must exceed 1");
    double sstar = 1.0 - (1.0 + alpha) / q;
    if (!(sstar > 0.0 && sstar < 1.0))
        throw std::domain_error(
            "trace_gagliardo: fractional order 1-(1+alpha)/q = " +
            std::to_string(sstar) + " lies outside (0,1)");
    return std::pow(detail::gagliardo_double_sum(mesh, u, q, sstar), 1.0 / q);
}

inline double trace_gagliardo_norm(const Mesh& mesh, const std::vector<double>& u,
                                   double q, double alpha) {
    double semi = trace_gagliardo_seminorm(mesh, u, q, alpha);
    const auto& rule = gauss_legendre01(detail::kBoundaryRulePoints);
    double lq = 0.0;
    for (auto& be : mesh.boundary_edges) {
        double L = norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
        for (auto [t, wq] : rule)
            lq += L * wq * std::pow(std::abs(u[be.a] * (1.0 - t) + u[be.b] * t), q);
    }
    return std::pow(lq + std::pow(semi, q), 1.0 / q);
}

// the truncation-level quantities of the equi-integrability argument:
// E_t = {|u| >= t} in Omega, E0_t its trace on the flux part
struct LevelSetTail {
    double boundary_tail = 0.0;         // int_{E0_t} |u|^gamma
    double boundary_measure_tail = 0.0; // int_{E0_t} |mu2_n|
    double interior_mass_tail = 0.0;    // int_{E_t} |mu1_n|
    double gradient_tail = 0.0;         // int_{E_t} d^alpha |grad u|^2
    double lebesgue_E = 0.0;            // L(E_t), unweighted
};

namespace detail {

// int over the triangle of |mu-field| restricted to {|u| >= t}; triangles
// straddling a bump-support circle are quadrisected until the fixed rule
// resolves the profile
inline double mass_tail_tri(const ElementView& ev, Vec2 a, Vec2 b, Vec2 c,
                            const MollifiedMeasure& mol, const std::vector<double>& u,
                            double t, int depth) {
    bool split = false;
    if (depth > 0)
        for (auto& bp : mol.bumps) {
            double dmin = std::min({dist_point_segment(bp.center, a, b),
                                    dist_point_segment(bp.center, b, c),
                                    dist_point_segment(bp.center, c, a)});
            bool center_inside = cross(b - a, bp.center - a) > 0 &&
                                 cross(c - b, bp.center - b) > 0 &&
                                 cross(a - c, bp.center - c) > 0;
            if (center_inside) dmin = 0.0;
            double dmax = std::max({norm(a - bp.center), norm(b - bp.center),
                                    norm(c - bp.center)});
            if (dmin < bp.r && dmax > bp.r) {
                split = true;
                break;
            }
        }
    if (split) {
        Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
        return mass_tail_tri(ev, a, ab, ca, mol, u, t, depth - 1) +
               mass_tail_tri(ev, ab, b, bc, mol, u, t, depth - 1) +
               mass_tail_tri(ev, ca, bc, c, mol, u, t, depth - 1) +
               mass_tail_tri(ev, ab, bc, ca, mol, u, t, depth - 1);
    }
    double acc = 0.0;
    for (auto [p, wq] : tri_rule(a, b, c, kFunctionalOrder))
        if (std::abs(ev.value(p, u)) >= t) acc += wq * std::abs(mol.field_value(p));
    return acc;
}

} // namespace detail

inline LevelSetTail level_set_tail(const Mesh& mesh, const std::vector<double>& u,
                                   double t, double gamma, double alpha,
                                   const MollifiedMeasure& mol1,
                                   const MollifiedMeasure& mol2) {
    if (!(t >= 0.0)) throw std::invalid_argument("level_set_tail: t must be >= 0");
    LevelSetTail out;
    WeightSpec w{alpha, mesh.domain};
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto ev = detail::element_view(mesh, ti, u);
        double g2 = dot(ev.grad, ev.grad);
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti),
                                           detail::kFunctionalOrder))
            if (std::abs(ev.value(qp.p, u)) >= t) out.gradient_tail += qp.w * g2;
        for (auto [p, wq] : tri_rule(ev.a, ev.b, ev.c, detail::kFunctionalOrder))
            if (std::abs(ev.value(p, u)) >= t) out.lebesgue_E += wq;
        out.interior_mass_tail +=
            detail::mass_tail_tri(ev, ev.a, ev.b, ev.c, mol1, u, t, 8);
    }
    const auto& rule = gauss_legendre01(detail::kBoundaryRulePoints);
    for (auto& be : mesh.boundary_edges) {
        if (be.label != EdgeLabel::Flux) continue;
        Vec2 a = mesh.vertices[be.a], b = mesh.vertices[be.b];
        double L = norm(b - a);
        for (auto [s, wq] : rule) {
            double uv = u[be.a] * (1.0 - s) + u[be.b] * s;
            if (std::abs(uv) < t) continue;
            out.boundary_tail += L * wq * std::pow(std::abs(uv), gamma);
            out.boundary_measure_tail +=
                L * wq * std::abs(mol2.field_value(a + s * (b - a)));
        }
    }
    return out;
}

// split int d^a |grad u|^q <= (phi-energy)^{q/2} (int d^a (1+|u|)^{tq/(2-q)})^{1-q/2}
// exactly as the gradient lemma Hoelder step, on shared quadrature points
struct HolderChain {
    double lhs = 0.0, energy_factor = 0.0, weight_factor = 0.0;
    double rhs() const { return energy_factor * weight_factor; }
};

inline HolderChain holder_chain(const Mesh& mesh, const std::vector<double>& u,
                                double q, double theta, double alpha) {
    if (!(q >= 1.0 && q < 2.0))
        throw std::invalid_argument("holder_chain: q must lie in [1,2)");
    if (!(theta > 1.0)) throw std::invalid_argument("holder_chain: theta must exceed 1");
    WeightSpec w{alpha, mesh.domain};
    double lhs = 0.0, ea = 0.0, wb = 0.0;
    double expo = theta * q / (2.0 - q);
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto ev = detail::element_view(mesh, ti, u);
        double g = norm(ev.grad);
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti),
                                           detail::kFunctionalOrder)) {
            double denom = 1.0 + std::abs(ev.value(qp.p, u));
            lhs += qp.w * std::pow(g, q);
            ea += qp.w * g * g / std::pow(denom, theta);
            wb += qp.w * std::pow(denom, expo);
        }
    }
    return {lhs, std::pow(ea, 0.5 * q), std::pow(wb, 1.0 - 0.5 * q)};
}

// --- refinement/mollification studies ------------------------------------

struct StudyRow {
    int level = 0;
    double h_max = 0.0;
    int n = 0;
    std::string functional;
    double param = 0.0;
    double value = 0.0;
};

struct SlopeFit {
    std::string functional;
    double param = 0.0;
    double slope = 0.0;
    double ci_half = 0.0; // ~95% half-width from the residual spread
    int points = 0;
    bool bounded = false; // |slope| < 0.05 with the interval clear of +-0.15
};

struct RegularityReport {
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<StudyRow> rows;
    std::vector<SlopeFit> fits;
    std::vector<double> delta_grid{0.05, 0.1, 0.2};
    // N = 2: the unweighted critical exponent and the delta-dependent one
    double threshold_alpha0 = 2.0;
    std::vector<double> delta_thresholds() const {
        std::vector<double> th;
        for (double d : delta_grid) th.push_back((4.0 + 2.0 * d) / (3.0 + d));
        return th;
    }
};

// least squares of log(value) against log(h) on the last max(3, count-1)
// points; all-zero series report a zero slope (nothing blows up on nothing)
inline SlopeFit fit_logslope(const std::vector<double>& h,
                             const std::vector<double>& values) {
    if (h.size() != values.size() || h.size() < 3)
        throw std::invalid_argument("fit_logslope: need at least 3 points");
    size_t use = std::max<size_t>(3, h.size() - 1);
    size_t from = h.size() - use;
    SlopeFit fit;
    fit.points = static_cast<int>(use);
    bool all_zero = true;
    for (size_t i = from; i < h.size(); ++i)
        if (values[i] > 1e-300) all_zero = false;
    if (all_zero) {
        fit.bounded = true;
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = static_cast<double>(use);
    for (size_t i = from; i < h.size(); ++i) {
        double x = std::log(h[i]), y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double det = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / det;
    double icpt = (sy - fit.slope * sx) / m;
    double ss = 0.0;
    for (size_t i = from; i < h.size(); ++i) {
        double r = std::log(values[i]) - (icpt + fit.slope * std::log(h[i]));
        ss += r * r;
    }
    double se = use > 2 ? std::sqrt(ss / (m - 2.0) * (m / det)) : 0.0;
    fit.ci_half = 2.0 * se;
    fit.bounded = std::abs(fit.slope) < 0.05 && std::abs(fit.slope) + fit.ci_half < 0.15;
    return fit;
}

struct RegularityStudyOptions {
    int threads = 1;
    int refines_per_level = 1; // >1 shrinks h faster between consecutive levels
    std::vector<double> trace_q; // also tabulate trace_gagliardo_norm at these q
};

// solve on a refinement hierarchy with the mollification index tied to the
// level, and tabulate the weighted Sobolev norms over the q grid
inline RegularityReport regularity_study(const ProblemSpec& spec, int levels,
                                         const std::vector<double>& q_grid,
                                         const std::function<int(int)>& n_rule,
                                         const RegularityStudyOptions& opt = {}) {
    validate_problem_spec(spec);
    if (levels < 3) throw std::invalid_argument("regularity_study: need >= 3 levels");
    if (q_grid.empty()) throw std::invalid_argument("regularity_study: empty q grid");
    if (opt.refines_per_level < 1)
        throw std::invalid_argument("regularity_study: refines_per_level < 1");
    std::vector<Mesh> meshes;
    meshes.push_back(*spec.mesh);
    for (int l = 1; l < levels; ++l) {
        Mesh m = refine(meshes.back());
        for (int s = 1; s < opt.refines_per_level; ++s) m = refine(m);
        meshes.push_back(std::move(m));
    }

    struct LevelOut {
        double h_max;
        int n;
        std::vector<double> norms;
        std::vector<double> trace_norms;
    };
    auto run_level = [&](int l) {
        ProblemSpec s = spec;
        s.mesh = &meshes[l];
        int n = n_rule(l);
        auto sol = solve_regularized(s, n);
        LevelOut out{meshes[l].h_max, n, {}, {}};
        for (double q : q_grid)
            out.norms.push_back(weighted_W1q_norm(meshes[l], sol.coefficients, q, spec.alpha));
        for (double q : opt.trace_q)
            out.trace_norms.push_back(
                trace_gagliardo_norm(meshes[l], sol.coefficients, q, spec.alpha));
        return out;
    };
    std::vector<LevelOut> per_level(levels);
    if (opt.threads > 1) {
        std::vector<std::future<LevelOut>> fut;
        for (int l = 0; l < levels; ++l)
            fut.push_back(std::async(std::launch::async, run_level, l));
        for (int l = 0; l < levels; ++l) per_level[l] = fut[l].get(); // level order
    } else {
        for (int l = 0; l < levels; ++l) per_level[l] = run_level(l);
    }

    RegularityReport rep;
    rep.alpha = spec.alpha;
    rep.gamma = spec.gamma;
    for (int l = 0; l < levels; ++l) {
        for (size_t iq = 0; iq < q_grid.size(); ++iq)
            rep.rows.push_back({l, per_level[l].h_max, per_level[l].n, "w1q_norm",
                                q_grid[iq], per_level[l].norms[iq]});
        for (size_t iq = 0; iq < opt.trace_q.size(); ++iq)
            rep.rows.push_back({l, per_level[l].h_max, per_level[l].n, "trace_gagliardo",
                                opt.trace_q[iq], per_level[l].trace_norms[iq]});
    }
    std::vector<double> hs;
    for (auto& lo : per_level) hs.push_back(lo.h_max);
    auto push_fit = [&](const std::string& name, double param,
                        const std::vector<double>& vals) {
        SlopeFit fit = fit_logslope(hs, vals);
        fit.functional = name;
        fit.param = param;
        rep.fits.push_back(fit);
    };
    for (size_t iq = 0; iq < q_grid.size(); ++iq) {
        std::vector<double> vals;
        for (auto& lo : per_level) vals.push_back(lo.norms[iq]);
        push_fit("w1q_norm", q_grid[iq], vals);
    }
    for (size_t iq = 0; iq < opt.trace_q.size(); ++iq) {
        std::vector<double> vals;
        for (auto& lo : per_level) vals.push_back(lo.trace_norms[iq]);
        push_fit("trace_gagliardo", opt.trace_q[iq], vals);
    }
    return rep;
}

// empirical largest k with ||u||_{L^{2k},w} <= cap * ||grad u||_{L^2,w}
// across a trial family; the boundary-concentrating profiles d^beta make the
// cap bite sooner as the degeneracy strengthens
inline std::vector<std::function<double(Vec2)>>
default_embedding_family(const DomainDesc& domain) {
    std::vector<std::function<double(Vec2)>> fam;
    for (double beta : {0.55, 0.7, 0.9, 1.0})
        fam.push_back([domain, beta](Vec2 p) {
            return std::pow(std::max(domain_distance(domain, p), 0.0), beta);
        });
    fam.push_back([domain](Vec2 p) {
        double d = std::max(domain_distance(domain, p), 0.0);
        return d * d * p.x;
    });
    return fam;
}

inline double embedding_delta_probe(double alpha, const Mesh& mesh,
                                    const std::vector<std::function<double(Vec2)>>& fields,
                                    const std::vector<double>& k_grid,
                                    double cap) {
    if (fields.empty())
        throw std::invalid_argument("embedding_delta_probe: empty trial family");
    if (k_grid.empty())
        throw std::invalid_argument("embedding_delta_probe: empty k grid");
    WeightSpec w{alpha, mesh.domain};
    double best = 0.0;
    for (double k : k_grid) {
        double worst = 0.0;
        for (auto& f : fields) {
            std::vector<double> u(mesh.vertices.size());
            for (size_t v = 0; v < mesh.vertices.size(); ++v) u[v] = f(mesh.vertices[v]);
            double num = 0.0, den = 0.0;
            for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
                auto ev = detail::element_view(mesh, ti, u);
                double g2 = dot(ev.grad, ev.grad);
                for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti),
                                                   detail::kFunctionalOrder)) {
                    num += qp.w * std::pow(std::abs(ev.value(qp.p, u)), 2.0 * k);
                    den += qp.w * g2;
                }
            }
            double ratio = std::pow(num, 0.5 / k) / std::sqrt(den);
            worst = std::max(worst, ratio);
        }
        if (worst <= cap && k > best) best = k;
    }
    return best;
}

// --- report serialization --------------------------------------------------

namespace detail {
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

inline std::string report_to_csv(const RegularityReport& rep) {
    std::string out = "level,h_max,n,functional,param,value\n";
    for (auto& r : rep.rows) {
        out += std::to_string(r.level) + "," + detail::g17(r.h_max) + "," +
               std::to_string(r.n) + "," + r.functional + "," + detail::g17(r.param) +
               "," + detail::g17(r.value) + "\n";
    }
    return out;
}

inline nlohmann::json report_to_json(const RegularityReport& rep) {
    nlohmann::json fits = nlohmann::json::array();
    for (auto& f : rep.fits)
        fits.push_back({{"functional", f.functional},
                        {"param", f.param},
                        {"slope", f.slope},
                        {"ci_half", f.ci_half},
                        {"points", f.points},
                        {"bounded", f.bounded}});
    return {{"alpha", rep.alpha},
            {"gamma", rep.gamma},
            {"threshold_alpha0", rep.threshold_alpha0},
            {"delta_grid", rep.delta_grid},
            {"delta_thresholds", rep.delta_thresholds()},
            {"fits", fits}};
}

} // namespace wfem
