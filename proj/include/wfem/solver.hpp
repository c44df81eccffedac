#pragma once
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <json.hpp>

#include "wfem/measure.hpp"
#include "wfem/mesh.hpp"
#include "wfem/weight.hpp"

namespace wfem {

struct ProblemSpec {
    double gamma = 3.0;
    double alpha = 0.0;
    const Mesh* mesh = nullptr; // partitioned: edge labels carry Γ₁/Γ₂
    MeasureData mu1; // interior datum
    MeasureData mu2; // boundary datum on the flux part
};

inline void validate_problem_spec(const ProblemSpec& s) {
    if (!s.mesh) throw std::invalid_argument("problem: mesh is required");
    if (!(s.gamma > 1.0)) throw std::invalid_argument("problem: gamma must exceed 1");
    validate_weight_spec({s.alpha, s.mesh->domain});
    if (s.mu1.support != MeasureSupport::Interior)
        throw std::invalid_argument("problem: mu1 must be an interior measure");
    if (s.mu2.support != MeasureSupport::Gamma2)
        throw std::invalid_argument("problem: mu2 must live on the flux part");
    bool has_flux = false;
    for (auto& be : s.mesh->boundary_edges)
        if (be.label == EdgeLabel::Flux) has_flux = true;
    if (!has_flux && (!s.mu2.atoms.empty() || !s.mu2.density_id.empty()))
        throw std::invalid_argument("problem: mu2 given but the flux part is empty");
}

struct SolveTelemetry {
    int newton_iters = 0;
    double final_residual = 0.0;
    double load_norm = 0.0;
    std::vector<double> residual_history;
    std::vector<int> linear_iters;
    bool used_ic_fallback = false;
};

struct DiscreteSolution {
    std::vector<double> coefficients; // per mesh vertex, 0 at Dirichlet nodes
    int n = 0;
    SolveTelemetry telemetry;
};

struct newton_error : std::runtime_error {
    std::vector<double> residual_history;
    explicit newton_error(const std::string& what, std::vector<double> hist)
        : std::runtime_error(what), residual_history(std::move(hist)) {}
};

namespace detail {
constexpr int kBoundaryRulePoints = 8; // shared by residual, Jacobian, energy
} // namespace detail

// weighted stiffness: K_ij = int_Omega d^alpha grad(hat_i).grad(hat_j); the
// weight enters only through the per-element weighted area
inline Eigen::SparseMatrix<double> assemble_stiffness(const ProblemSpec& spec,
                                                      int quad_order = 6) {
    validate_problem_spec(spec);
    const Mesh& mesh = *spec.mesh;
    WeightSpec w{spec.alpha, mesh.domain};
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.triangles.size());
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto& t = mesh.triangles[ti];
        Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        double wt = 0.0;
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti), quad_order))
            wt += qp.w;
        double area2 = cross(b - a, c - a);
        std::array<Vec2, 3> g = {Vec2{(b.y - c.y) / area2, (c.x - b.x) / area2},
                                 Vec2{(c.y - a.y) / area2, (a.x - c.x) / area2},
                                 Vec2{(a.y - b.y) / area2, (b.x - a.x) / area2}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(t[i], t[j], wt * dot(g[i], g[j]));
    }
    Eigen::SparseMatrix<double> K(mesh.vertices.size(), mesh.vertices.size());
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    return K;
}

// residual and Jacobian of the boundary nonlinearity int_{flux} |u|^{g-1} u hat;
// the derivative g|u|^{g-1} vanishes continuously at u = 0 for every g > 1
inline std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>>
assemble_boundary_term(const ProblemSpec& spec, const Eigen::VectorXd& u) {
    validate_problem_spec(spec);
    const Mesh& mesh = *spec.mesh;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.vertices.size());
    std::vector<Eigen::Triplet<double>> trip;
    const auto& rule = gauss_legendre01(detail::kBoundaryRulePoints);
    double g = spec.gamma;
    for (auto& be : mesh.boundary_edges) {
        if (be.label != EdgeLabel::Flux) continue;
        double L = norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
        double ua = u[be.a], ub = u[be.b];
        double ra = 0, rb = 0, jaa = 0, jab = 0, jbb = 0;
        for (auto [t, wq] : rule) {
            double uv = ua * (1.0 - t) + ub * t;
            double p = std::pow(std::abs(uv), g - 1.0);
            double f = p * uv, df = g * p;
            ra += L * wq * f * (1.0 - t);
            rb += L * wq * f * t;
            jaa += L * wq * df * (1.0 - t) * (1.0 - t);
            jab += L * wq * df * (1.0 - t) * t;
            jbb += L * wq * df * t * t;
        }
        r[be.a] += ra;
        r[be.b] += rb;
        trip.emplace_back(be.a, be.a, jaa);
        trip.emplace_back(be.a, be.b, jab);
        trip.emplace_back(be.b, be.a, jab);
        trip.emplace_back(be.b, be.b, jbb);
    }
    Eigen::SparseMatrix<double> J(mesh.vertices.size(), mesh.vertices.size());
    J.setFromTriplets(trip.begin(), trip.end());
    return {r, J};
}

// int over the flux part of |u_h|^p, with the same edge rule as the assembly
inline double boundary_power_integral(const Mesh& mesh, const std::vector<double>& u,
                                      double p) {
    const auto& rule = gauss_legendre01(detail::kBoundaryRulePoints);
    double acc = 0.0;
    for (auto& be : mesh.boundary_edges) {
        if (be.label != EdgeLabel::Flux) continue;
        double L = norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
        for (auto [t, wq] : rule)
            acc += L * wq * std::pow(std::abs(u[be.a] * (1.0 - t) + u[be.b] * t), p);
    }
    return acc;
}

struct SolveOptions {
    int max_newton = 100;
    double tol_factor = 1e-10; // residual tolerance = tol_factor * (1 + |load|_inf)
    int quad_order = 6;
    double cg_rtol = 1e-12;
};

namespace detail {

struct ReducedSystem {
    std::vector<int> free_of_vertex; // -1 at Dirichlet vertices
    std::vector<int> vertex_of_free;
};

inline ReducedSystem reduce_map(const Mesh& mesh) {
    auto dir = dirichlet_vertex_flags(mesh);
    ReducedSystem rs;
    rs.free_of_vertex.assign(mesh.vertices.size(), -1);
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        if (!dir[v]) {
            rs.free_of_vertex[v] = static_cast<int>(rs.vertex_of_free.size());
            rs.vertex_of_free.push_back(static_cast<int>(v));
        }
    return rs;
}

inline Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& A,
                                                   const ReducedSystem& rs) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            int i = rs.free_of_vertex[it.row()], j = rs.free_of_vertex[it.col()];
            if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
        }
    Eigen::SparseMatrix<double> R(rs.vertex_of_free.size(), rs.vertex_of_free.size());
    R.setFromTriplets(trip.begin(), trip.end());
    return R;
}

// inner solve: diagonally preconditioned CG; on breakdown (degenerate weights
// make the system stiff) fall back to an incomplete-Cholesky preconditioner
inline Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A,
                                 const Eigen::VectorXd& rhs, double rtol,
                                 SolveTelemetry& tel) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(rtol);
    cg.setMaxIterations(10 * A.rows());
    cg.compute(A);
    Eigen::VectorXd x = cg.solve(rhs);
    tel.linear_iters.push_back(static_cast<int>(cg.iterations()));
    if (cg.info() == Eigen::Success) return x;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        icg;
    icg.setTolerance(rtol);
    icg.setMaxIterations(10 * A.rows());
    icg.compute(A);
    x = icg.solve(rhs);
    tel.used_ic_fallback = true;
    tel.linear_iters.back() += static_cast<int>(icg.iterations());
    if (icg.info() != Eigen::Success)
        throw std::runtime_error("linear solve failed even with the fallback");
    return x;
}

} // namespace detail

// damped Newton on F(u) = K u + B(u) - L with Armijo backtracking on the
// convex energy 1/2 u.Ku + (g+1)^)-1 int |u|^{g+1} - L.u; global convergence
// flags assembly bugs whenever it fails
inline DiscreteSolution solve_regularized(const ProblemSpec& spec, int n,
                                          const SolveOptions& opts = {},
                                          const std::vector<double>* warm = nullptr) {
    validate_problem_spec(spec);
    const Mesh& mesh = *spec.mesh;
    auto mol1 = mollify(spec.mu1, n, mesh);
    auto mol2 = mollify(spec.mu2, n, mesh);
    auto load1 = p1_load(mol1, mesh), load2 = p1_load(mol2, mesh);
    auto rs = detail::reduce_map(mesh);
    int nf = static_cast<int>(rs.vertex_of_free.size());

    Eigen::VectorXd L(nf);
    for (int i = 0; i < nf; ++i) {
        int v = rs.vertex_of_free[i];
        L[i] = load2[v] - load1[v];
    }
    Eigen::SparseMatrix<double> K = assemble_stiffness(spec, opts.quad_order);
    Eigen::SparseMatrix<double> Kff = detail::restrict_matrix(K, rs);

    DiscreteSolution sol;
    sol.n = n;
    sol.telemetry.load_norm = L.size() ? L.lpNorm<Eigen::Infinity>() : 0.0;
    double tol = opts.tol_factor * (1.0 + sol.telemetry.load_norm);

    Eigen::VectorXd uf = Eigen::VectorXd::Zero(nf);
    if (warm) {
        if (warm->size() != mesh.vertices.size())
            throw std::invalid_argument("solve: warm start has the wrong size");
        for (int i = 0; i < nf; ++i) uf[i] = (*warm)[rs.vertex_of_free[i]];
    }
    Eigen::VectorXd ufull = Eigen::VectorXd::Zero(mesh.vertices.size());
    auto scatter = [&](const Eigen::VectorXd& f) {
        for (int i = 0; i < nf; ++i) ufull[rs.vertex_of_free[i]] = f[i];
    };
    auto energy = [&](const Eigen::VectorXd& f) {
        scatter(f);
        std::vector<double> uvec(ufull.data(), ufull.data() + ufull.size());
        return 0.5 * f.dot(Kff * f) +
               boundary_power_integral(mesh, uvec, spec.gamma + 1.0) / (spec.gamma + 1.0) -
               L.dot(f);
    };

    auto& tel = sol.telemetry;
    bool done = false;
    for (int it = 0; it <= opts.max_newton; ++it) {
        scatter(uf);
        auto [bres, bjac] = assemble_boundary_term(spec, ufull);
        Eigen::VectorXd F = Kff * uf - L;
        for (int i = 0; i < nf; ++i) F[i] += bres[rs.vertex_of_free[i]];
        double res = F.size() ? F.lpNorm<Eigen::Infinity>() : 0.0;
        tel.residual_history.push_back(res);
        tel.final_residual = res;
        tel.newton_iters = it;
        if (res <= tol) {
            done = true;
            break;
        }
        if (it == opts.max_newton) break;
        Eigen::SparseMatrix<double> J = Kff + detail::restrict_matrix(bjac, rs);
        Eigen::VectorXd delta = detail::solve_spd(J, -F, opts.cg_rtol, tel);
        double e0 = energy(uf), slope = F.dot(delta), s = 1.0;
        // once the predicted decrease drops inside the energy's rounding
        // noise, backtracking can reject good steps forever; the full Newton
        // step is safe there (convex energy, near the minimum)
        double noise = 1e-13 * (1.0 + std::abs(e0));
        if (-slope > noise) {
            for (int back = 0; back < 60; ++back) {
                if (energy(uf + s * delta) <= e0 + 1e-4 * s * slope + noise) break;
                s *= 0.5;
                if (back == 59)
                    throw newton_error("line search failed (non-convex energy?)",
                                       tel.residual_history);
            }
        }
        uf += s * delta;
    }
    if (!done)
        throw newton_error("Newton failed to converge in " +
                               std::to_string(opts.max_newton) + " iterations",
                           tel.residual_history);
    scatter(uf);
    sol.coefficients.assign(ufull.data(), ufull.data() + ufull.size());
    return sol;
}

inline std::vector<DiscreteSolution> solve_sequence(const ProblemSpec& spec,
                                                    const std::vector<int>& n_list,
                                                    const SolveOptions& opts = {},
                                                    bool warm_start = true) {
    std::vector<DiscreteSolution> out;
    for (int n : n_list) {
        const std::vector<double>* warm =
            (warm_start && !out.empty()) ? &out.back().coefficients : nullptr;
        try {
            out.push_back(solve_regularized(spec, n, opts, warm));
        } catch (newton_error& e) {
            throw newton_error("n = " + std::to_string(n) + ": " + e.what(),
                               e.residual_history);
        }
    }
    return out;
}

// residual of the weak form recomputed from scratch (no reuse of the solver's
// assembled operators): max over hat functions vanishing on the Dirichlet part
inline double weak_residual_inf(const ProblemSpec& spec, const DiscreteSolution& sol,
                                int quad_order = 6) {
    validate_problem_spec(spec);
    const Mesh& mesh = *spec.mesh;
    const auto& u = sol.coefficients;
    if (u.size() != mesh.vertices.size())
        throw std::invalid_argument("weak_residual: solution size mismatch");
    std::vector<double> R(mesh.vertices.size(), 0.0);
    WeightSpec w{spec.alpha, mesh.domain};
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        auto& t = mesh.triangles[ti];
        Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        double area2 = cross(b - a, c - a);
        std::array<Vec2, 3> g = {Vec2{(b.y - c.y) / area2, (c.x - b.x) / area2},
                                 Vec2{(c.y - a.y) / area2, (a.x - c.x) / area2},
                                 Vec2{(a.y - b.y) / area2, (b.x - a.x) / area2}};
        Vec2 gu = u[t[0]] * g[0] + u[t[1]] * g[1] + u[t[2]] * g[2];
        double wt = 0.0;
        for (auto& qp : element_quadrature(w, mesh, static_cast<int>(ti), quad_order))
            wt += qp.w;
        for (int i = 0; i < 3; ++i) R[t[i]] += wt * dot(gu, g[i]);
    }
    const auto& rule = gauss_legendre01(detail::kBoundaryRulePoints);
    for (auto& be : mesh.boundary_edges) {
        if (be.label != EdgeLabel::Flux) continue;
        double L = norm(mesh.vertices[be.b] - mesh.vertices[be.a]);
        for (auto [t, wq] : rule) {
            double uv = u[be.a] * (1.0 - t) + u[be.b] * t;
            double f = std::pow(std::abs(uv), spec.gamma - 1.0) * uv;
            R[be.a] += L * wq * f * (1.0 - t);
            R[be.b] += L * wq * f * t;
        }
    }
    auto mol1 = mollify(spec.mu1, sol.n, mesh);
    auto mol2 = mollify(spec.mu2, sol.n, mesh);
    auto load1 = p1_load(mol1, mesh), load2 = p1_load(mol2, mesh);
    auto dir = dirichlet_vertex_flags(mesh);
    double worst = 0.0;
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        if (!dir[v])
            worst = std::max(worst, std::abs(R[v] + load1[v] - load2[v]));
    return worst;
}

// lumped-mass L2 norm of a nodal field, used for sequence diagnostics
inline double lumped_l2(const Mesh& mesh, const std::vector<double>& u) {
    std::vector<double> m(mesh.vertices.size(), 0.0);
    for (auto& t : mesh.triangles) {
        double a = signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]],
                               mesh.vertices[t[2]]) / 3.0;
        for (int i = 0; i < 3; ++i) m[t[i]] += a;
    }
    double acc = 0.0;
    for (size_t v = 0; v < mesh.vertices.size(); ++v) acc += m[v] * u[v] * u[v];
    return std::sqrt(acc);
}

inline nlohmann::json solution_to_json(const DiscreteSolution& sol) {
    return {{"n", sol.n},
            {"coefficients", sol.coefficients},
            {"telemetry",
             {{"newton_iters", sol.telemetry.newton_iters},
              {"final_residual", sol.telemetry.final_residual},
              {"load_norm", sol.telemetry.load_norm},
              {"linear_iters", sol.telemetry.linear_iters},
              {"used_ic_fallback", sol.telemetry.used_ic_fallback}}}};
}

} // namespace wfem
