#pragma once
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace wfem {

// Trigonometric polynomial on the periodic interval [0, 2*pi):
//   v(y) = a0 + sum_k cos_coeff[k-1] cos(k y) + sin_coeff[k-1] sin(k y).
struct FourierSeries {
    double a0 = 0.0;
    std::vector<double> cos_coeff; // slot k-1 holds mode k
    std::vector<double> sin_coeff;

    double operator()(double y) const {
        double v = a0;
        for (std::size_t j = 0; j < cos_coeff.size(); ++j)
            if (cos_coeff[j] != 0.0) v += cos_coeff[j] * std::cos(double(j + 1) * y);
        for (std::size_t j = 0; j < sin_coeff.size(); ++j)
            if (sin_coeff[j] != 0.0) v += sin_coeff[j] * std::sin(double(j + 1) * y);
        return v;
    }

    int max_mode() const {
        int m = 0;
        for (std::size_t j = 0; j < cos_coeff.size(); ++j)
            if (cos_coeff[j] != 0.0) m = std::max(m, int(j + 1));
        for (std::size_t j = 0; j < sin_coeff.size(); ++j)
            if (sin_coeff[j] != 0.0) m = std::max(m, int(j + 1));
        return m;
    }

    // Smallest active oscillatory mode; 0 when the series is constant.
    int min_mode() const {
        int m = 0;
        auto scan = [&](const std::vector<double>& c) {
            for (std::size_t j = 0; j < c.size(); ++j)
                if (c[j] != 0.0) { m = m == 0 ? int(j + 1) : std::min(m, int(j + 1)); }
        };
        scan(cos_coeff);
        scan(sin_coeff);
        return m;
    }
};

inline FourierSeries cosine_mode(int k, double amplitude = 1.0) {
    if (k < 1) throw std::invalid_argument("cosine_mode: k must be >= 1");
    FourierSeries v;
    v.cos_coeff.assign(std::size_t(k), 0.0);
    v.cos_coeff[std::size_t(k - 1)] = amplitude;
    return v;
}

inline FourierSeries sine_mode(int k, double amplitude = 1.0) {
    if (k < 1) throw std::invalid_argument("sine_mode: k must be >= 1");
    FourierSeries v;
    v.sin_coeff.assign(std::size_t(k), 0.0);
    v.sin_coeff[std::size_t(k - 1)] = amplitude;
    return v;
}

inline FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
    FourierSeries r = a;
    r.a0 += b.a0;
    r.cos_coeff.resize(std::max(a.cos_coeff.size(), b.cos_coeff.size()), 0.0);
    r.sin_coeff.resize(std::max(a.sin_coeff.size(), b.sin_coeff.size()), 0.0);
    for (std::size_t j = 0; j < b.cos_coeff.size(); ++j) r.cos_coeff[j] += b.cos_coeff[j];
    for (std::size_t j = 0; j < b.sin_coeff.size(); ++j) r.sin_coeff[j] += b.sin_coeff[j];
    return r;
}

// Exact multiplier |k|^{2s} on the periodic lattice; the constant mode is killed.
inline FourierSeries spectral_fractional(const FourierSeries& v, double s) {
    FourierSeries r = v;
    r.a0 = 0.0;
    for (std::size_t j = 0; j < r.cos_coeff.size(); ++j)
        r.cos_coeff[j] *= std::pow(double(j + 1), 2.0 * s);
    for (std::size_t j = 0; j < r.sin_coeff.size(); ++j)
        r.sin_coeff[j] *= std::pow(double(j + 1), 2.0 * s);
    return r;
}

struct TensorGrid {
    int n_x = 96;  // layers in the extension direction
    int n_y = 192; // periodic lateral lattice (high modes accumulate phase error
                   // with depth, so the default over-resolves laterally)
};

// Degenerate-weight lift on the truncated half-strip [0,H] x [0,2*pi):
//   div(x^alpha grad u) = 0,  u(0,.) = boundary_data,  u(H,.) = 0, periodic in y.
struct ExtensionProblem {
    double s = 0.5;
    double alpha = 0.0; // = 1 - 2s, stored redundantly as a cross-check
    FourierSeries boundary_data;
    double strip_height = 8.0;
    TensorGrid grid;
};

inline void validate_extension_problem(const ExtensionProblem& p) {
    if (!(p.s > 0.0 && p.s < 1.0))
        throw std::invalid_argument("extension: s must lie in (0,1)");
    if (p.alpha != 1.0 - 2.0 * p.s)
        throw std::invalid_argument("extension: alpha != 1 - 2s");
    if (!(p.strip_height > 0.0))
        throw std::invalid_argument("extension: strip height must be positive");
    if (p.grid.n_x < 2 || p.grid.n_y < 8)
        throw std::invalid_argument("extension: grid too small (need n_x >= 2, n_y >= 8)");
    if (4 * p.boundary_data.max_mode() > p.grid.n_y)
        throw std::invalid_argument("extension: boundary data needs <= n_y/4 active modes");
}

// strip_height <= 0 picks the default 8/k_min (8 for constant data).
inline ExtensionProblem make_extension_problem(double s, FourierSeries boundary_data,
                                               double strip_height = 0.0,
                                               TensorGrid grid = {}) {
    ExtensionProblem p;
    p.s = s;
    p.alpha = 1.0 - 2.0 * s;
    p.boundary_data = std::move(boundary_data);
    if (strip_height <= 0.0) {
        int kmin = p.boundary_data.min_mode();
        p.strip_height = 8.0 / double(kmin == 0 ? 1 : kmin);
    } else {
        p.strip_height = strip_height;
    }
    p.grid = grid;
    validate_extension_problem(p);
    return p;
}

struct ExtensionField {
    ExtensionProblem problem;
    std::vector<double> x_nodes; // size n_x+1, graded, x_nodes[0] = 0
    std::vector<double> y_nodes; // size n_y, uniform periodic lattice
    std::vector<double> values;  // node (layer j, lateral i) at values[j*n_y + i]
    // Variational boundary flux: slot i holds the pairing of -x^alpha u_x with
    // the i-th lateral hat function (row residual of the stiffness relation).
    std::vector<double> flux_functional;
    double weighted_energy = 0.0; // integral of x^alpha |grad u|^2 over the strip

    double value(double x, double y) const {
        const int ny = int(y_nodes.size());
        const double two_pi = 2.0 * std::acos(-1.0);
        double yy = std::fmod(y, two_pi);
        if (yy < 0.0) yy += two_pi;
        const double dy = two_pi / double(ny);
        int i = std::min(int(yy / dy), ny - 1);
        int i1 = (i + 1) % ny;
        double ty = (yy - double(i) * dy) / dy;
        double xx = std::clamp(x, x_nodes.front(), x_nodes.back());
        auto it = std::upper_bound(x_nodes.begin(), x_nodes.end(), xx);
        int j = std::clamp(int(it - x_nodes.begin()) - 1, 0, int(x_nodes.size()) - 2);
        double tx = (xx - x_nodes[std::size_t(j)]) /
                    (x_nodes[std::size_t(j) + 1] - x_nodes[std::size_t(j)]);
        auto at = [&](int jj, int ii) { return values[std::size_t(jj) * std::size_t(ny) + std::size_t(ii)]; };
        return (1.0 - tx) * ((1.0 - ty) * at(j, i) + ty * at(j, i1)) +
               tx * ((1.0 - ty) * at(j + 1, i) + ty * at(j + 1, i1));
    }
};

namespace detail {

// Q1 tensor assembly + factorization for one (s, grid, H) triple; boundary data
// varies per solve, so symbol scans reuse the factorization across modes.
struct StripOperator {
    double s = 0.5;
    double alpha = 0.0;
    double strip_height = 8.0;
    TensorGrid grid;
    std::vector<double> x_nodes;
    std::vector<double> y_nodes;
    Eigen::SparseMatrix<double> A; // full operator, constraints not eliminated
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt; // interior block
    std::vector<int> free_of_node; // -1 on constrained rows

    ExtensionField solve(const FourierSeries& data) const {
        const int nx = grid.n_x, ny = grid.n_y;
        const std::size_t nn = std::size_t(nx + 1) * std::size_t(ny);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(Eigen::Index(nn));
        for (int i = 0; i < ny; ++i) u[i] = data(y_nodes[std::size_t(i)]);

        Eigen::VectorXd au = A * u;
        const Eigen::Index nf = ldlt->rows();
        Eigen::VectorXd rhs(nf);
        for (std::size_t n = 0; n < nn; ++n)
            if (free_of_node[n] >= 0) rhs[free_of_node[n]] = -au[Eigen::Index(n)];
        Eigen::VectorXd uf = ldlt->solve(rhs);
        if (ldlt->info() != Eigen::Success)
            throw std::runtime_error("extension: interior solve failed");
        for (std::size_t n = 0; n < nn; ++n)
            if (free_of_node[n] >= 0) u[Eigen::Index(n)] = uf[free_of_node[n]];

        au = A * u;
        ExtensionField out;
        out.problem.s = s;
        out.problem.alpha = alpha;
        out.problem.boundary_data = data;
        out.problem.strip_height = strip_height;
        out.problem.grid = grid;
        out.x_nodes = x_nodes;
        out.y_nodes = y_nodes;
        out.values.assign(u.data(), u.data() + nn);
        out.flux_functional.assign(au.data(), au.data() + ny);
        out.weighted_energy = u.dot(au);
        return out;
    }
};

inline StripOperator make_strip_operator(double s, TensorGrid grid, double strip_height) {
    StripOperator op;
    op.s = s;
    op.alpha = 1.0 - 2.0 * s;
    op.strip_height = strip_height;
    op.grid = grid;

    const int nx = grid.n_x, ny = grid.n_y;
    const double H = strip_height;
    const double a = op.alpha;
    const double two_pi = 2.0 * std::acos(-1.0);
    const double dy = two_pi / double(ny);

    // Grading x_j = H (j/n_x)^{2/(1+alpha)} equidistributes the weighted energy
    // of the model profile x^{1-alpha}.
    op.x_nodes.resize(std::size_t(nx) + 1);
    for (int j = 0; j <= nx; ++j)
        op.x_nodes[std::size_t(j)] = H * std::pow(double(j) / double(nx), 2.0 / (1.0 + a));
    op.x_nodes[0] = 0.0;
    op.x_nodes[std::size_t(nx)] = H;
    op.y_nodes.resize(std::size_t(ny));
    for (int i = 0; i < ny; ++i) op.y_nodes[std::size_t(i)] = dy * double(i);

    const std::size_t nn = std::size_t(nx + 1) * std::size_t(ny);
    auto node = [&](int j, int i) { return Eigen::Index(std::size_t(j) * std::size_t(ny) + std::size_t(i % ny)); };

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(nx) * std::size_t(ny) * 16);
    for (int j = 0; j < nx; ++j) {
        const double xa = op.x_nodes[std::size_t(j)], xb = op.x_nodes[std::size_t(j) + 1];
        const double h = xb - xa;
        // Exact cell moments of the weight: m_p = int_{xa}^{xb} x^{alpha+p} dx
        // (alpha > -1 keeps the first cell integrable).
        auto mom = [&](int p) {
            double e = a + double(p) + 1.0;
            return (std::pow(xb, e) - std::pow(xa, e)) / e;
        };
        const double m0 = mom(0), m1 = mom(1), m2 = mom(2);
        const double kx[2][2] = {{m0 / (h * h), -m0 / (h * h)}, {-m0 / (h * h), m0 / (h * h)}};
        const double mx00 = (xb * xb * m0 - 2.0 * xb * m1 + m2) / (h * h);
        const double mx01 = (-xa * xb * m0 + (xa + xb) * m1 - m2) / (h * h);
        const double mx11 = (m2 - 2.0 * xa * m1 + xa * xa * m0) / (h * h);
        const double mx[2][2] = {{mx00, mx01}, {mx01, mx11}};
        const double my[2][2] = {{dy / 3.0, dy / 6.0}, {dy / 6.0, dy / 3.0}};
        const double ky[2][2] = {{1.0 / dy, -1.0 / dy}, {-1.0 / dy, 1.0 / dy}};
        for (int i = 0; i < ny; ++i) {
            const Eigen::Index g[2][2] = {{node(j, i), node(j, i + 1)},
                                          {node(j + 1, i), node(j + 1, i + 1)}};
            for (int ax = 0; ax < 2; ++ax)
                for (int by = 0; by < 2; ++by)
                    for (int cx = 0; cx < 2; ++cx)
                        for (int dyi = 0; dyi < 2; ++dyi)
                            trips.emplace_back(g[ax][by], g[cx][dyi],
                                               kx[ax][cx] * my[by][dyi] + mx[ax][cx] * ky[by][dyi]);
        }
    }
    op.A.resize(Eigen::Index(nn), Eigen::Index(nn));
    op.A.setFromTriplets(trips.begin(), trips.end());

    op.free_of_node.assign(nn, -1);
    int nf = 0;
    for (int j = 1; j < nx; ++j)
        for (int i = 0; i < ny; ++i) op.free_of_node[std::size_t(node(j, i))] = nf++;

    std::vector<Eigen::Triplet<double>> ftrips;
    for (int col = 0; col < op.A.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.A, col); it; ++it) {
            int fr = op.free_of_node[std::size_t(it.row())];
            int fc = op.free_of_node[std::size_t(it.col())];
            if (fr >= 0 && fc >= 0) ftrips.emplace_back(fr, fc, it.value());
        }
    Eigen::SparseMatrix<double> Aff(nf, nf);
    Aff.setFromTriplets(ftrips.begin(), ftrips.end());
    op.ldlt = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    op.ldlt->compute(Aff);
    if (op.ldlt->info() != Eigen::Success)
        throw std::runtime_error("extension: factorization failed");
    return op;
}

} // namespace detail

inline ExtensionField extend(const ExtensionProblem& problem) {
    validate_extension_problem(problem);
    auto op = detail::make_strip_operator(problem.s, problem.grid, problem.strip_height);
    return op.solve(problem.boundary_data);
}

// Nodal weighted Neumann trace -x^alpha u_x at x = 0: the flux functional run
// through the consistent lateral mass matrix (periodic lumping loses an O(dy^2)
// factor the symbol checks can't afford).
inline std::vector<double> dtn_apply(const ExtensionField& u) {
    const int ny = int(u.y_nodes.size());
    if (ny == 0 || u.flux_functional.size() != std::size_t(ny))
        throw std::invalid_argument("dtn: extension field lacks a boundary flux");
    const double two_pi = 2.0 * std::acos(-1.0);
    const double dy = two_pi / double(ny);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(ny) * 3);
    for (int i = 0; i < ny; ++i) {
        trips.emplace_back(i, i, 2.0 * dy / 3.0);
        trips.emplace_back(i, (i + 1) % ny, dy / 6.0);
        trips.emplace_back((i + 1) % ny, i, dy / 6.0);
    }
    Eigen::SparseMatrix<double> M(ny, ny);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("dtn: lateral mass factorization failed");
    Eigen::VectorXd g(ny);
    for (int i = 0; i < ny; ++i) g[i] = u.flux_functional[std::size_t(i)];
    Eigen::VectorXd f = ldlt.solve(g);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("dtn: lateral mass solve failed");
    return std::vector<double>(f.data(), f.data() + ny);
}

inline std::vector<double> dtn_apply(const ExtensionProblem& problem) {
    return dtn_apply(extend(problem));
}

// Lattice pairing int f v dy (rectangle rule is exact for trig polynomials the
// lattice resolves).
inline double boundary_pairing(const std::vector<double>& f, const FourierSeries& v) {
    const double two_pi = 2.0 * std::acos(-1.0);
    const double dy = two_pi / double(f.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * v(dy * double(i));
    return dy * acc;
}

struct SymbolCell {
    double s = 0.0;
    int k = 0;
    int n_x = 0;
    int n_y = 0;
    double strip_height = 0.0;
    double fitted_c = 0.0;  // least-squares constant per (s, resolution), shared across k
    double rel_error = 0.0; // lattice-L2 residual against fitted_c * k^{2s} cos(k y)
};

struct SymbolReport {
    std::vector<SymbolCell> cells;
};

namespace detail {

inline std::vector<SymbolCell> symbol_cells_one(double s, const std::vector<int>& k_list,
                                                TensorGrid grid, double H) {
    auto op = make_strip_operator(s, grid, H);
    const int ny = grid.n_y;
    std::vector<double> coef(k_list.size(), 0.0);
    std::vector<std::vector<double>> traces(k_list.size());
    for (std::size_t m = 0; m < k_list.size(); ++m) {
        auto field = op.solve(cosine_mode(k_list[m]));
        traces[m] = dtn_apply(field);
        double acc = 0.0;
        for (int i = 0; i < ny; ++i)
            acc += traces[m][std::size_t(i)] * std::cos(double(k_list[m]) * op.y_nodes[std::size_t(i)]);
        coef[m] = 2.0 * acc / double(ny);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < k_list.size(); ++m) {
        double sym = std::pow(double(k_list[m]), 2.0 * s);
        num += coef[m] * sym;
        den += sym * sym;
    }
    const double c = num / den;
    std::vector<SymbolCell> cells;
    cells.reserve(k_list.size());
    for (std::size_t m = 0; m < k_list.size(); ++m) {
        const double sym = std::pow(double(k_list[m]), 2.0 * s);
        double r2 = 0.0, d2 = 0.0;
        for (int i = 0; i < ny; ++i) {
            const double target = c * sym * std::cos(double(k_list[m]) * op.y_nodes[std::size_t(i)]);
            const double diff = traces[m][std::size_t(i)] - target;
            r2 += diff * diff;
            d2 += sym * sym * std::cos(double(k_list[m]) * op.y_nodes[std::size_t(i)]) *
                  std::cos(double(k_list[m]) * op.y_nodes[std::size_t(i)]);
        }
        SymbolCell cell;
        cell.s = s;
        cell.k = k_list[m];
        cell.n_x = grid.n_x;
        cell.n_y = grid.n_y;
        cell.strip_height = H;
        cell.fitted_c = c;
        cell.rel_error = std::sqrt(r2 / d2);
        cells.push_back(cell);
    }
    return cells;
}

} // namespace detail

// strip_height <= 0 picks 8/min(k_list); cells are grouped per (s, resolution)
// so one factorization serves every mode, then flattened s-major, resolution
// next, k last — a fixed order regardless of thread count.
inline SymbolReport symbol_report(const std::vector<double>& s_list,
                                  const std::vector<int>& k_list,
                                  const std::vector<TensorGrid>& resolutions,
                                  double strip_height = 0.0, int threads = 1) {
    if (s_list.empty() || k_list.empty() || resolutions.empty())
        throw std::invalid_argument("symbol_report: empty grid");
    int kmin = k_list[0];
    for (int k : k_list) {
        if (k < 1) throw std::invalid_argument("symbol_report: modes must be >= 1");
        kmin = std::min(kmin, k);
    }
    for (double s : s_list)
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("symbol_report: s must lie in (0,1)");
    const double H = strip_height > 0.0 ? strip_height : 8.0 / double(kmin);

    struct Job {
        double s;
        TensorGrid grid;
    };
    std::vector<Job> jobs;
    for (double s : s_list)
        for (const auto& g : resolutions) jobs.push_back({s, g});

    std::vector<std::vector<SymbolCell>> results(jobs.size());
    if (threads <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j)
            results[j] = detail::symbol_cells_one(jobs[j].s, k_list, jobs[j].grid, H);
    } else {
        std::size_t next = 0;
        while (next < jobs.size()) {
            std::size_t batch = std::min(std::size_t(threads), jobs.size() - next);
            std::vector<std::future<std::vector<SymbolCell>>> futs;
            for (std::size_t b = 0; b < batch; ++b) {
                const Job& job = jobs[next + b];
                futs.push_back(std::async(std::launch::async, [job, &k_list, H]() {
                    return detail::symbol_cells_one(job.s, k_list, job.grid, H);
                }));
            }
            for (std::size_t b = 0; b < batch; ++b) results[next + b] = futs[b].get();
            next += batch;
        }
    }
    SymbolReport rep;
    for (auto& block : results)
        for (auto& cell : block) rep.cells.push_back(cell);
    return rep;
}

namespace detail {
inline std::string csv17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

inline std::string symbol_report_to_csv(const SymbolReport& rep) {
    std::string out = "s,k,n_x,n_y,strip_height,fitted_c,rel_error\n";
    for (const auto& c : rep.cells) {
        out += detail::csv17(c.s) + "," + std::to_string(c.k) + "," + std::to_string(c.n_x) +
               "," + std::to_string(c.n_y) + "," + detail::csv17(c.strip_height) + "," +
               detail::csv17(c.fitted_c) + "," + detail::csv17(c.rel_error) + "\n";
    }
    return out;
}

} // namespace wfem
