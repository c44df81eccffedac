#pragma once
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfem/config.hpp"
#include "wfem/cs_extension.hpp"
#include "wfem/measure.hpp"
#include "wfem/mesh.hpp"
#include "wfem/regularity.hpp"
#include "wfem/solver.hpp"
#include "wfem/weight.hpp"

namespace wfem {

struct RunOutcome {
    int exit_code = 0;          // 0 ok, 2 usage/config, 3 numeric/runtime
    std::string error_kind;     // "" | "usage" | "numeric"
    std::string error_message;
    std::vector<std::string> files; // written files, relative to out_dir
};

inline nlohmann::json outcome_to_json(const RunOutcome& r) {
    if (r.exit_code == 0) return {{"status", "ok"}, {"files", r.files}};
    return {{"status", "error"}, {"kind", r.error_kind}, {"message", r.error_message}};
}

struct RunOverrides {
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::string expect_subcommand; // guard against config/CLI subcommand mismatch
};

// mesh + spec bundle; ProblemSpec holds a raw mesh pointer, so the mesh must
// outlive every spec() result
struct SolveSetup {
    Mesh mesh;
    double gamma = 3.0;
    double alpha = 0.0;
    MeasureData mu1, mu2;
    SolveOptions opts;

    ProblemSpec spec() const {
        ProblemSpec s;
        s.gamma = gamma;
        s.alpha = alpha;
        s.mesh = &mesh;
        s.mu1 = mu1;
        s.mu2 = mu2;
        return s;
    }
};

inline SolveSetup build_solve_setup(const ExperimentConfig& cfg) {
    SolveSetup setup;
    setup.mesh = cfg.domain.kind == DomainDesc::Kind::Disk
                     ? generate_disk_mesh(cfg.domain.radius, cfg.h_target, cfg.partition)
                     : generate_square_mesh(cfg.h_target, cfg.partition);
    setup.gamma = cfg.gamma;
    setup.alpha = cfg.alpha;
    setup.mu1 = cfg.mu1;
    setup.mu2 = cfg.mu2;
    setup.opts.max_newton = cfg.solve.max_newton;
    setup.opts.quad_order = cfg.solve.quad_order;
    return setup;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

struct DiagRow {
    int n;
    std::string functional;
    double param;
    double value;
};

inline std::string diag_csv(const std::vector<DiagRow>& rows) {
    std::string out = "n,functional,param,value\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + r.functional + "," + g17(r.param) + "," +
               g17(r.value) + "\n";
    return out;
}

inline nlohmann::json mesh_stats_json(const Mesh& mesh) {
    std::size_t flux = 0, dirichlet = 0;
    for (const auto& be : mesh.boundary_edges)
        (be.label == EdgeLabel::Flux ? flux : dirichlet)++;
    return {{"vertices", mesh.vertices.size()},
            {"triangles", mesh.triangles.size()},
            {"h_max", mesh.h_max},
            {"flux_edges", flux},
            {"dirichlet_edges", dirichlet}};
}

inline void run_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::vector<std::string>& files) {
    auto t0 = std::chrono::steady_clock::now();
    SolveSetup setup = build_solve_setup(cfg);
    ProblemSpec spec = setup.spec();
    std::vector<DiscreteSolution> sols = solve_sequence(spec, cfg.solve.n_list, setup.opts);

    bool has_flux = false;
    for (const auto& be : setup.mesh.boundary_edges)
        if (be.label == EdgeLabel::Flux) has_flux = true;

    std::vector<DiagRow> rows;
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t si = 0; si < sols.size(); ++si) {
        const DiscreteSolution& sol = sols[si];
        const auto& u = sol.coefficients;
        int n = sol.n;
        double weak = weak_residual_inf(spec, sol, cfg.solve.quad_order);
        double max_abs = 0.0;
        for (double v : u) max_abs = std::max(max_abs, std::abs(v));
        double l2 = lumped_l2(setup.mesh, u);

        rows.push_back({n, "newton_iters", 0.0, double(sol.telemetry.newton_iters)});
        rows.push_back({n, "final_residual", 0.0, sol.telemetry.final_residual});
        rows.push_back({n, "weak_residual", 0.0, weak});
        rows.push_back({n, "max_abs_u", 0.0, max_abs});
        rows.push_back({n, "lumped_l2", 0.0, l2});
        if (has_flux)
            rows.push_back({n, "boundary_gamma_norm", cfg.gamma,
                            boundary_Lgamma_norm(setup.mesh, u, cfg.gamma)});
        for (double th : cfg.solve.theta_grid)
            rows.push_back({n, "phi_theta_energy", th,
                            phi_theta_energy(setup.mesh, u, th, cfg.alpha)});
        for (double q : cfg.solve.q_grid)
            rows.push_back({n, "w1q_norm", q, weighted_W1q_norm(setup.mesh, u, q, cfg.alpha)});
        if (!cfg.solve.t_grid.empty()) {
            MollifiedMeasure mol1 = mollify(cfg.mu1, n, setup.mesh);
            MollifiedMeasure mol2 = mollify(cfg.mu2, n, setup.mesh);
            for (double t : cfg.solve.t_grid) {
                LevelSetTail tail =
                    level_set_tail(setup.mesh, u, t, cfg.gamma, cfg.alpha, mol1, mol2);
                rows.push_back({n, "boundary_tail", t, tail.boundary_tail});
                rows.push_back({n, "boundary_measure_tail", t, tail.boundary_measure_tail});
                rows.push_back({n, "interior_mass_tail", t, tail.interior_mass_tail});
                rows.push_back({n, "gradient_tail", t, tail.gradient_tail});
                rows.push_back({n, "lebesgue_E", t, tail.lebesgue_E});
            }
        }

        runs.push_back({{"n", n},
                        {"newton_iters", sol.telemetry.newton_iters},
                        {"final_residual", sol.telemetry.final_residual},
                        {"weak_residual", weak},
                        {"max_abs_u", max_abs},
                        {"lumped_l2", l2}});
        if (cfg.solve.write_solutions) {
            std::string name = "solution_n" + std::to_string(n) + ".json";
            write_file(out_dir / name, solution_to_json(sol).dump(2) + "\n");
            files.push_back(name);
        }
    }

    write_file(out_dir / "diagnostics.csv", diag_csv(rows));
    files.push_back("diagnostics.csv");

    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json summary{{"config", config_to_json(cfg)},
                           {"mesh", mesh_stats_json(setup.mesh)},
                           {"runs", runs},
                           {"elapsed_seconds", elapsed}};
    write_file(out_dir / "solve_summary.json", summary.dump(2) + "\n");
    files.push_back("solve_summary.json");
}

inline void run_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::vector<std::string>& files) {
    auto t0 = std::chrono::steady_clock::now();
    SolveSetup setup = build_solve_setup(cfg);
    ProblemSpec spec = setup.spec();
    RegularityStudyOptions opt;
    opt.threads = cfg.threads;
    opt.refines_per_level = cfg.study.refines_per_level;
    opt.trace_q = cfg.study.trace_q;
    int n_base = cfg.study.n_base, n_step = cfg.study.n_step;
    RegularityReport rep =
        regularity_study(spec, cfg.study.levels, cfg.study.q_grid,
                         [n_base, n_step](int level) { return n_base + n_step * level; }, opt);

    write_file(out_dir / "study_rows.csv", report_to_csv(rep));
    files.push_back("study_rows.csv");

    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json summary{{"config", config_to_json(cfg)},
                           {"report", report_to_json(rep)},
                           {"elapsed_seconds", elapsed}};
    write_file(out_dir / "study_summary.json", summary.dump(2) + "\n");
    files.push_back("study_summary.json");
}

inline void run_a2(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   std::vector<std::string>& files) {
    // one row per alpha: sampled ball estimate next to the closed-form radial
    // product (the latter is R-independent)
    std::vector<double> alphas = cfg.a2.alpha_grid;
    for (double a : cfg.a2.radial_alphas) {
        bool present = false;
        for (double b : alphas)
            if (b == a) present = true;
        if (!present) alphas.push_back(a);
    }
    std::string csv = "alpha,constant_estimate,radial_product,ball_count\n";
    nlohmann::json reports = nlohmann::json::array();
    for (double a : alphas) {
        WeightSpec w{a, cfg.domain};
        A2Report rep = a2_constant_estimate(w, cfg.a2.n_balls, cfg.seed);
        double radial = a2_radial_product(a, cfg.domain.kind == DomainDesc::Kind::Disk
                                                 ? cfg.domain.radius
                                                 : 1.0);
        csv += g17(a) + "," + g17(rep.constant_estimate) + "," + g17(radial) + "," +
               std::to_string(rep.ball_count) + "\n";
        nlohmann::json jr = a2_to_json(rep);
        jr["radial_product"] = radial;
        reports.push_back(jr);
    }
    write_file(out_dir / "a2_table.csv", csv);
    files.push_back("a2_table.csv");
    nlohmann::json summary{{"config", config_to_json(cfg)}, {"reports", reports}};
    write_file(out_dir / "a2_summary.json", summary.dump(2) + "\n");
    files.push_back("a2_summary.json");
}

inline void run_cs(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   std::vector<std::string>& files) {
    // per-s batches so the summary can report honest per-s wall times; the
    // flattened cell order matches one joint symbol_report call
    SymbolReport all;
    nlohmann::json identities = nlohmann::json::array();
    TensorGrid finest = cfg.cs.resolutions.front();
    for (const auto& g : cfg.cs.resolutions)
        if (std::size_t(g.n_x) * std::size_t(g.n_y) >
            std::size_t(finest.n_x) * std::size_t(finest.n_y))
            finest = g;
    FourierSeries probe;
    for (int k : cfg.cs.k_list) probe = probe + cosine_mode(k);

    for (double s : cfg.cs.s_list) {
        auto t0 = std::chrono::steady_clock::now();
        SymbolReport part = symbol_report({s}, cfg.cs.k_list, cfg.cs.resolutions,
                                          cfg.cs.strip_height, cfg.threads);
        for (const auto& c : part.cells) all.cells.push_back(c);

        ExtensionProblem prob =
            make_extension_problem(s, probe, std::max(cfg.cs.strip_height, 0.0), finest);
        ExtensionField field = extend(prob);
        std::vector<double> flux = dtn_apply(field);
        double bulk = field.weighted_energy;
        double pairing = boundary_pairing(flux, probe);
        double gap = std::abs(bulk - pairing) / std::max(std::abs(bulk), std::abs(pairing));
        double mode1 = 0.0; // lattice cosine-1 coefficient of the trace
        for (std::size_t i = 0; i < flux.size(); ++i)
            mode1 += flux[i] * std::cos(field.y_nodes[i]);
        mode1 *= 2.0 / double(flux.size());
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        identities.push_back({{"s", s},
                              {"n_x", finest.n_x},
                              {"n_y", finest.n_y},
                              {"bulk_energy", bulk},
                              {"boundary_pairing", pairing},
                              {"rel_gap", gap},
                              {"dtn_mode1", mode1},
                              {"elapsed_seconds", elapsed}});
    }

    write_file(out_dir / "symbol_cells.csv", symbol_report_to_csv(all));
    files.push_back("symbol_cells.csv");
    nlohmann::json summary{{"config", config_to_json(cfg)},
                           {"energy_identity", identities}};
    write_file(out_dir / "cs_summary.json", summary.dump(2) + "\n");
    files.push_back("cs_summary.json");
}

} // namespace detail

inline RunOutcome run_experiment(const std::string& config_path, const std::string& out_dir,
                                 const RunOverrides& ov = {}) {
    RunOutcome out;
    auto usage = [&out](const std::string& msg) {
        out.exit_code = 2;
        out.error_kind = "usage";
        out.error_message = msg;
    };
    auto numeric = [&out](const std::string& msg) {
        out.exit_code = 3;
        out.error_kind = "numeric";
        out.error_message = msg;
    };
    try {
        ExperimentConfig cfg = load_experiment_config(config_path);
        if (!ov.expect_subcommand.empty() && cfg.subcommand != ov.expect_subcommand)
            throw config_error("config declares subcommand '" + cfg.subcommand +
                               "' but '" + ov.expect_subcommand + "' was invoked");
        if (ov.threads) {
            if (*ov.threads < 1) throw config_error("threads must be >= 1");
            cfg.threads = *ov.threads;
        }
        if (ov.seed) cfg.seed = *ov.seed;
        std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        if (cfg.subcommand == "solve")
            detail::run_solve(cfg, dir, out.files);
        else if (cfg.subcommand == "study")
            detail::run_study(cfg, dir, out.files);
        else if (cfg.subcommand == "a2")
            detail::run_a2(cfg, dir, out.files);
        else
            detail::run_cs(cfg, dir, out.files);
    } catch (const config_error& e) {
        usage(e.what());
    } catch (const std::invalid_argument& e) {
        usage(e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        usage(e.what());
    } catch (const newton_error& e) {
        numeric(e.what());
    } catch (const std::exception& e) {
        numeric(e.what());
    }
    return out;
}

} // namespace wfem
