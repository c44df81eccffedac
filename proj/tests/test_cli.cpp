#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "wfem/runner.hpp"

using namespace wfem;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("wfem_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
    fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kZeroSolve = R"(subcommand = "solve"
[domain]
kind = "disk"
h = 0.3
[partition]
kind = "angular_split"
param = 3.141592653589793
[problem]
gamma = 3.0
[solve]
n_list = [1, 2]
q_grid = [1.5]
t_grid = [0.0, 0.5]
)";

} // namespace

TEST_CASE("toml subset: scalars, sections, arrays, comments") {
    TomlTable t = parse_toml(R"(# header comment
top = 1
name = "weighted \"fem\"  x\\y"
[solve]
n_list = [1, 2, 3]   # trailing comment
tol = 1.5e-3
warm = true
pairs = [[1, 2], [3, 4]]
empty = []
negative = -7
)");
    CHECK(t.at("top").integer == 1);
    CHECK(t.at("name").str == "weighted \"fem\"  x\\y");
    REQUIRE(t.at("solve.n_list").array.size() == 3);
    CHECK(t.at("solve.n_list").array[2].integer == 3);
    CHECK(t.at("solve.tol").real == 1.5e-3);
    CHECK(t.at("solve.warm").boolean == true);
    REQUIRE(t.at("solve.pairs").array.size() == 2);
    CHECK(t.at("solve.pairs").array[1].array[0].integer == 3);
    CHECK(t.at("solve.empty").array.empty());
    CHECK(t.at("solve.negative").integer == -7);
}

TEST_CASE("toml subset: malformed input names the line") {
    CHECK_THROWS_MATCHES(parse_toml("a = 1\nb = \"oops\n", "f.toml"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("f.toml:2")));
    CHECK_THROWS_MATCHES(parse_toml("just words\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("key = value")));
    CHECK_THROWS_MATCHES(parse_toml("a = 1\na = 2\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate key 'a'")));
    CHECK_THROWS_MATCHES(parse_toml("[solve\nx = 1\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unterminated section")));
    CHECK_THROWS_MATCHES(parse_toml("x = [1, 2\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unterminated array")));
    CHECK_THROWS_MATCHES(parse_toml("x = 1 trailing\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("trailing text")));
    CHECK_THROWS_MATCHES(parse_toml("x = 1.2.3\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("malformed value")));
    CHECK_THROWS_MATCHES(parse_toml("bad key = 1\n"), config_error,
                         Catch::Matchers::MessageMatches(ContainsSubstring("malformed key")));
    // same key in two sections is fine; same flattened key is not
    CHECK_NOTHROW(parse_toml("[a]\nx = 1\n[b]\nx = 2\n"));
    CHECK_THROWS_AS(parse_toml("[a]\nx = 1\n[a]\nx = 2\n"), config_error);
}

TEST_CASE("config validation names the violated constraint") {
    auto cfg_err = [](const std::string& body) {
        try {
            config_from_toml(parse_toml(body));
            FAIL("expected config_error");
            return std::string();
        } catch (const config_error& e) {
            return std::string(e.what());
        }
    };

    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[problem]\ngamma = 0.5\n"),
               ContainsSubstring("gamma") && ContainsSubstring("exceed 1") &&
                   ContainsSubstring("0.5"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[problem]\nalpha = 1.0\n"),
               ContainsSubstring("alpha") && ContainsSubstring("(-1, 1)"));
    CHECK_THAT(cfg_err("subcommand = \"fit\"\n"), ContainsSubstring("subcommand"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\nmystery = 1\n"),
               ContainsSubstring("unknown config key 'mystery'"));
    // keys from another subcommand's schema are unknown here
    CHECK_THAT(cfg_err("subcommand = \"a2\"\n[solve]\nn_list = [1]\n"),
               ContainsSubstring("unknown config key 'solve.n_list'"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\nseed = -4\n"), ContainsSubstring("seed"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[solve]\nn_list = [2, 2]\n"),
               ContainsSubstring("strictly increasing"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[solve]\nq_grid = [0.8]\n"),
               ContainsSubstring("q_grid"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[partition]\nkind = \"angular_split\"\nparam = 7.0\n"),
               ContainsSubstring("partition.param"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[domain]\nkind = \"square\"\nradius = 2.0\n"),
               ContainsSubstring("radius"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[mu1]\ndensity = \"blob(1)\"\n"),
               ContainsSubstring("density"));
    CHECK_THAT(cfg_err("subcommand = \"solve\"\n[mu1]\natoms = [[0.0, 0.0]]\n"),
               ContainsSubstring("[x, y, mass]"));
    // trace order 1-(1+alpha)/q must land in (0,1): alpha=0.5, q=1.2 gives -1/4
    CHECK_THAT(cfg_err("subcommand = \"study\"\n[problem]\nalpha = 0.5\n[study]\ntrace_q = [1.2]\n"),
               ContainsSubstring("trace order"));
    CHECK_THAT(cfg_err("subcommand = \"cs-check\"\n[cs]\nk_list = [1, 40]\nresolutions = [[64, 64]]\n"),
               ContainsSubstring("wavelength"));
    CHECK_THAT(cfg_err("subcommand = \"cs-check\"\n[cs]\ns_list = [1.5]\n"),
               ContainsSubstring("s_list"));
}

TEST_CASE("config echo materializes the defaults") {
    ExperimentConfig cfg = config_from_toml(parse_toml(kZeroSolve));
    nlohmann::json j = config_to_json(cfg);
    CHECK(j["subcommand"] == "solve");
    CHECK(j["threads"] == 1);
    CHECK(j["seed"] == 0);
    CHECK(j["domain"]["radius"] == 1.0);
    CHECK(j["problem"]["alpha"] == 0.0);       // default materialized
    CHECK(j["solve"]["max_newton"] == 100);    // default materialized
    CHECK(j["solve"]["quad_order"] == 6);
    CHECK(j["solve"]["theta_grid"].empty());
    CHECK(j["partition"]["kind"] == "angular_split");

    ExperimentConfig study = config_from_toml(parse_toml("subcommand = \"study\"\n"));
    nlohmann::json js = config_to_json(study);
    CHECK(js["study"]["levels"] == 4);
    CHECK(js["study"]["q_grid"].size() == 4);

    ExperimentConfig cs = config_from_toml(parse_toml("subcommand = \"cs-check\"\n"));
    nlohmann::json jc = config_to_json(cs);
    CHECK(jc["cs"]["resolutions"][0][0] == 256);
    CHECK(jc["cs"]["strip_height"] == 0.0);
}

TEST_CASE("zero-measure solve reports a zero solution") {
    fs::path dir = temp_dir("zero");
    fs::path cfg = write_config(dir, "zero.toml", kZeroSolve);
    RunOutcome out = run_experiment(cfg.string(), (dir / "out").string());
    REQUIRE(out.exit_code == 0);
    CHECK(out.error_kind.empty());
    REQUIRE_THAT(out.files, Catch::Matchers::Contains(std::string("diagnostics.csv")));

    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "out" / "solve_summary.json"));
    for (const auto& run : summary["runs"]) {
        CHECK(run["max_abs_u"] == 0.0);
        CHECK(run["weak_residual"] == 0.0);
        CHECK(run["newton_iters"].get<int>() <= 1);
    }
    nlohmann::json sol = nlohmann::json::parse(slurp(dir / "out" / "solution_n1.json"));
    for (double v : sol["coefficients"].get<std::vector<double>>()) CHECK(v == 0.0);
    CHECK(outcome_to_json(out)["status"] == "ok");
    fs::remove_all(dir);
}

TEST_CASE("exit codes separate usage from numeric failures") {
    fs::path dir = temp_dir("exit");

    RunOutcome missing = run_experiment((dir / "nope.toml").string(), (dir / "o1").string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.error_kind == "usage");
    CHECK_THAT(missing.error_message, ContainsSubstring("nope.toml"));
    CHECK(outcome_to_json(missing)["kind"] == "usage");

    fs::path bad = write_config(dir, "bad.toml", "subcommand = \"solve\"\n[problem]\ngamma = 0.5\n");
    RunOutcome usage = run_experiment(bad.string(), (dir / "o2").string());
    CHECK(usage.exit_code == 2);
    CHECK_THAT(usage.error_message, ContainsSubstring("gamma"));

    fs::path zero = write_config(dir, "zero.toml", kZeroSolve);
    RunOverrides ov;
    ov.expect_subcommand = "a2";
    RunOutcome mismatch = run_experiment(zero.string(), (dir / "o3").string(), ov);
    CHECK(mismatch.exit_code == 2);
    CHECK_THAT(mismatch.error_message, ContainsSubstring("subcommand"));

    // an interior atom outside the domain is caught as a config problem
    fs::path off = write_config(dir, "off.toml",
                                "subcommand = \"solve\"\n[domain]\nkind = \"disk\"\nh = 0.3\n"
                                "[problem]\ngamma = 3.0\n[mu1]\natoms = [[2.0, 0.0, 1.0]]\n"
                                "[solve]\nn_list = [1]\n");
    RunOutcome outside = run_experiment(off.string(), (dir / "o4").string());
    CHECK(outside.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("override hooks replace threads and seed") {
    fs::path dir = temp_dir("override");
    fs::path cfg = write_config(dir, "a2.toml",
                                "subcommand = \"a2\"\nseed = 7\n[a2]\nalpha_grid = [0.5]\n"
                                "n_balls = 40\nradial_alphas = []\n");
    RunOverrides ov;
    ov.seed = 123;
    RunOutcome out = run_experiment(cfg.string(), (dir / "o").string(), ov);
    REQUIRE(out.exit_code == 0);
    nlohmann::json summary = nlohmann::json::parse(slurp(dir / "o" / "a2_summary.json"));
    CHECK(summary["config"]["seed"] == 123);

    RunOutcome base = run_experiment(cfg.string(), (dir / "b").string());
    nlohmann::json bsum = nlohmann::json::parse(slurp(dir / "b" / "a2_summary.json"));
    CHECK(bsum["config"]["seed"] == 7);
    // different seed, different ball sample
    CHECK(summary["reports"][0]["constant_estimate"] != bsum["reports"][0]["constant_estimate"]);
    fs::remove_all(dir);
}

TEST_CASE("reruns produce byte-identical tables") {
    fs::path dir = temp_dir("determinism");
    fs::path zero = write_config(dir, "zero.toml", kZeroSolve);
    fs::path a2 = write_config(dir, "a2.toml",
                               "subcommand = \"a2\"\n[a2]\nalpha_grid = [0.0, 0.5, -0.5]\n"
                               "n_balls = 60\nradial_alphas = [0.5]\n");
    fs::path cs = write_config(dir, "cs.toml",
                               "subcommand = \"cs-check\"\nthreads = 3\n[cs]\ns_list = [0.5]\n"
                               "k_list = [1, 2]\nresolutions = [[32, 32], [48, 48]]\n"
                               "strip_height = 8.0\n");
    struct Case {
        fs::path cfg;
        std::vector<std::string> tables;
    };
    for (const Case& c : {Case{zero, {"diagnostics.csv", "solution_n1.json", "solution_n2.json"}},
                          Case{a2, {"a2_table.csv"}},
                          Case{cs, {"symbol_cells.csv"}}}) {
        RunOutcome r1 = run_experiment(c.cfg.string(), (dir / "r1").string());
        RunOutcome r2 = run_experiment(c.cfg.string(), (dir / "r2").string());
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        for (const std::string& f : c.tables) {
            INFO(c.cfg.filename().string() << " / " << f);
            CHECK(slurp(dir / "r1" / f) == slurp(dir / "r2" / f));
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("shipped configs parse and echo their own subcommand") {
    // keep the example configs loadable; the acceptance harness runs them in full
    const std::pair<const char*, const char*> shipped[] = {
        {"green_disk.toml", "solve"},      {"theorem1_study.toml", "study"},
        {"estim_a0.toml", "solve"},        {"estim_a05.toml", "solve"},
        {"estim_am05.toml", "solve"},      {"trace_study.toml", "study"},
        {"a2.toml", "a2"},                 {"cs.toml", "cs-check"},
        {"zero_solve.toml", "solve"},
    };
    for (const auto& [name, sub] : shipped) {
        fs::path p = fs::path(WFEM_CONFIG_DIR) / name;
        INFO(p.string());
        REQUIRE(fs::exists(p));
        ExperimentConfig cfg = load_experiment_config(p.string());
        CHECK(cfg.subcommand == sub);
        CHECK(config_to_json(cfg)["subcommand"] == sub);
    }
}
