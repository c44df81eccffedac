#pragma once
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfem/cs_extension.hpp"
#include "wfem/measure.hpp"
#include "wfem/mesh.hpp"

namespace wfem {

// schema or syntax problem in an experiment config: maps to the usage exit code
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// TOML subset: [section] headers, key = value lines, values are strings,
// integers, floats, booleans, or single-line (possibly nested) arrays.
// No array-of-tables, inline tables, dates, or multi-line strings.
struct TomlValue {
    enum class Kind { String, Integer, Float, Bool, Array };
    Kind kind = Kind::String;
    std::string str;
    long long integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;

    double as_number() const {
        if (kind == Kind::Integer) return double(integer);
        if (kind == Kind::Float) return real;
        throw config_error("expected a number");
    }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

inline std::string toml_trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct TomlCursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 0;
    std::string where;

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(where + ":" + std::to_string(line) + ": " + msg);
    }
    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool at_end_or_comment() {
        skip_ws();
        return pos >= text.size() || text[pos] == '#';
    }
};

inline TomlValue toml_parse_value(TomlCursor& c);

inline TomlValue toml_parse_scalar(TomlCursor& c) {
    TomlValue v;
    if (c.text[c.pos] == '"') {
        v.kind = TomlValue::Kind::String;
        ++c.pos;
        while (c.pos < c.text.size() && c.text[c.pos] != '"') {
            if (c.text[c.pos] == '\\' && c.pos + 1 < c.text.size()) {
                char nx = c.text[c.pos + 1];
                if (nx == '"' || nx == '\\') {
                    v.str += nx;
                    c.pos += 2;
                    continue;
                }
            }
            v.str += c.text[c.pos++];
        }
        if (c.pos >= c.text.size()) c.fail("unterminated string");
        ++c.pos;
        return v;
    }
    std::size_t start = c.pos;
    while (c.pos < c.text.size()) {
        char ch = c.text[c.pos];
        if (ch == ',' || ch == ']' || ch == '#' || ch == ' ' || ch == '\t') break;
        ++c.pos;
    }
    std::string tok = c.text.substr(start, c.pos - start);
    if (tok.empty()) c.fail("expected a value");
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Bool;
        v.boolean = tok == "true";
        return v;
    }
    bool integral = true;
    for (std::size_t i = 0; i < tok.size(); ++i) {
        char ch = tok[i];
        if (i == 0 && (ch == '+' || ch == '-')) continue;
        if (!std::isdigit(static_cast<unsigned char>(ch))) integral = false;
    }
    try {
        std::size_t used = 0;
        if (integral) {
            v.kind = TomlValue::Kind::Integer;
            v.integer = std::stoll(tok, &used);
        } else {
            v.kind = TomlValue::Kind::Float;
            v.real = std::stod(tok, &used);
        }
        if (used != tok.size()) c.fail("malformed value '" + tok + "'");
    } catch (const std::exception&) {
        c.fail("malformed value '" + tok + "'");
    }
    return v;
}

inline TomlValue toml_parse_value(TomlCursor& c) {
    c.skip_ws();
    if (c.pos >= c.text.size()) c.fail("expected a value");
    if (c.text[c.pos] != '[') return toml_parse_scalar(c);
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    ++c.pos;
    c.skip_ws();
    if (c.pos < c.text.size() && c.text[c.pos] == ']') {
        ++c.pos;
        return v;
    }
    while (true) {
        v.array.push_back(toml_parse_value(c));
        c.skip_ws();
        if (c.pos >= c.text.size()) c.fail("unterminated array");
        if (c.text[c.pos] == ',') {
            ++c.pos;
            continue;
        }
        if (c.text[c.pos] == ']') {
            ++c.pos;
            return v;
        }
        c.fail("expected ',' or ']' in array");
    }
}

inline bool toml_bare_key(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-' &&
            ch != '.')
            return false;
    return true;
}

} // namespace detail

inline TomlTable parse_toml(const std::string& text, const std::string& where = "config") {
    TomlTable table;
    std::string prefix;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::toml_trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            std::size_t close = line.find(']');
            if (close == std::string::npos)
                throw config_error(where + ":" + std::to_string(lineno) + ": unterminated section header");
            std::string rest = detail::toml_trim(line.substr(close + 1));
            if (!rest.empty() && rest[0] != '#')
                throw config_error(where + ":" + std::to_string(lineno) + ": trailing text after section header");
            std::string name = detail::toml_trim(line.substr(1, close - 1));
            if (!detail::toml_bare_key(name) || name.front() == '.' || name.back() == '.')
                throw config_error(where + ":" + std::to_string(lineno) + ": malformed section name '" + name + "'");
            prefix = name + ".";
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(where + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = detail::toml_trim(line.substr(0, eq));
        if (!detail::toml_bare_key(key) || key.find('.') != std::string::npos)
            throw config_error(where + ":" + std::to_string(lineno) + ": malformed key '" + key + "'");
        std::string rhs = line.substr(eq + 1);
        detail::TomlCursor cur{rhs, 0, lineno, where};
        TomlValue v = detail::toml_parse_value(cur);
        if (!cur.at_end_or_comment()) cur.fail("trailing text after value");
        std::string full = prefix + key;
        if (table.count(full))
            throw config_error(where + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
        table.emplace(full, std::move(v));
    }
    return table;
}

namespace detail {

inline const TomlValue* toml_find(const TomlTable& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

inline std::string toml_string(const TomlTable& t, const std::string& key,
                               const std::string& fallback, bool required = false) {
    const TomlValue* v = toml_find(t, key);
    if (!v) {
        if (required) throw config_error("missing required key '" + key + "'");
        return fallback;
    }
    if (v->kind != TomlValue::Kind::String)
        throw config_error("key '" + key + "' must be a string");
    return v->str;
}

inline double toml_double(const TomlTable& t, const std::string& key, double fallback,
                          bool required = false) {
    const TomlValue* v = toml_find(t, key);
    if (!v) {
        if (required) throw config_error("missing required key '" + key + "'");
        return fallback;
    }
    if (v->kind != TomlValue::Kind::Integer && v->kind != TomlValue::Kind::Float)
        throw config_error("key '" + key + "' must be a number");
    return v->as_number();
}

inline long long toml_int(const TomlTable& t, const std::string& key, long long fallback,
                          bool required = false) {
    const TomlValue* v = toml_find(t, key);
    if (!v) {
        if (required) throw config_error("missing required key '" + key + "'");
        return fallback;
    }
    if (v->kind != TomlValue::Kind::Integer)
        throw config_error("key '" + key + "' must be an integer");
    return v->integer;
}

inline std::vector<double> toml_double_list(const TomlTable& t, const std::string& key,
                                            std::vector<double> fallback) {
    const TomlValue* v = toml_find(t, key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::Array)
        throw config_error("key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v->array) {
        if (e.kind != TomlValue::Kind::Integer && e.kind != TomlValue::Kind::Float)
            throw config_error("key '" + key + "' must be an array of numbers");
        out.push_back(e.as_number());
    }
    return out;
}

inline std::vector<int> toml_int_list(const TomlTable& t, const std::string& key,
                                      std::vector<int> fallback) {
    const TomlValue* v = toml_find(t, key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::Array)
        throw config_error("key '" + key + "' must be an array of integers");
    std::vector<int> out;
    for (const auto& e : v->array) {
        if (e.kind != TomlValue::Kind::Integer)
            throw config_error("key '" + key + "' must be an array of integers");
        out.push_back(int(e.integer));
    }
    return out;
}

// atoms = [[x, y, mass], ...]
inline std::vector<Atom> toml_atoms(const TomlTable& t, const std::string& key) {
    const TomlValue* v = toml_find(t, key);
    if (!v) return {};
    if (v->kind != TomlValue::Kind::Array)
        throw config_error("key '" + key + "' must be an array of [x, y, mass] triples");
    std::vector<Atom> out;
    for (const auto& row : v->array) {
        if (row.kind != TomlValue::Kind::Array || row.array.size() != 3)
            throw config_error("key '" + key + "' must be an array of [x, y, mass] triples");
        for (const auto& e : row.array)
            if (e.kind != TomlValue::Kind::Integer && e.kind != TomlValue::Kind::Float)
                throw config_error("key '" + key + "' entries must be numbers");
        out.push_back({{row.array[0].as_number(), row.array[1].as_number()},
                       row.array[2].as_number()});
    }
    return out;
}

} // namespace detail

struct SolveParams {
    std::vector<int> n_list{1, 2, 3, 4, 5, 6};
    std::vector<double> theta_grid; // truncation-energy diagnostics
    std::vector<double> q_grid;     // weighted W^{1,q} diagnostics
    std::vector<double> t_grid;     // level-set tail diagnostics
    int max_newton = 100;
    int quad_order = 6;
    bool write_solutions = true;
};

struct StudyParams {
    int levels = 4;
    int refines_per_level = 1;
    int n_base = 2;
    int n_step = 1;
    std::vector<double> q_grid{1.2, 1.5, 1.8, 2.0};
    std::vector<double> trace_q;
};

struct A2Params {
    std::vector<double> alpha_grid{0.0, 0.25, 0.5, 0.75, -0.25, -0.5, -0.75};
    int n_balls = 200;
    std::vector<double> radial_alphas{0.25, 0.5, 0.75};
};

struct CsParams {
    std::vector<double> s_list{0.5, 0.25, 0.75};
    std::vector<int> k_list{1, 2, 3, 4};
    std::vector<TensorGrid> resolutions{{256, 256}};
    double strip_height = 0.0; // <= 0 picks 8/k_min
};

struct ExperimentConfig {
    std::string subcommand; // solve | study | a2 | cs-check
    int threads = 1;
    std::uint64_t seed = 0;

    DomainDesc domain{DomainDesc::Kind::Disk, 1.0};
    double h_target = 0.1;
    BoundaryPartitionRule partition{};
    double alpha = 0.0;
    double gamma = 3.0;
    MeasureData mu1;
    MeasureData mu2;

    SolveParams solve;
    StudyParams study;
    A2Params a2;
    CsParams cs;
};

namespace detail {

inline void toml_check_keys(const TomlTable& t, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : t)
        if (!allowed.count(k)) throw config_error("unknown config key '" + k + "'");
}

inline void parse_geometry(const TomlTable& t, ExperimentConfig& cfg) {
    std::string kind = toml_string(t, "domain.kind", "disk");
    if (kind == "disk") {
        cfg.domain.kind = DomainDesc::Kind::Disk;
        cfg.domain.radius = toml_double(t, "domain.radius", 1.0);
        if (!(cfg.domain.radius > 0.0))
            throw config_error("domain.radius must be positive");
    } else if (kind == "square") {
        cfg.domain.kind = DomainDesc::Kind::Square;
        cfg.domain.radius = 1.0;
        if (toml_find(t, "domain.radius"))
            throw config_error("domain.radius is only meaningful for kind = \"disk\"");
    } else {
        throw config_error("domain.kind must be \"disk\" or \"square\"");
    }
    cfg.h_target = toml_double(t, "domain.h", 0.1);
    if (!(cfg.h_target > 0.0)) throw config_error("domain.h must be positive");

    std::string part = toml_string(t, "partition.kind", "full_dirichlet");
    double param = toml_double(t, "partition.param", 0.0);
    if (part == "full_dirichlet") {
        cfg.partition.kind = BoundaryPartitionRule::Kind::FullDirichlet;
    } else if (part == "angular_split") {
        cfg.partition.kind = BoundaryPartitionRule::Kind::AngularSplit;
        if (!(param > 0.0 && param < 2.0 * M_PI))
            throw config_error("partition.param (split angle) must lie in (0, 2*pi)");
    } else if (part == "axis_split") {
        cfg.partition.kind = BoundaryPartitionRule::Kind::AxisSplit;
        if (!(param > 0.0 && param < 1.0))
            throw config_error("partition.param (split height) must lie in (0, 1)");
    } else {
        throw config_error(
            "partition.kind must be one of full_dirichlet, angular_split, axis_split");
    }
    cfg.partition.param = param;

    cfg.alpha = toml_double(t, "problem.alpha", 0.0);
    if (!(cfg.alpha > -1.0 && cfg.alpha < 1.0))
        throw config_error("problem.alpha must lie in (-1, 1), got " +
                           std::to_string(cfg.alpha));
    cfg.gamma = toml_double(t, "problem.gamma", 3.0);
    if (!(cfg.gamma > 1.0))
        throw config_error("problem.gamma must exceed 1, got " + std::to_string(cfg.gamma));

    cfg.mu1.atoms = toml_atoms(t, "mu1.atoms");
    cfg.mu1.density_id = toml_string(t, "mu1.density", "");
    cfg.mu1.support = MeasureSupport::Interior;
    cfg.mu2.atoms = toml_atoms(t, "mu2.atoms");
    cfg.mu2.density_id = toml_string(t, "mu2.density", "");
    cfg.mu2.support = MeasureSupport::Gamma2;
    for (const MeasureData* m : {&cfg.mu1, &cfg.mu2})
        if (!m->density_id.empty()) {
            try {
                density_from_id(m->density_id);
            } catch (const std::exception& e) {
                throw config_error(std::string("measure density: ") + e.what());
            }
        }
}

inline const std::set<std::string> kGeometryKeys = {
    "domain.kind",      "domain.radius",  "domain.h",   "partition.kind",
    "partition.param",  "problem.alpha",  "problem.gamma",
    "mu1.atoms",        "mu1.density",    "mu2.atoms",  "mu2.density",
};

inline std::set<std::string> with_common(std::set<std::string> extra) {
    extra.insert({"subcommand", "threads", "seed"});
    return extra;
}

} // namespace detail

inline ExperimentConfig config_from_toml(const TomlTable& t) {
    ExperimentConfig cfg;
    cfg.subcommand = detail::toml_string(t, "subcommand", "", true);
    long long threads = detail::toml_int(t, "threads", 1);
    if (threads < 1) throw config_error("threads must be >= 1");
    cfg.threads = int(threads);
    long long seed = detail::toml_int(t, "seed", 0);
    if (seed < 0) throw config_error("seed must be nonnegative");
    cfg.seed = std::uint64_t(seed);

    using detail::kGeometryKeys;
    using detail::toml_double;
    using detail::toml_double_list;
    using detail::toml_int;
    using detail::toml_int_list;
    using detail::with_common;

    if (cfg.subcommand == "solve") {
        auto allowed = with_common(kGeometryKeys);
        allowed.insert({"solve.n_list", "solve.theta_grid", "solve.q_grid", "solve.t_grid",
                        "solve.max_newton", "solve.quad_order", "solve.write_solutions"});
        detail::toml_check_keys(t, allowed);
        detail::parse_geometry(t, cfg);
        auto& sp = cfg.solve;
        sp.n_list = toml_int_list(t, "solve.n_list", sp.n_list);
        if (sp.n_list.empty()) throw config_error("solve.n_list must be nonempty");
        for (std::size_t i = 0; i < sp.n_list.size(); ++i) {
            if (sp.n_list[i] < 1) throw config_error("solve.n_list entries must be >= 1");
            if (i > 0 && sp.n_list[i] <= sp.n_list[i - 1])
                throw config_error("solve.n_list must be strictly increasing");
        }
        sp.theta_grid = toml_double_list(t, "solve.theta_grid", {});
        for (double th : sp.theta_grid)
            if (!(th > 1.0)) throw config_error("solve.theta_grid entries must exceed 1");
        sp.q_grid = toml_double_list(t, "solve.q_grid", {});
        for (double q : sp.q_grid)
            if (!(q >= 1.0)) throw config_error("solve.q_grid entries must be >= 1");
        sp.t_grid = toml_double_list(t, "solve.t_grid", {});
        for (std::size_t i = 0; i < sp.t_grid.size(); ++i) {
            if (!(sp.t_grid[i] >= 0.0)) throw config_error("solve.t_grid entries must be >= 0");
            if (i > 0 && sp.t_grid[i] <= sp.t_grid[i - 1])
                throw config_error("solve.t_grid must be strictly increasing");
        }
        sp.max_newton = int(toml_int(t, "solve.max_newton", sp.max_newton));
        if (sp.max_newton < 1) throw config_error("solve.max_newton must be >= 1");
        sp.quad_order = int(toml_int(t, "solve.quad_order", sp.quad_order));
        if (sp.quad_order < 1 || sp.quad_order > 12)
            throw config_error("solve.quad_order must lie in [1, 12]");
        if (const TomlValue* v = detail::toml_find(t, "solve.write_solutions")) {
            if (v->kind != TomlValue::Kind::Bool)
                throw config_error("solve.write_solutions must be a boolean");
            sp.write_solutions = v->boolean;
        }
    } else if (cfg.subcommand == "study") {
        auto allowed = with_common(kGeometryKeys);
        allowed.insert({"study.levels", "study.refines_per_level", "study.n_base",
                        "study.n_step", "study.q_grid", "study.trace_q"});
        detail::toml_check_keys(t, allowed);
        detail::parse_geometry(t, cfg);
        auto& st = cfg.study;
        st.levels = int(toml_int(t, "study.levels", st.levels));
        if (st.levels < 3) throw config_error("study.levels must be >= 3 (slope fits need three points)");
        st.refines_per_level = int(toml_int(t, "study.refines_per_level", st.refines_per_level));
        if (st.refines_per_level < 1) throw config_error("study.refines_per_level must be >= 1");
        st.n_base = int(toml_int(t, "study.n_base", st.n_base));
        st.n_step = int(toml_int(t, "study.n_step", st.n_step));
        if (st.n_base < 1 || st.n_step < 0)
            throw config_error("study.n_base must be >= 1 and study.n_step >= 0");
        st.q_grid = toml_double_list(t, "study.q_grid", st.q_grid);
        if (st.q_grid.empty()) throw config_error("study.q_grid must be nonempty");
        for (double q : st.q_grid)
            if (!(q >= 1.0)) throw config_error("study.q_grid entries must be >= 1");
        st.trace_q = toml_double_list(t, "study.trace_q", {});
        for (double q : st.trace_q) {
            if (!(q > 1.0)) throw config_error("study.trace_q entries must exceed 1");
            double sstar = 1.0 - (1.0 + cfg.alpha) / q;
            if (!(sstar > 0.0 && sstar < 1.0))
                throw config_error("study.trace_q: trace order 1-(1+alpha)/q = " +
                                   std::to_string(sstar) + " must lie in (0,1)");
        }
    } else if (cfg.subcommand == "a2") {
        auto allowed = with_common({"domain.kind", "domain.radius", "a2.alpha_grid",
                                    "a2.n_balls", "a2.radial_alphas"});
        detail::toml_check_keys(t, allowed);
        std::string kind = detail::toml_string(t, "domain.kind", "disk");
        if (kind == "disk") {
            cfg.domain.kind = DomainDesc::Kind::Disk;
            cfg.domain.radius = toml_double(t, "domain.radius", 1.0);
            if (!(cfg.domain.radius > 0.0)) throw config_error("domain.radius must be positive");
        } else if (kind == "square") {
            cfg.domain.kind = DomainDesc::Kind::Square;
        } else {
            throw config_error("domain.kind must be \"disk\" or \"square\"");
        }
        auto& ap = cfg.a2;
        ap.alpha_grid = toml_double_list(t, "a2.alpha_grid", ap.alpha_grid);
        if (ap.alpha_grid.empty()) throw config_error("a2.alpha_grid must be nonempty");
        for (double a : ap.alpha_grid)
            if (!(a > -1.0 && a < 1.0))
                throw config_error("a2.alpha_grid entries must lie in (-1, 1)");
        ap.n_balls = int(toml_int(t, "a2.n_balls", ap.n_balls));
        if (ap.n_balls < 1) throw config_error("a2.n_balls must be >= 1");
        ap.radial_alphas = toml_double_list(t, "a2.radial_alphas", ap.radial_alphas);
        for (double a : ap.radial_alphas)
            if (!(a > -1.0 && a < 1.0))
                throw config_error("a2.radial_alphas entries must lie in (-1, 1)");
    } else if (cfg.subcommand == "cs-check") {
        auto allowed =
            with_common({"cs.s_list", "cs.k_list", "cs.resolutions", "cs.strip_height"});
        detail::toml_check_keys(t, allowed);
        auto& cp = cfg.cs;
        cp.s_list = toml_double_list(t, "cs.s_list", cp.s_list);
        if (cp.s_list.empty()) throw config_error("cs.s_list must be nonempty");
        for (double s : cp.s_list)
            if (!(s > 0.0 && s < 1.0)) throw config_error("cs.s_list entries must lie in (0, 1)");
        cp.k_list = toml_int_list(t, "cs.k_list", cp.k_list);
        if (cp.k_list.empty()) throw config_error("cs.k_list must be nonempty");
        int kmax = 0;
        for (int k : cp.k_list) {
            if (k < 1) throw config_error("cs.k_list entries must be >= 1");
            kmax = std::max(kmax, k);
        }
        if (const TomlValue* v = detail::toml_find(t, "cs.resolutions")) {
            if (v->kind != TomlValue::Kind::Array)
                throw config_error("cs.resolutions must be an array of [n_x, n_y] pairs");
            cp.resolutions.clear();
            for (const auto& row : v->array) {
                if (row.kind != TomlValue::Kind::Array || row.array.size() != 2 ||
                    row.array[0].kind != TomlValue::Kind::Integer ||
                    row.array[1].kind != TomlValue::Kind::Integer)
                    throw config_error("cs.resolutions must be an array of [n_x, n_y] pairs");
                cp.resolutions.push_back(
                    {int(row.array[0].integer), int(row.array[1].integer)});
            }
        }
        if (cp.resolutions.empty()) throw config_error("cs.resolutions must be nonempty");
        for (const auto& g : cp.resolutions) {
            if (g.n_x < 2 || g.n_y < 8)
                throw config_error("cs.resolutions entries need n_x >= 2 and n_y >= 8");
            if (4 * kmax > g.n_y)
                throw config_error("cs.resolutions: lateral lattice needs >= 4 points per "
                                   "wavelength of the largest mode");
        }
        cp.strip_height = toml_double(t, "cs.strip_height", cp.strip_height);
    } else {
        throw config_error("subcommand must be one of solve, study, a2, cs-check (got '" +
                           cfg.subcommand + "')");
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_toml(parse_toml(buf.str(), path));
}

// full effective configuration (defaults materialized) for report provenance
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"subcommand", cfg.subcommand},
                     {"threads", cfg.threads},
                     {"seed", cfg.seed}};
    auto domain_json = [&] {
        nlohmann::json d{{"kind", cfg.domain.kind == DomainDesc::Kind::Disk ? "disk" : "square"}};
        if (cfg.domain.kind == DomainDesc::Kind::Disk) d["radius"] = cfg.domain.radius;
        return d;
    };
    if (cfg.subcommand == "solve" || cfg.subcommand == "study") {
        nlohmann::json d = domain_json();
        d["h"] = cfg.h_target;
        j["domain"] = d;
        const char* part = cfg.partition.kind == BoundaryPartitionRule::Kind::FullDirichlet
                               ? "full_dirichlet"
                               : cfg.partition.kind == BoundaryPartitionRule::Kind::AngularSplit
                                     ? "angular_split"
                                     : "axis_split";
        j["partition"] = {{"kind", part}, {"param", cfg.partition.param}};
        j["problem"] = {{"alpha", cfg.alpha}, {"gamma", cfg.gamma}};
        j["mu1"] = measure_to_json(cfg.mu1);
        j["mu2"] = measure_to_json(cfg.mu2);
    }
    if (cfg.subcommand == "solve") {
        j["solve"] = {{"n_list", cfg.solve.n_list},
                      {"theta_grid", cfg.solve.theta_grid},
                      {"q_grid", cfg.solve.q_grid},
                      {"t_grid", cfg.solve.t_grid},
                      {"max_newton", cfg.solve.max_newton},
                      {"quad_order", cfg.solve.quad_order},
                      {"write_solutions", cfg.solve.write_solutions}};
    } else if (cfg.subcommand == "study") {
        j["study"] = {{"levels", cfg.study.levels},
                      {"refines_per_level", cfg.study.refines_per_level},
                      {"n_base", cfg.study.n_base},
                      {"n_step", cfg.study.n_step},
                      {"q_grid", cfg.study.q_grid},
                      {"trace_q", cfg.study.trace_q}};
    } else if (cfg.subcommand == "a2") {
        j["domain"] = domain_json();
        j["a2"] = {{"alpha_grid", cfg.a2.alpha_grid},
                   {"n_balls", cfg.a2.n_balls},
                   {"radial_alphas", cfg.a2.radial_alphas}};
    } else if (cfg.subcommand == "cs-check") {
        nlohmann::json res = nlohmann::json::array();
        for (const auto& g : cfg.cs.resolutions) res.push_back({g.n_x, g.n_y});
        j["cs"] = {{"s_list", cfg.cs.s_list},
                   {"k_list", cfg.cs.k_list},
                   {"resolutions", res},
                   {"strip_height", cfg.cs.strip_height}};
    }
    return j;
}

} // namespace wfem
