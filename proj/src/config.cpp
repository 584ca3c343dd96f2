#include "rfh/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace rfh {

const TomlValue* TomlTable::find(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& tok, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + tok + "'");
    }
    if (pos != tok.size()) fail(line, "trailing characters in number '" + tok + "'");
    return v;
}

TomlValue parse_value(const std::string& raw, int line) {
    TomlValue v;
    v.line = line;
    std::string tok = trim(raw);
    if (tok.empty()) fail(line, "missing value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') fail(line, "unterminated string");
        v.kind = TomlValue::Kind::String;
        v.str = tok.substr(1, tok.size() - 2);
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    if (tok.front() == '[') {
        if (tok.back() != ']') fail(line, "unterminated array");
        v.kind = TomlValue::Kind::Array;
        std::string body = trim(tok.substr(1, tok.size() - 2));
        if (body.empty()) return v;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ','))
            v.array.push_back(parse_number(trim(item), line));
        return v;
    }
    v.kind = TomlValue::Kind::Number;
    v.num = parse_number(tok, line);
    return v;
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(line_no, "empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        std::string full = section.empty() ? key : section + "." + key;
        if (table.has(full)) fail(line_no, "duplicate key '" + full + "'");
        table.values[full] = parse_value(line.substr(eq + 1), line_no);
    }
    return table;
}

TomlTable parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str());
}

namespace {

[[noreturn]] void bad_key(const TomlValue& v, const std::string& key,
                          const std::string& expect) {
    throw ConfigError("config line " + std::to_string(v.line) + ": '" + key +
                      "' must be " + expect);
}

double get_number(const TomlTable& t, const std::string& key, double fallback) {
    const TomlValue* v = t.find(key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::Number) bad_key(*v, key, "a number");
    return v->num;
}

int get_int(const TomlTable& t, const std::string& key, int fallback) {
    const TomlValue* v = t.find(key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::Number || v->num != static_cast<int>(v->num))
        bad_key(*v, key, "an integer");
    return static_cast<int>(v->num);
}

std::string get_string(const TomlTable& t, const std::string& key,
                       const std::string& fallback) {
    const TomlValue* v = t.find(key);
    if (!v) return fallback;
    if (v->kind != TomlValue::Kind::String) bad_key(*v, key, "a string");
    return v->str;
}

const std::set<std::string> known_keys = {
    "spectrum.model",        "spectrum.num_modes",     "spectrum.values",
    "spectrum.multiplicities",
    "nonlinearity.kind",     "nonlinearity.p",         "nonlinearity.q",
    "nonlinearity.f",        "nonlinearity.g",         "nonlinearity.c0",
    "nonlinearity.c1",       "nonlinearity.c2",        "nonlinearity.delta",
    "functional.s",          "functional.grid_points",
    "index.truncation",
    "flow.horizon",          "flow.abs_tol",           "flow.rel_tol",
    "flow.initial_step",     "flow.max_step",          "flow.stationary_threshold",
    "flow.divergence_bound",
    "run.seed",              "run.threads",            "run.out",
};

}  // namespace

RunConfig run_config_from_toml(const TomlTable& table) {
    for (const auto& [key, val] : table.values)
        if (!known_keys.count(key))
            throw ConfigError("config line " + std::to_string(val.line) +
                              ": unknown key '" + key + "'");

    RunConfig cfg;

    std::string model = get_string(table, "spectrum.model", "circle");
    if (model == "circle") {
        int n = get_int(table, "spectrum.num_modes", 8);
        if (n < 1) throw ConfigError("'spectrum.num_modes' must be >= 1");
        cfg.spectrum = build_circle_spectrum(n);
    } else if (model == "synthetic") {
        const TomlValue* vals = table.find("spectrum.values");
        if (!vals || vals->kind != TomlValue::Kind::Array)
            throw ConfigError("synthetic spectrum requires array 'spectrum.values'");
        std::vector<DLevel> levels;
        const TomlValue* mult = table.find("spectrum.multiplicities");
        if (mult && mult->kind != TomlValue::Kind::Array)
            bad_key(*mult, "spectrum.multiplicities", "an array");
        if (mult && mult->array.size() != vals->array.size())
            throw ConfigError("'spectrum.multiplicities' length must match 'spectrum.values'");
        for (std::size_t i = 0; i < vals->array.size(); ++i) {
            int m = mult ? static_cast<int>(mult->array[i]) : 1;
            if (m < 1) throw ConfigError("'spectrum.multiplicities' entries must be >= 1");
            levels.push_back({vals->array[i], m});
        }
        cfg.spectrum = build_synthetic_spectrum(levels);
    } else {
        throw ConfigError("'spectrum.model' must be \"circle\" or \"synthetic\"");
    }

    std::string kind = get_string(table, "nonlinearity.kind", "quadratic");
    if (kind == "quadratic") {
        cfg.nonlin = NonlinearitySpec::quadratic();
    } else if (kind == "power") {
        double p = get_number(table, "nonlinearity.p", 3.0);
        double q = get_number(table, "nonlinearity.q", 3.0);
        if (p <= 1.0 || q <= 1.0)
            throw ConfigError("power nonlinearity requires p > 1 and q > 1");
        double f = get_number(table, "nonlinearity.f", 1.0);
        double g = get_number(table, "nonlinearity.g", 1.0);
        if (f <= 0.0 || g <= 0.0)
            throw ConfigError("power weights 'nonlinearity.f'/'nonlinearity.g' must be > 0");
        cfg.nonlin = NonlinearitySpec::power_type(
            p, q, [f](double) { return f; }, [g](double) { return g; });
    } else {
        throw ConfigError("'nonlinearity.kind' must be \"quadratic\" or \"power\"");
    }
    cfg.nonlin.c0 = get_number(table, "nonlinearity.c0", cfg.nonlin.c0);
    cfg.nonlin.c1 = get_number(table, "nonlinearity.c1", cfg.nonlin.c1);
    cfg.nonlin.c2 = get_number(table, "nonlinearity.c2", cfg.nonlin.c2);
    cfg.nonlin.delta = get_number(table, "nonlinearity.delta", cfg.nonlin.delta);
    if (cfg.nonlin.c0 <= 0.0 || cfg.nonlin.c0 >= 2.0)
        throw ConfigError("'nonlinearity.c0' must lie in (0, 2)");

    const TomlValue* sval = table.find("functional.s");
    if (sval && sval->kind == TomlValue::Kind::String) {
        if (sval->str != "auto") bad_key(*sval, "functional.s", "a number or \"auto\"");
        cfg.s_auto = true;
    } else {
        cfg.s = get_number(table, "functional.s", 0.5);
        if (cfg.s <= 0.0 || cfg.s >= 1.0)
            throw ConfigError("'functional.s' must lie in (0, 1)");
    }
    cfg.grid_points = get_int(table, "functional.grid_points", 0);
    if (cfg.grid_points < 0) throw ConfigError("'functional.grid_points' must be >= 0");

    if (const TomlValue* tr = table.find("index.truncation")) {
        if (tr->kind != TomlValue::Kind::Array) bad_key(*tr, "index.truncation", "an array");
        cfg.truncation.clear();
        for (double x : tr->array) {
            if (x != static_cast<int>(x) || x < 1)
                throw ConfigError("'index.truncation' entries must be positive integers");
            cfg.truncation.push_back(static_cast<int>(x));
        }
        if (cfg.truncation.empty()) throw ConfigError("'index.truncation' must be nonempty");
    }

    cfg.flow.horizon = get_number(table, "flow.horizon", cfg.flow.horizon);
    cfg.flow.abs_tol = get_number(table, "flow.abs_tol", cfg.flow.abs_tol);
    cfg.flow.rel_tol = get_number(table, "flow.rel_tol", cfg.flow.rel_tol);
    cfg.flow.initial_step = get_number(table, "flow.initial_step", cfg.flow.initial_step);
    cfg.flow.max_step = get_number(table, "flow.max_step", cfg.flow.max_step);
    cfg.flow.stationary_threshold =
        get_number(table, "flow.stationary_threshold", cfg.flow.stationary_threshold);
    cfg.flow.divergence_bound =
        get_number(table, "flow.divergence_bound", cfg.flow.divergence_bound);
    if (cfg.flow.horizon <= 0.0) throw ConfigError("'flow.horizon' must be > 0");
    if (cfg.flow.abs_tol <= 0.0 || cfg.flow.rel_tol <= 0.0)
        throw ConfigError("flow tolerances must be > 0");

    int seed = get_int(table, "run.seed", 0);
    if (seed < 0) throw ConfigError("'run.seed' must be >= 0");
    cfg.seed = static_cast<unsigned>(seed);
    cfg.threads = get_int(table, "run.threads", 1);
    if (cfg.threads < 1) throw ConfigError("'run.threads' must be >= 1");
    cfg.out_path = get_string(table, "run.out", "");

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_toml(parse_toml_file(path));
}

FunctionalContext make_context(const RunConfig& cfg) {
    double s = cfg.s;
    if (cfg.s_auto) {
        if (cfg.nonlin.kind != NonlinKind::PowerType)
            throw ConfigError("functional.s = \"auto\" requires a power nonlinearity");
        s = select_s(1, cfg.nonlin.p, cfg.nonlin.q).s;
    }
    return FunctionalContext(cfg.spectrum, s, cfg.nonlin, cfg.grid_points);
}

}  // namespace rfh
