#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfh/flow.hpp"

namespace rfh {

/// Config file is malformed or fails validation; message carries the line or
/// the section.key that is at fault.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimal TOML subset: [section] headers, key = value lines, # comments.
/// Values: quoted strings, booleans, numbers and flat arrays of numbers.
struct TomlValue {
    enum class Kind { String, Number, Boolean, Array } kind = Kind::Number;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> array;
    int line = 0;
};

struct TomlTable {
    // keyed by "section.key"; bare keys before any section use "" section
    std::map<std::string, TomlValue> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const TomlValue* find(const std::string& key) const;
};

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

/// Fully validated run configuration assembled from a config file.
struct RunConfig {
    Spectrum spectrum;
    NonlinearitySpec nonlin;
    bool s_auto = false;
    double s = 0.5;
    int grid_points = 0;                       // 0 = context default
    std::vector<int> truncation = {8, 12, 16};
    FlowOptions flow;
    unsigned seed = 0;
    int threads = 1;
    std::string out_path;
};

/// Parses and validates; throws ConfigError with the offending key on any
/// invalid or unknown field.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_toml(const TomlTable& table);

/// Builds the functional context from a config (runs select_s when s="auto").
FunctionalContext make_context(const RunConfig& cfg);

}  // namespace rfh
