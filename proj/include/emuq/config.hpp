#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emuq/errors.hpp"
#include "emuq/operating_set.hpp"
#include "emuq/parameter_space.hpp"
#include "emuq/pmsm_ecm.hpp"
#include "emuq/reduction.hpp"
#include "emuq/toml_lite.hpp"

namespace emuq {

using ordered_json = nlohmann::ordered_json;

/// Declarative run configuration: model overrides, parameter space,
/// operating set, estimation method, reduction policy, and output directory.
/// Loaded from a TOML-style or JSON file; validated as a whole with errors
/// naming the offending key.
struct RunConfig {
    EcmParameters model;
    ParameterSpace space;
    bool grid_mode = true;
    GridSpec grid;
    std::filesystem::path cycle_file;
    std::optional<VehicleParams> vehicle;
    UqSettings method;
    double reduction_threshold = 0.01;
    std::vector<std::string> reduction_fixed;  // empty: select from GSA result
    std::filesystem::path output_dir = "out";
    unsigned workers = 0;  // 0: EMUQ_WORKERS or hardware concurrency
    bool compare = false;  // uq: run both methods and emit |difference| fields
};

namespace detail {

inline double require_number(const ordered_json& node, const std::string& key) {
    if (!node.contains(key)) throw config_error("config: missing key '" + key + "'");
    if (!node[key].is_number()) throw config_error("config: '" + key + "' must be a number");
    return node[key].get<double>();
}

inline double number_or(const ordered_json& node, const std::string& key, double fallback) {
    if (!node.contains(key)) return fallback;
    if (!node[key].is_number()) throw config_error("config: '" + key + "' must be a number");
    return node[key].get<double>();
}

inline std::string string_or(const ordered_json& node, const std::string& key,
                             const std::string& fallback) {
    if (!node.contains(key)) return fallback;
    if (!node[key].is_string()) throw config_error("config: '" + key + "' must be a string");
    return node[key].get<std::string>();
}

inline bool bool_or(const ordered_json& node, const std::string& key, bool fallback) {
    if (!node.contains(key)) return fallback;
    if (!node[key].is_boolean()) throw config_error("config: '" + key + "' must be a boolean");
    return node[key].get<bool>();
}

inline void parse_model(const ordered_json& node, EcmParameters& ecm) {
    static const std::vector<std::pair<std::string, double EcmParameters::*>> keys = {
        {"R_s", &EcmParameters::r_s},     {"lambda", &EcmParameters::lambda},
        {"L_d", &EcmParameters::l_d},     {"L_q", &EcmParameters::l_q},
        {"I_max", &EcmParameters::i_max}, {"V_max", &EcmParameters::v_max},
        {"k_hyst", &EcmParameters::k_hyst}, {"k_eddy", &EcmParameters::k_eddy},
        {"k_fric", &EcmParameters::k_fric}, {"k_wind", &EcmParameters::k_wind},
    };
    for (const auto& item : node.items()) {
        const std::string& key = item.key();
        if (key == "pole_pairs") {
            if (!item.value().is_number_integer())
                throw config_error("config: 'model.pole_pairs' must be an integer");
            ecm.pole_pairs = item.value().get<int>();
            continue;
        }
        bool known = false;
        for (const auto& [name, member] : keys) {
            if (key == name) {
                if (!item.value().is_number())
                    throw config_error("config: 'model." + key + "' must be a number");
                ecm.*member = item.value().get<double>();
                known = true;
                break;
            }
        }
        if (!known) throw config_error("config: unknown key 'model." + key + "'");
    }
    ecm.validate();
}

inline ParameterSpace parse_space(const ordered_json& node) {
    if (!node.contains("param") || !node["param"].is_array() || node["param"].empty())
        throw config_error("config: 'space.param' must be a non-empty array of tables");
    std::vector<RandomParameter> params;
    std::size_t idx = 0;
    for (const auto& p : node["param"]) {
        const std::string where = "space.param[" + std::to_string(idx++) + "]";
        if (!p.is_object()) throw config_error("config: '" + where + "' must be a table");
        if (!p.contains("name") || !p["name"].is_string())
            throw config_error("config: '" + where + ".name' must be a string");
        const std::string name = p["name"].get<std::string>();
        const double nominal = require_number(p, "nominal");
        if (p.contains("rel_halfwidth")) {
            const double rel = p["rel_halfwidth"].get<double>();
            if (!(rel > 0.0))
                throw config_error("config: '" + where + ".rel_halfwidth' must be > 0");
            params.push_back(RandomParameter::relative(name, nominal, rel));
        } else if (p.contains("lower") && p.contains("upper")) {
            params.push_back(
                {name, nominal, require_number(p, "lower"), require_number(p, "upper")});
        } else {
            throw config_error("config: '" + where +
                               "' needs either rel_halfwidth or lower/upper bounds");
        }
    }
    return ParameterSpace(std::move(params));
}

inline void parse_operating(const ordered_json& node, RunConfig& cfg) {
    const std::string kind = string_or(node, "kind", "grid");
    if (kind == "grid") {
        cfg.grid_mode = true;
        cfg.grid.t_min = require_number(node, "t_min");
        cfg.grid.t_max = require_number(node, "t_max");
        cfg.grid.n_t = static_cast<std::size_t>(require_number(node, "n_t"));
        cfg.grid.omega_min = require_number(node, "omega_min");
        cfg.grid.omega_max = require_number(node, "omega_max");
        cfg.grid.n_omega = static_cast<std::size_t>(require_number(node, "n_omega"));
        cfg.grid.clip_to_envelope = bool_or(node, "clip_to_envelope", true);
    } else if (kind == "cycle") {
        cfg.grid_mode = false;
        const std::string file = string_or(node, "cycle_file", "");
        if (file.empty()) throw config_error("config: missing key 'operating.cycle_file'");
        cfg.cycle_file = file;
        if (node.contains("vehicle")) {
            const auto& veh = node["vehicle"];
            VehicleParams v;
            v.mass_kg = require_number(veh, "mass_kg");
            v.wheel_radius_m = require_number(veh, "wheel_radius_m");
            v.gear_ratio = require_number(veh, "gear_ratio");
            v.c_rr = number_or(veh, "c_rr", 0.0);
            v.cd_a = number_or(veh, "cd_a", 0.0);
            v.air_density = number_or(veh, "air_density", 1.225);
            v.validate();
            cfg.vehicle = v;
        }
    } else {
        throw config_error("config: 'operating.kind' must be \"grid\" or \"cycle\"");
    }
}

inline void parse_method(const ordered_json& node, UqSettings& m) {
    const std::string kind = string_or(node, "kind", "pce");
    if (kind == "pce")
        m.method = GsaMethod::Pce;
    else if (kind == "mc")
        m.method = GsaMethod::MonteCarlo;
    else
        throw config_error("config: 'method.kind' must be \"mc\" or \"pce\"");
    m.n_samples = static_cast<std::size_t>(number_or(node, "n_samples", 0.0));
    m.seed = static_cast<std::uint64_t>(number_or(node, "seed", 42.0));
    const double degree = number_or(node, "degree", 2.0);
    if (degree < 0.0) throw config_error("config: 'method.degree' must be >= 0");
    m.degree = static_cast<unsigned>(degree);
    m.oversampling = number_or(node, "oversampling", 2.0);
    if (m.oversampling < 1.0) throw config_error("config: 'method.oversampling' must be >= 1");
    const std::string strategy = string_or(node, "strategy", "pseudo");
    if (strategy == "pseudo")
        m.strategy = SampleStrategy::PseudoRandom;
    else if (strategy == "lhs")
        m.strategy = SampleStrategy::LatinHypercube;
    else
        throw config_error("config: 'method.strategy' must be \"pseudo\" or \"lhs\"");
}

}  // namespace detail

inline RunConfig config_from_json(const ordered_json& doc) {
    RunConfig cfg;
    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        if (key != "model" && key != "space" && key != "operating" && key != "method" &&
            key != "reduction" && key != "output")
            throw config_error("config: unknown top-level key '" + key + "'");
    }
    if (doc.contains("model")) detail::parse_model(doc["model"], cfg.model);
    if (!doc.contains("space")) throw config_error("config: missing [space] block");
    cfg.space = detail::parse_space(doc["space"]);
    if (!doc.contains("operating")) throw config_error("config: missing [operating] block");
    detail::parse_operating(doc["operating"], cfg);
    if (doc.contains("method")) detail::parse_method(doc["method"], cfg.method);
    if (doc.contains("reduction")) {
        const auto& red = doc["reduction"];
        cfg.reduction_threshold = detail::number_or(red, "threshold", 0.01);
        if (red.contains("fixed")) {
            if (!red["fixed"].is_array())
                throw config_error("config: 'reduction.fixed' must be an array of names");
            for (const auto& name : red["fixed"]) {
                if (!name.is_string())
                    throw config_error("config: 'reduction.fixed' entries must be strings");
                cfg.reduction_fixed.push_back(name.get<std::string>());
            }
        }
    }
    if (doc.contains("output")) {
        cfg.output_dir = detail::string_or(doc["output"], "directory", "out");
        const double w = detail::number_or(doc["output"], "workers", 0.0);
        if (w < 0.0) throw config_error("config: 'output.workers' must be >= 0");
        cfg.workers = static_cast<unsigned>(w);
    }

    // cross-checks that need the whole document
    for (const auto& name : cfg.reduction_fixed)
        if (!cfg.space.contains(name))
            throw config_error("config: 'reduction.fixed' names unknown parameter '" + name + "'");
    if (cfg.method.method == GsaMethod::MonteCarlo && cfg.method.n_samples == 0)
        throw config_error("config: 'method.n_samples' is required when method.kind = \"mc\"");
    return cfg;
}

/// Loads a configuration file. JSON documents (leading '{') and TOML-style
/// documents are accepted equivalently.
inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("config: cannot open '" + path.string() + "'");
    // sniff the first non-space character
    char c = 0;
    while (in.get(c) && (c == ' ' || c == '\t' || c == '\n' || c == '\r')) {
    }
    in.clear();
    in.seekg(0);
    ordered_json doc;
    if (c == '{') {
        try {
            doc = ordered_json::parse(in);
        } catch (const std::exception& e) {
            throw io_error("config: JSON parse failure in '" + path.string() + "': " + e.what());
        }
    } else {
        doc = toml_lite::parse(in);
    }
    return config_from_json(doc);
}

}  // namespace emuq
