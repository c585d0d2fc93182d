#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfs/common.hpp"
#include "qfs/dataset.hpp"
#include "qfs/geometry.hpp"
#include "qfs/pulses.hpp"
#include "qfs/selection.hpp"

namespace qfs {

/// Every tunable of the pipeline. Only dataset_path and target_name lack
/// defaults; everything else round-trips through JSON unchanged.
struct RunConfig {
    std::string dataset_path;  // required
    std::string target_name;   // required
    std::string delimiter = ",";
    std::string missing_policy = "drop_rows";  // or "impute_mode"
    int n_bins = 10;

    PhysicalConstants constants;
    ScheduleFractions fractions;
    int n_steps = 40;
    int substeps_per_interval = 16;
    long long shots = 10000;

    std::uint64_t base_seed = 1;  // MDS restarts and measurement sampling
    int n_restarts = 20;
    std::vector<std::uint64_t> eval_seeds = {1, 2, 3, 4, 5};

    double alpha = 0.5;
    double prune_threshold = 0.7;
    double filter_fraction = 0.1;
    std::string filter_mode = "per_shot";    // or "per_unique"
    std::string interval_mode = "adaptive";  // or "fixed"
    int k_min = 1;
    int k_max = 6;
    int alternatives_sets = 3;

    double test_fraction = 0.2;
    double l2 = 1e-2;
    int gd_steps = 500;
    double learning_rate = 0.1;

    double slew_bound = 0.5;
    int max_atoms = 20;
    std::string output_dir = "qfs_run";

    MissingPolicy missing_policy_enum() const {
        if (missing_policy == "drop_rows") return MissingPolicy::drop_rows;
        if (missing_policy == "impute_mode") return MissingPolicy::impute_mode;
        throw ConfigError("missing_policy must be drop_rows or impute_mode");
    }
    FilterMode filter_mode_enum() const {
        if (filter_mode == "per_shot") return FilterMode::per_shot;
        if (filter_mode == "per_unique") return FilterMode::per_unique;
        throw ConfigError("filter_mode must be per_shot or per_unique");
    }
    IntervalMode interval_mode_enum() const {
        if (interval_mode == "adaptive") return IntervalMode::adaptive;
        if (interval_mode == "fixed") return IntervalMode::fixed;
        throw ConfigError("interval_mode must be adaptive or fixed");
    }

    void validate() const {
        if (dataset_path.empty()) throw ConfigError("dataset_path is required");
        if (target_name.empty()) throw ConfigError("target_name is required");
        if (delimiter.size() != 1) throw ConfigError("delimiter must be a single character");
        missing_policy_enum();
        filter_mode_enum();
        interval_mode_enum();
        if (n_bins < 2) throw ConfigError("n_bins must be at least 2");
        if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
        if (substeps_per_interval < 1)
            throw ConfigError("substeps_per_interval must be at least 1");
        if (shots < 1) throw ConfigError("shots must be positive");
        if (n_restarts < 1) throw ConfigError("n_restarts must be at least 1");
        if (eval_seeds.empty()) throw ConfigError("eval_seeds must be nonempty");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
        if (!(prune_threshold > 0.0 && prune_threshold <= 1.0))
            throw ConfigError("prune_threshold must lie in (0, 1]");
        if (!(filter_fraction > 0.0 && filter_fraction <= 1.0))
            throw ConfigError("filter_fraction must lie in (0, 1]");
        if (k_min < 1 || k_min > k_max) throw ConfigError("k_range must satisfy 1 <= min <= max");
        if (alternatives_sets < 1) throw ConfigError("alternatives_sets must be at least 1");
        if (!(test_fraction > 0.0 && test_fraction < 1.0))
            throw ConfigError("test_fraction must lie strictly between 0 and 1");
        if (!(l2 >= 0.0)) throw ConfigError("l2 must be nonnegative");
        if (gd_steps < 1) throw ConfigError("gd_steps must be at least 1");
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
        if (!(slew_bound > 0.0)) throw ConfigError("slew_bound must be positive");
        if (max_atoms < 1 || max_atoms > 20)
            throw ConfigError("max_atoms must lie in [1, 20]");
        if (output_dir.empty()) throw ConfigError("output_dir is required");
        try {
            constants.validate();
            fractions.validate();
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    }
};

namespace detail {

inline void require_known_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                               const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_key(const nlohmann::json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["dataset_path"] = c.dataset_path;
    j["target_name"] = c.target_name;
    j["delimiter"] = c.delimiter;
    j["missing_policy"] = c.missing_policy;
    j["n_bins"] = c.n_bins;
    j["constants"] = {{"c6", c.constants.c6},
                      {"omega_max", c.constants.omega_max},
                      {"delta_l_max", c.constants.delta_l_max},
                      {"delta_g_initial", c.constants.delta_g_initial},
                      {"total_time", c.constants.total_time}};
    j["fractions"] = {{"omega_rise_end", c.fractions.omega_rise_end},
                      {"omega_fall_start", c.fractions.omega_fall_start},
                      {"delta_g_hold_end", c.fractions.delta_g_hold_end},
                      {"delta_g_zero", c.fractions.delta_g_zero},
                      {"delta_l_start", c.fractions.delta_l_start},
                      {"delta_l_ramp_end", c.fractions.delta_l_ramp_end}};
    j["n_steps"] = c.n_steps;
    j["substeps_per_interval"] = c.substeps_per_interval;
    j["shots"] = c.shots;
    j["base_seed"] = c.base_seed;
    j["n_restarts"] = c.n_restarts;
    j["eval_seeds"] = c.eval_seeds;
    j["alpha"] = c.alpha;
    j["prune_threshold"] = c.prune_threshold;
    j["filter_fraction"] = c.filter_fraction;
    j["filter_mode"] = c.filter_mode;
    j["interval_mode"] = c.interval_mode;
    j["k_range"] = {c.k_min, c.k_max};
    j["alternatives_sets"] = c.alternatives_sets;
    j["test_fraction"] = c.test_fraction;
    j["l2"] = c.l2;
    j["gd_steps"] = c.gd_steps;
    j["learning_rate"] = c.learning_rate;
    j["slew_bound"] = c.slew_bound;
    j["max_atoms"] = c.max_atoms;
    j["output_dir"] = c.output_dir;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::require_known_keys(
        j,
        {"dataset_path", "target_name", "delimiter", "missing_policy", "n_bins", "constants",
         "fractions", "n_steps", "substeps_per_interval", "shots", "base_seed", "n_restarts",
         "eval_seeds", "alpha", "prune_threshold", "filter_fraction", "filter_mode",
         "interval_mode", "k_range", "alternatives_sets", "test_fraction", "l2", "gd_steps",
         "learning_rate", "slew_bound", "max_atoms", "output_dir"},
        "config");

    RunConfig c;
    detail::read_key(j, "dataset_path", c.dataset_path);
    detail::read_key(j, "target_name", c.target_name);
    detail::read_key(j, "delimiter", c.delimiter);
    detail::read_key(j, "missing_policy", c.missing_policy);
    detail::read_key(j, "n_bins", c.n_bins);
    if (j.contains("constants")) {
        const auto& k = j.at("constants");
        detail::require_known_keys(
            k, {"c6", "omega_max", "delta_l_max", "delta_g_initial", "total_time"},
            "constants");
        detail::read_key(k, "c6", c.constants.c6);
        detail::read_key(k, "omega_max", c.constants.omega_max);
        detail::read_key(k, "delta_l_max", c.constants.delta_l_max);
        detail::read_key(k, "delta_g_initial", c.constants.delta_g_initial);
        detail::read_key(k, "total_time", c.constants.total_time);
    }
    if (j.contains("fractions")) {
        const auto& k = j.at("fractions");
        detail::require_known_keys(k,
                                   {"omega_rise_end", "omega_fall_start", "delta_g_hold_end",
                                    "delta_g_zero", "delta_l_start", "delta_l_ramp_end"},
                                   "fractions");
        detail::read_key(k, "omega_rise_end", c.fractions.omega_rise_end);
        detail::read_key(k, "omega_fall_start", c.fractions.omega_fall_start);
        detail::read_key(k, "delta_g_hold_end", c.fractions.delta_g_hold_end);
        detail::read_key(k, "delta_g_zero", c.fractions.delta_g_zero);
        detail::read_key(k, "delta_l_start", c.fractions.delta_l_start);
        detail::read_key(k, "delta_l_ramp_end", c.fractions.delta_l_ramp_end);
    }
    detail::read_key(j, "n_steps", c.n_steps);
    detail::read_key(j, "substeps_per_interval", c.substeps_per_interval);
    detail::read_key(j, "shots", c.shots);
    detail::read_key(j, "base_seed", c.base_seed);
    detail::read_key(j, "n_restarts", c.n_restarts);
    detail::read_key(j, "eval_seeds", c.eval_seeds);
    detail::read_key(j, "alpha", c.alpha);
    detail::read_key(j, "prune_threshold", c.prune_threshold);
    detail::read_key(j, "filter_fraction", c.filter_fraction);
    detail::read_key(j, "filter_mode", c.filter_mode);
    detail::read_key(j, "interval_mode", c.interval_mode);
    if (j.contains("k_range")) {
        std::vector<int> range;
        detail::read_key(j, "k_range", range);
        if (range.size() != 2) throw ConfigError("k_range must be a [min, max] pair");
        c.k_min = range[0];
        c.k_max = range[1];
    }
    detail::read_key(j, "alternatives_sets", c.alternatives_sets);
    detail::read_key(j, "test_fraction", c.test_fraction);
    detail::read_key(j, "l2", c.l2);
    detail::read_key(j, "gd_steps", c.gd_steps);
    detail::read_key(j, "learning_rate", c.learning_rate);
    detail::read_key(j, "slew_bound", c.slew_bound);
    detail::read_key(j, "max_atoms", c.max_atoms);
    detail::read_key(j, "output_dir", c.output_dir);
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace qfs
