#pragma once

// JSON experiment configuration. Every key is named explicitly; anything
// not listed here is rejected.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamsm/baselines.hpp"
#include "beamsm/errors.hpp"
#include "beamsm/jio_sm_rls.hpp"
#include "beamsm/signal_model.hpp"
#include "beamsm/sm_bound.hpp"

namespace beamsm {

// How SNR/INR in dB map onto absolute powers.
//   desired: power0 = 1 (unit BPSK), sigma^2 = 10^(-SNR/10), power_k = sigma^2 10^(INR/10)
//   noise:   sigma^2 = 1, power0 = 10^(SNR/10), power_k = 10^(INR/10)
enum class PowerReference { desired, noise };

enum class SinrAverage { db, linear };

struct ScenarioConfig {
    std::size_t num_elements = 64;
    double spacing_ratio = 0.5;
    std::size_t num_users = 25; // including the desired user
    double desired_doa_deg = 90.0;
    std::optional<std::vector<double>> interferer_doas_deg; // drawn per run when absent
    double doa_guard_deg = 5.0;
    double snr_db = 10.0;
    double inr_db = 30.0;
    std::size_t num_snapshots = 1000;
    PowerReference power_reference = PowerReference::desired;

    [[nodiscard]] double noise_power() const {
        return power_reference == PowerReference::desired ? 1.0 / db_to_linear(snr_db) : 1.0;
    }
    [[nodiscard]] double desired_power() const {
        return power_reference == PowerReference::desired ? 1.0 : db_to_linear(snr_db);
    }
    [[nodiscard]] double interferer_power() const { return noise_power() * db_to_linear(inr_db); }
};

struct BoundConfig {
    BoundMode mode = BoundMode::time_varying;
    double alpha = 26.0;
    double beta = 0.992;
    double fixed_value = 1.0;
    NoiseEstimatorKind noise_estimator = NoiseEstimatorKind::oracle;
};

struct AlgorithmConfig {
    Algorithm kind = Algorithm::jio_sm_rls;
    std::string label;
    double gamma = 1.0;
    std::size_t rank = 5;
    double rho = 1.3e-3;
    double varrho = 1.0e-4;
    Lambda1Options lambda1;
    BoundConfig bound;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::vector<AlgorithmConfig> algorithms;
    std::size_t runs = 20;
    std::uint64_t base_seed = 1;
    std::string output = "results";
    SinrAverage sinr_average = SinrAverage::db;
    std::size_t threads = 0; // 0: hardware concurrency
    double failure_threshold = 0.01;

    void validate() const;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "mvdr") return Algorithm::mvdr;
    if (s == "fr_rls") return Algorithm::fr_rls;
    if (s == "fr_sm_rls") return Algorithm::fr_sm_rls;
    if (s == "jio_rls") return Algorithm::jio_rls;
    if (s == "jio_sm_rls") return Algorithm::jio_sm_rls;
    throw ConfigError("unknown algorithm '" + s + "' (expected mvdr | fr_rls | fr_sm_rls | jio_rls | jio_sm_rls)");
}

inline ScenarioConfig parse_scenario(const json& j) {
    const std::string where = "scenario";
    reject_unknown(j, {"num_elements", "spacing_ratio", "num_users", "desired_doa_deg", "interferer_doas_deg",
                       "doa_guard_deg", "snr_db", "inr_db", "num_snapshots", "power_reference"},
                   where);
    ScenarioConfig s;
    read(j, "num_elements", s.num_elements, where);
    read(j, "spacing_ratio", s.spacing_ratio, where);
    read(j, "num_users", s.num_users, where);
    read(j, "desired_doa_deg", s.desired_doa_deg, where);
    if (j.contains("interferer_doas_deg") && !j.at("interferer_doas_deg").is_null()) {
        std::vector<double> v;
        read(j, "interferer_doas_deg", v, where);
        s.interferer_doas_deg = std::move(v);
    }
    read(j, "doa_guard_deg", s.doa_guard_deg, where);
    read(j, "snr_db", s.snr_db, where);
    read(j, "inr_db", s.inr_db, where);
    read(j, "num_snapshots", s.num_snapshots, where);
    std::string ref = "desired";
    read(j, "power_reference", ref, where);
    if (ref == "desired") s.power_reference = PowerReference::desired;
    else if (ref == "noise") s.power_reference = PowerReference::noise;
    else throw ConfigError("scenario.power_reference must be 'desired' or 'noise'");
    return s;
}

inline AlgorithmConfig parse_algorithm_entry(const json& j, std::size_t index) {
    const std::string where = "algorithms[" + std::to_string(index) + "]";
    reject_unknown(j, {"name", "label", "gamma", "rank", "rho", "varrho", "lambda1", "bound"}, where);
    if (!j.contains("name")) throw ConfigError(where + " needs a 'name'");
    AlgorithmConfig a;
    std::string name;
    read(j, "name", name, where);
    a.kind = parse_algorithm(name);
    a.label = name;
    read(j, "label", a.label, where);
    read(j, "gamma", a.gamma, where);
    read(j, "rank", a.rank, where);
    read(j, "rho", a.rho, where);
    read(j, "varrho", a.varrho, where);
    if (j.contains("lambda1")) {
        const auto& l = j.at("lambda1");
        const std::string lw = where + ".lambda1";
        reject_unknown(l, {"min", "max", "gain_policy", "delta_squared"}, lw);
        read(l, "min", a.lambda1.min, lw);
        read(l, "max", a.lambda1.max, lw);
        read(l, "delta_squared", a.lambda1.delta_squared, lw);
        std::string policy = "unit";
        read(l, "gain_policy", policy, lw);
        if (policy == "unit") a.lambda1.gain_policy = GainPolicy::unit;
        else if (policy == "previous") a.lambda1.gain_policy = GainPolicy::previous;
        else throw ConfigError(lw + ".gain_policy must be 'unit' or 'previous'");
    }
    if (j.contains("bound")) {
        const auto& b = j.at("bound");
        const std::string bw = where + ".bound";
        reject_unknown(b, {"mode", "alpha", "beta", "fixed_value", "noise_estimator"}, bw);
        std::string mode = "time_varying";
        read(b, "mode", mode, bw);
        if (mode == "time_varying") a.bound.mode = BoundMode::time_varying;
        else if (mode == "fixed") a.bound.mode = BoundMode::fixed;
        else throw ConfigError(bw + ".mode must be 'time_varying' or 'fixed'");
        read(b, "alpha", a.bound.alpha, bw);
        read(b, "beta", a.bound.beta, bw);
        read(b, "fixed_value", a.bound.fixed_value, bw);
        std::string est = "oracle";
        read(b, "noise_estimator", est, bw);
        if (est == "oracle") a.bound.noise_estimator = NoiseEstimatorKind::oracle;
        else if (est == "smoothed") a.bound.noise_estimator = NoiseEstimatorKind::smoothed;
        else throw ConfigError(bw + ".noise_estimator must be 'oracle' or 'smoothed'");
    }
    return a;
}

} // namespace detail

[[nodiscard]] inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using namespace detail;
    reject_unknown(j, {"scenario", "algorithms", "runs", "base_seed", "output", "sinr_average", "threads",
                       "failure_threshold"},
                   "config");
    ExperimentConfig c;
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario"));
    if (!j.contains("algorithms") || !j.at("algorithms").is_array())
        throw ConfigError("config needs an 'algorithms' array");
    std::size_t idx = 0;
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm_entry(a, idx++));
    read(j, "runs", c.runs, "config");
    read(j, "base_seed", c.base_seed, "config");
    read(j, "output", c.output, "config");
    read(j, "threads", c.threads, "config");
    read(j, "failure_threshold", c.failure_threshold, "config");
    std::string avg = "db";
    read(j, "sinr_average", avg, "config");
    if (avg == "db") c.sinr_average = SinrAverage::db;
    else if (avg == "linear") c.sinr_average = SinrAverage::linear;
    else throw ConfigError("sinr_average must be 'db' or 'linear'");
    c.validate();
    return c;
}

[[nodiscard]] inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

[[nodiscard]] inline ExperimentConfig load_config(const std::string& path) { return parse_config(load_json(path)); }

// Sets a dotted parameter on a raw config for sweeps. "scenario.<key>" and
// top-level keys address the config root; anything else (rank, bound.alpha,
// lambda1.max, ...) is set on every algorithm entry.
inline void apply_param(nlohmann::json& config, const std::string& name, const nlohmann::json& value) {
    std::vector<std::string> path;
    for (std::size_t start = 0;;) {
        const auto dot = name.find('.', start);
        path.push_back(name.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (const auto& part : path)
        if (part.empty()) throw ConfigError("malformed parameter name '" + name + "'");
    auto set = [&](nlohmann::json& root) {
        nlohmann::json* node = &root;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
        (*node)[path.back()] = value;
    };
    static const std::set<std::string> root_keys{"scenario", "runs", "base_seed", "sinr_average", "failure_threshold"};
    if (root_keys.count(path.front())) {
        set(config);
        return;
    }
    if (!config.contains("algorithms") || !config["algorithms"].is_array() || config["algorithms"].empty())
        throw ConfigError("cannot sweep '" + name + "': config has no algorithms");
    for (auto& a : config["algorithms"]) set(a);
}

inline void ExperimentConfig::validate() const {
    const auto& s = scenario;
    if (s.num_elements < 1) throw ConfigError("scenario.num_elements must be >= 1");
    if (!(s.spacing_ratio > 0.0)) throw ConfigError("scenario.spacing_ratio must be positive");
    if (s.num_users < 1) throw ConfigError("scenario.num_users must be >= 1 (the desired user)");
    if (s.num_users > s.num_elements) throw ConfigError("scenario.num_users must not exceed num_elements");
    if (s.num_snapshots < 1) throw ConfigError("scenario.num_snapshots must be >= 1");
    if (!(s.doa_guard_deg >= 0.0 && s.doa_guard_deg < 90.0)) throw ConfigError("scenario.doa_guard_deg out of range");
    if (s.interferer_doas_deg && s.interferer_doas_deg->size() != s.num_users - 1)
        throw ConfigError("scenario.interferer_doas_deg must list num_users - 1 angles");
    if (algorithms.empty()) throw ConfigError("algorithm list is empty");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (!(failure_threshold >= 0.0 && failure_threshold <= 1.0)) throw ConfigError("failure_threshold must lie in [0, 1]");

    std::set<std::string> labels;
    for (const auto& a : algorithms) {
        const std::string where = "algorithm '" + a.label + "'";
        if (a.label.empty() || a.label.find_first_of(",\"\n") != std::string::npos)
            throw ConfigError(where + ": label must be non-empty and free of commas, quotes and newlines");
        if (!labels.insert(a.label).second) throw ConfigError("duplicate algorithm label '" + a.label + "'");
        if (a.gamma == 0.0 || !std::isfinite(a.gamma)) throw ConfigError(where + ": gamma must be finite and nonzero");
        if ((a.kind == Algorithm::jio_rls || a.kind == Algorithm::jio_sm_rls) && (a.rank < 1 || a.rank > s.num_elements)) throw ConfigError(where + ": rank must satisfy 1 <= r <= m");
        if (!(a.rho > 0.0) || !(a.varrho > 0.0)) throw ConfigError(where + ": rho and varrho must be positive");
        try {
            a.lambda1.validate();
        } catch (const ParameterError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (is_set_membership(a.kind)) {
            if (a.bound.mode == BoundMode::time_varying) {
                if (!(a.bound.alpha > 1.0)) throw ConfigError(where + ": bound.alpha must exceed 1");
                if (!(a.bound.beta > 0.0 && a.bound.beta < 1.0)) throw ConfigError(where + ": bound.beta must lie in (0, 1)");
            } else if (!(a.bound.fixed_value >= 0.0)) {
                throw ConfigError(where + ": bound.fixed_value must be non-negative");
            }
        }
    }
}

} // namespace beamsm
