#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "bellvqc/error.hpp"
#include "bellvqc/measure/signals.hpp"
#include "bellvqc/rng.hpp"
#include "bellvqc/vqc/ansatz.hpp"
#include "bellvqc/vqc/train.hpp"

namespace bellvqc::cli {

using nlohmann::json;

inline constexpr int config_schema_version = 1;

enum class ModelType { honeycomb, chain, svetlichny, mermin, chsh, gisin };

[[nodiscard]] inline std::string_view model_name(ModelType m) {
    switch (m) {
    case ModelType::honeycomb: return "honeycomb";
    case ModelType::chain: return "chain";
    case ModelType::svetlichny: return "svetlichny";
    case ModelType::mermin: return "mermin";
    case ModelType::chsh: return "chsh";
    case ModelType::gisin: return "gisin";
    }
    return "?";
}

struct ModelConfig {
    ModelType type = ModelType::chsh;
    std::string lattice;              // honeycomb: path, resolved against the config file
    std::size_t rows = 0, cols = 0;   // honeycomb: brick-wall patch when no path is given
    double eps = 0.0;
    std::size_t n = 0;                // chain, svetlichny, mermin
    double delta = 2.0;               // chain
};

struct AnsatzConfig {
    vqc::AnsatzFamily family = vqc::AnsatzFamily::chain;
    std::size_t layers = 1; // chain
};

struct TrainingConfig {
    bool exact = true;
    std::size_t shots = 1000;
    double learning_rate = 0.1;
    std::size_t max_iters = 200;
    vqc::InitMode init = vqc::InitMode::ones;
    std::optional<double> revert_tolerance; // default: 0 in exact mode, off with shots
    double lr_decay = 0.5;
    bool early_stop = false;
    std::size_t retrain_iters = 0; // hierarchical only
};

struct ReadoutConfig {
    std::vector<double> e0, e1; // per qubit; a single value is broadcast
};

struct MeasurementConfig {
    measure::Method method = measure::Method::parity;
    bool exact = true;
    std::optional<std::size_t> shots;
    std::optional<ReadoutConfig> readout;
    bool mitigate = false;
    std::size_t repetitions = 1;
    bool repetition_error_bars = false;
    std::size_t parity_samples = 0;
    bool ideal_state = false; // measure the ideal GHZ state instead of a trained one
};

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 0;
    std::string output_dir;
    ModelConfig model;
    std::optional<AnsatzConfig> ansatz;
    std::optional<TrainingConfig> training;
    std::optional<MeasurementConfig> measurement;
    std::filesystem::path base_dir; // directory of the config file
    json raw;                       // document after overrides, for the hash
};

namespace detail {

/// Reads an object and rejects any key that was never asked for.
class Reader {
public:
    Reader(const json &j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    [[nodiscard]] bool has(const std::string &key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    template <class T> [[nodiscard]] T get(const std::string &key) {
        if (!has(key)) throw ConfigError(path(key) + " is required");
        return as<T>(key);
    }

    template <class T> [[nodiscard]] T get(const std::string &key, T fallback) {
        return has(key) ? as<T>(key) : fallback;
    }

    [[nodiscard]] const json &sub(const std::string &key) {
        seen_.insert(key);
        return j_.at(key);
    }

    [[nodiscard]] std::string path(const std::string &key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto &[k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError("unknown key " + path(k));
        }
    }

private:
    template <class T> T as(const std::string &key) {
        const auto &v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path(key) + " must be a boolean");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                throw ConfigError(path(key) + " must be a non-negative integer");
            }
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
        }
        try {
            return v.get<T>();
        } catch (const json::exception &e) {
            throw ConfigError(path(key) + ": " + e.what());
        }
    }

    const json &j_;
    std::string where_;
    std::set<std::string> seen_;
};

inline bool parse_mode(const std::string &s, const std::string &where) {
    if (s == "exact") return true;
    if (s == "shots") return false;
    throw ConfigError(where + " must be \"exact\" or \"shots\", got \"" + s + "\"");
}

inline ModelConfig parse_model(const json &j) {
    Reader r(j, "model");
    ModelConfig m;
    const auto type = r.get<std::string>("type");
    if (type == "honeycomb") {
        m.type = ModelType::honeycomb;
        m.eps = r.get<double>("eps");
        if (r.has("lattice")) {
            m.lattice = r.get<std::string>("lattice");
        } else {
            m.rows = r.get<std::size_t>("rows");
            m.cols = r.get<std::size_t>("cols");
        }
    } else if (type == "chain") {
        m.type = ModelType::chain;
        m.n = r.get<std::size_t>("n");
        m.delta = r.get<double>("delta");
        m.eps = r.get<double>("eps");
    } else if (type == "svetlichny" || type == "mermin") {
        m.type = type == "mermin" ? ModelType::mermin : ModelType::svetlichny;
        m.n = r.get<std::size_t>("n");
    } else if (type == "chsh") {
        m.type = ModelType::chsh;
    } else if (type == "gisin") {
        m.type = ModelType::gisin;
    } else {
        throw ConfigError("model.type \"" + type + "\" is not one of honeycomb, chain, svetlichny, "
                          "mermin, chsh, gisin");
    }
    r.finish();
    return m;
}

inline AnsatzConfig parse_ansatz(const json &j) {
    Reader r(j, "ansatz");
    AnsatzConfig a;
    try {
        a.family = vqc::parse_family(r.get<std::string>("family"));
    } catch (const InvalidArgument &e) {
        throw ConfigError(std::string("ansatz.family: ") + e.what());
    }
    if (a.family == vqc::AnsatzFamily::chain) a.layers = r.get<std::size_t>("layers");
    r.finish();
    return a;
}

inline TrainingConfig parse_training(const json &j) {
    Reader r(j, "training");
    TrainingConfig t;
    t.exact = parse_mode(r.get<std::string>("mode", "exact"), r.path("mode"));
    t.shots = r.get<std::size_t>("shots", t.shots);
    t.learning_rate = r.get<double>("learning_rate", t.learning_rate);
    t.max_iters = r.get<std::size_t>("max_iters", t.max_iters);
    const auto init = r.get<std::string>("init", "ones");
    if (init == "ones") t.init = vqc::InitMode::ones;
    else if (init == "uniform") t.init = vqc::InitMode::uniform;
    else throw ConfigError("training.init must be \"ones\" or \"uniform\"");
    if (r.has("revert_tolerance")) t.revert_tolerance = r.get<double>("revert_tolerance");
    t.lr_decay = r.get<double>("lr_decay", t.lr_decay);
    t.early_stop = r.get<bool>("early_stop", false);
    t.retrain_iters = r.get<std::size_t>("retrain_iters", 0);
    r.finish();
    if (!(t.learning_rate > 0.0)) throw ConfigError("training.learning_rate must be > 0");
    if (!(t.lr_decay > 0.0 && t.lr_decay <= 1.0)) throw ConfigError("training.lr_decay must be in (0, 1]");
    if (t.shots == 0) throw ConfigError("training.shots must be >= 1");
    return t;
}

inline std::vector<double> parse_rates(const json &v, const std::string &where) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a number or a non-empty array");
    std::vector<double> out;
    for (const auto &x : v) {
        if (!x.is_number()) throw ConfigError(where + " entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline MeasurementConfig parse_measurement(const json &j) {
    Reader r(j, "measurement");
    MeasurementConfig m;
    const auto method = r.get<std::string>("method", "parity");
    if (method == "parity") m.method = measure::Method::parity;
    else if (method == "mqc") m.method = measure::Method::mqc;
    else throw ConfigError("measurement.method must be \"parity\" or \"mqc\"");
    m.exact = parse_mode(r.get<std::string>("mode", "exact"), r.path("mode"));
    if (r.has("shots")) m.shots = r.get<std::size_t>("shots");
    if (r.has("readout")) {
        Reader rr(r.sub("readout"), "measurement.readout");
        ReadoutConfig rc;
        if (rr.has("symmetric")) {
            rc.e0 = rc.e1 = {rr.get<double>("symmetric")};
        } else {
            rc.e0 = parse_rates(rr.sub("e0"), rr.path("e0"));
            rc.e1 = parse_rates(rr.sub("e1"), rr.path("e1"));
        }
        rr.finish();
        m.readout = rc;
    }
    m.mitigate = r.get<bool>("mitigate", false);
    m.repetitions = r.get<std::size_t>("repetitions", 1);
    const auto bars = r.get<std::string>("error_bars", "binomial");
    if (bars == "binomial") m.repetition_error_bars = false;
    else if (bars == "repetitions") m.repetition_error_bars = true;
    else throw ConfigError("measurement.error_bars must be \"binomial\" or \"repetitions\"");
    m.parity_samples = r.get<std::size_t>("parity_samples", 0);
    const auto state = r.get<std::string>("state", "trained");
    if (state == "ideal") m.ideal_state = true;
    else if (state != "trained") throw ConfigError("measurement.state must be \"trained\" or \"ideal\"");
    r.finish();
    if (m.shots && *m.shots == 0) throw ConfigError("measurement.shots must be >= 1");
    if (m.repetitions == 0) throw ConfigError("measurement.repetitions must be >= 1");
    return m;
}

} // namespace detail

/// Parses a config document. `base_dir` anchors relative lattice paths.
[[nodiscard]] inline ExperimentConfig parse_config(const json &j, std::filesystem::path base_dir = {}) {
    detail::Reader r(j, "config");
    const auto version = r.get<int>("schema_version");
    if (version != config_schema_version) {
        throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(config_schema_version) + ")");
    }
    ExperimentConfig c;
    c.name = r.get<std::string>("name", "run");
    if (!r.has("seed")) throw ConfigError("config.seed is required");
    c.seed = r.get<std::uint64_t>("seed");
    c.output_dir = r.get<std::string>("output_dir", "");
    c.model = detail::parse_model(r.sub("model"));
    if (r.has("ansatz")) c.ansatz = detail::parse_ansatz(r.sub("ansatz"));
    if (r.has("training")) c.training = detail::parse_training(r.sub("training"));
    if (r.has("measurement")) c.measurement = detail::parse_measurement(r.sub("measurement"));
    r.finish();
    c.base_dir = std::move(base_dir);
    c.raw = j;
    if (c.model.type == ModelType::honeycomb && !c.model.lattice.empty()) {
        const auto p = c.base_dir / c.model.lattice;
        if (!std::filesystem::exists(p)) throw ConfigError("lattice file not found: " + p.string());
    }
    return c;
}

[[nodiscard]] inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error &e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

/// Command-line overrides, applied to the document so the hash covers them.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> output_dir;
};

[[nodiscard]] inline ExperimentConfig apply_overrides(const ExperimentConfig &c, const Overrides &o) {
    json j = c.raw;
    if (o.seed) j["seed"] = *o.seed;
    if (o.mode) {
        (void)detail::parse_mode(*o.mode, "--mode");
        if (j.contains("training")) j["training"]["mode"] = *o.mode;
        if (j.contains("measurement")) j["measurement"]["mode"] = *o.mode;
    }
    if (o.output_dir) j["output_dir"] = *o.output_dir;
    return parse_config(j, c.base_dir);
}

/// FNV-1a over the compact dump of the document, as 16 hex digits.
[[nodiscard]] inline std::string config_hash(const ExperimentConfig &c) {
    const auto h = bellvqc::detail::fnv1a(c.raw.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace bellvqc::cli
