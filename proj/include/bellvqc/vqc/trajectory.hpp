#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellvqc/vqc/train.hpp"

namespace bellvqc::vqc {

inline constexpr int trajectory_schema_version = 1;

[[nodiscard]] inline nlohmann::json to_json(const TrainRecord &r) {
    return {{"iteration", r.iteration},   {"phase", r.phase},
            {"energy", r.energy},         {"energy_std", r.energy_std},
            {"shots_used", r.shots_used}, {"grad_norm", r.grad_norm},
            {"accepted", r.accepted},     {"learning_rate", r.learning_rate},
            {"params", r.params_snapshot}};
}

[[nodiscard]] inline TrainRecord record_from_json(const nlohmann::json &j) {
    TrainRecord r;
    r.iteration = j.at("iteration").get<std::size_t>();
    r.phase = j.at("phase").get<std::size_t>();
    r.energy = j.at("energy").get<double>();
    r.energy_std = j.at("energy_std").get<double>();
    r.shots_used = j.at("shots_used").get<std::size_t>();
    r.grad_norm = j.at("grad_norm").get<double>();
    r.accepted = j.at("accepted").get<bool>();
    r.learning_rate = j.at("learning_rate").get<double>();
    r.params_snapshot = j.at("params").get<std::vector<double>>();
    return r;
}

/// JSON Lines: one header object, then one record per line.
inline void write_trajectory(const std::string &path, const std::vector<TrainRecord> &records,
                             const nlohmann::json &meta = nlohmann::json::object()) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write trajectory to " + path);
    nlohmann::json header{{"schema", "bellvqc.trajectory"},
                          {"schema_version", trajectory_schema_version},
                          {"records", records.size()},
                          {"meta", meta}};
    os << header.dump() << '\n';
    for (const auto &r : records) os << to_json(r).dump() << '\n';
}

struct Trajectory {
    nlohmann::json header;
    std::vector<TrainRecord> records;
};

[[nodiscard]] inline Trajectory read_trajectory(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open trajectory " + path);
    Trajectory t;
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("empty trajectory file " + path);
    t.header = nlohmann::json::parse(line);
    if (t.header.value("schema", "") != "bellvqc.trajectory" ||
        t.header.value("schema_version", 0) != trajectory_schema_version) {
        throw InvalidArgument("unsupported trajectory header in " + path);
    }
    while (std::getline(is, line)) {
        if (!line.empty()) t.records.push_back(record_from_json(nlohmann::json::parse(line)));
    }
    return t;
}

} // namespace bellvqc::vqc
