#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellvqc/error.hpp"

namespace bellvqc::cli {

inline constexpr const char *artifact_version = "0.1.0";
inline constexpr const char *manifest_file = "manifest.json";

enum class FileKind { json, jsonl, csv };

[[nodiscard]] inline std::string_view kind_name(FileKind k) {
    switch (k) {
    case FileKind::json: return "json";
    case FileKind::jsonl: return "jsonl";
    case FileKind::csv: return "csv";
    }
    return "?";
}

[[nodiscard]] inline std::string utc_timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ManifestEntry {
    std::string path; // relative to the output directory
    FileKind kind = FileKind::json;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string started_at, finished_at;
    std::vector<ManifestEntry> outputs;

    void add(std::string path, FileKind kind) { outputs.push_back({std::move(path), kind}); }
};

/// Writes manifest.json after checking that every listed output exists.
inline void write_manifest(const std::filesystem::path &dir, RunManifest m) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto &e : m.outputs) {
        const auto p = dir / e.path;
        if (!std::filesystem::exists(p)) throw InvalidArgument("missing output " + p.string());
        files.push_back({{"path", e.path}, {"kind", kind_name(e.kind)},
                         {"bytes", std::filesystem::file_size(p)}});
    }
    if (m.finished_at.empty()) m.finished_at = utc_timestamp();
    nlohmann::json j{{"schema", "bellvqc.manifest"},
                     {"schema_version", 1},
                     {"artifact_version", artifact_version},
                     {"command", m.command},
                     {"config_hash", m.config_hash},
                     {"started_at", m.started_at},
                     {"finished_at", m.finished_at},
                     {"outputs", files}};
    std::ofstream os(dir / manifest_file);
    if (!os) throw InvalidArgument("cannot write manifest in " + dir.string());
    os << j.dump(2) << '\n';
}

/// Re-reads the manifest and parses every output it lists. Returns the
/// problems found; empty means complete.
[[nodiscard]] inline std::vector<std::string> check_manifest(const std::filesystem::path &dir) {
    std::vector<std::string> problems;
    std::ifstream is(dir / manifest_file);
    if (!is) return {"no manifest in " + dir.string()};
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception &e) {
        return {std::string("manifest does not parse: ") + e.what()};
    }
    if (!m.contains("outputs") || !m["outputs"].is_array()) return {"manifest lists no outputs"};
    for (const auto &e : m["outputs"]) {
        const auto rel = e.value("path", "");
        const auto kind = e.value("kind", "");
        const auto p = dir / rel;
        std::ifstream f(p);
        if (rel.empty() || !f) {
            problems.push_back("missing " + rel);
            continue;
        }
        if (kind == "json") {
            if (!nlohmann::json::accept(f)) problems.push_back(rel + " does not parse");
        } else if (kind == "jsonl") {
            std::string line;
            std::size_t lines = 0;
            while (std::getline(f, line)) {
                if (line.empty()) continue;
                ++lines;
                if (!nlohmann::json::accept(line)) {
                    problems.push_back(rel + " line " + std::to_string(lines) + " does not parse");
                    break;
                }
            }
            if (lines == 0) problems.push_back(rel + " is empty");
        } else if (kind == "csv") {
            std::string header, line;
            std::getline(f, header);
            const auto cols = std::count(header.begin(), header.end(), ',');
            if (header.empty()) problems.push_back(rel + " has no header");
            while (std::getline(f, line)) {
                if (std::count(line.begin(), line.end(), ',') != cols) {
                    problems.push_back(rel + " has a ragged row");
                    break;
                }
            }
        } else {
            problems.push_back(rel + " has unknown kind " + kind);
        }
    }
    return problems;
}

} // namespace bellvqc::cli
