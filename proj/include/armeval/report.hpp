#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace armeval {

/// What is needed to reproduce an output: the canonical config and the
/// replay-cache state it ran against.
struct Manifest {
    std::string run_id;
    std::string config_digest;
    std::string cache_digest = "none";
    nlohmann::json config = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
    /// One-line reference embedded in text and CSV outputs.
    [[nodiscard]] std::string reference() const;
};

/// A named, row-oriented table in a report.
struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Named scalar metrics plus provenance. Metrics keep insertion order so
/// every rendering is stable.
struct MetricReport {
    std::string command;
    Manifest manifest;
    std::vector<std::pair<std::string, nlohmann::json>> metrics;
    std::vector<ReportTable> tables;
    std::vector<std::string> notes;

    void set(const std::string& key, nlohmann::json value);
    [[nodiscard]] const nlohmann::json* find(const std::string& key) const;

    /// Flat key -> value object plus "manifest", "tables" and "notes".
    [[nodiscard]] nlohmann::json to_json() const;
    /// Aligned-column text: metrics, then each table.
    [[nodiscard]] std::string to_text() const;
    /// One CSV block per table, preceded by a metric/value block.
    [[nodiscard]] std::string to_csv() const;
};

/// Fixed-precision decimal, identical on every platform.
std::string format_fixed(double v, int digits);

/// Writes `<stem>.json`, `<stem>.txt` and `<stem>.csv` under `dir`.
void write_report(const MetricReport& report, const std::filesystem::path& dir, const std::string& stem);

/// Atomically writes `content` (temp file + rename).
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace armeval
