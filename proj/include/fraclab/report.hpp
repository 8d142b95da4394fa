#pragma once

#include <string>

#include <json.hpp>

namespace fraclab {

/// Experiment report with the fixed top-level schema
/// {config, measured, predicted, verdicts, meta}. Serialization is
/// deterministic (sorted keys, shortest round-trip doubles), so identical
/// runs produce byte-identical files apart from meta.wall_time_ms.
struct ExperimentReport {
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json measured = nlohmann::json::object();
    nlohmann::json predicted = nlohmann::json::object();
    nlohmann::json verdicts = nlohmann::json::object();
    nlohmann::json meta = nlohmann::json::object();

    /// every verdict carries its tolerance; "overall" aggregates
    void add_verdict(const std::string& name, bool pass, double tolerance);
    bool overall_pass() const;

    nlohmann::json to_json() const;
    static ExperimentReport from_json(const nlohmann::json& j);

    std::string serialize() const;                 // dump(2) + trailing newline
    void write_file(const std::string& path) const;
};

inline constexpr const char* kToolName = "fraclab";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace fraclab
