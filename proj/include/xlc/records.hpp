#pragma once

#include "xlc/llm.hpp"
#include "xlc/ontology.hpp"
#include "xlc/prompt.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace xlc {

struct RcaRunRecord {
    std::string incident_id;
    prompt::RcaStrategy strategy = prompt::RcaStrategy::NoDEP;
    std::string prompt_hash;
    std::string predicted_root_cause;
    /// nullopt when the response could not be parsed or the call failed.
    std::optional<bool> predicted_dependency;
    std::vector<std::string> examples_used;
    std::int64_t elapsed_ms = 0;
    llm::ProviderKind provider = llm::ProviderKind::rule_stub;
    /// ParseErrorKind name when the response did not parse.
    std::optional<std::string> parse_error;
    /// Provider failure message; the record carries no prediction.
    std::optional<std::string> error;

    bool parse_failure() const noexcept { return !predicted_dependency.has_value(); }
    bool ok() const noexcept { return !error.has_value(); }
    bool operator==(const RcaRunRecord&) const = default;
};

struct MonitorRunRecord {
    std::string monitor_id;
    Task task = Task::Resource;
    prompt::MonitorCase monitor_case = prompt::MonitorCase::C1;
    std::string prompt_hash;
    prompt::ClassAnswer predicted;
    std::int64_t elapsed_ms = 0;
    llm::ProviderKind provider = llm::ProviderKind::rule_stub;
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
    bool operator==(const MonitorRunRecord&) const = default;
};

nlohmann::ordered_json to_json(const RcaRunRecord& r);
nlohmann::ordered_json to_json(const MonitorRunRecord& r);
/// Throw SchemaError (with `line`) on malformed input.
RcaRunRecord rca_record_from_json(const nlohmann::json& j, const std::string& file = "rca_runs.jsonl",
                                  std::size_t line = 0);
MonitorRunRecord monitor_record_from_json(const nlohmann::json& j, const std::string& file = "monitor_runs.jsonl",
                                          std::size_t line = 0);

inline constexpr const char* kRcaRunsFile = "rca_runs.jsonl";
inline constexpr const char* kMonitorRunsFile = "monitor_runs.jsonl";

/// Missing files read as empty.
std::vector<RcaRunRecord> read_rca_runs(const std::filesystem::path& file);
std::vector<MonitorRunRecord> read_monitor_runs(const std::filesystem::path& file);

/// Atomic rewrite (temporary file, then rename).
void write_rca_runs(const std::filesystem::path& file, const std::vector<RcaRunRecord>& records);
void write_monitor_runs(const std::filesystem::path& file, const std::vector<MonitorRunRecord>& records);

}  // namespace xlc
