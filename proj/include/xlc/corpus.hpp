#pragma once

#include "xlc/ontology.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlc {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ". Returns nullopt on any deviation.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct Incident {
    std::string id;
    std::string title;
    std::string raw_summary;
    std::optional<std::string> clean_summary;
    std::string owning_service_id;
    Timestamp created_at{};
    std::optional<std::string> ground_truth_root_cause;
    std::optional<std::string> clean_root_cause;
    std::optional<bool> is_dependency_failure;

    bool operator==(const Incident&) const = default;
};

struct Component {
    std::string id;
    std::string name;
    std::string description;

    bool operator==(const Component&) const = default;
};

struct Service {
    std::string id;
    std::string name;
    std::string description;
    std::optional<std::string> summarized_description;
    std::vector<Component> components;

    bool operator==(const Service&) const = default;
};

enum class Provenance { shared_subscription, dns_log, shared_resource, declared };

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;

struct DependencyEdge {
    std::string dependent_service_id;
    std::string upstream_service_id;
    Provenance provenance = Provenance::declared;

    bool operator==(const DependencyEdge&) const = default;
};

struct Monitor {
    std::string id;
    std::string monitor_name;
    std::string metric_name;
    std::string service_id;
    std::string alert_title;
    std::string alert_conditions;
    std::optional<std::string> resource_label;
    std::optional<std::string> slo_label;

    const std::optional<std::string>& label(Task task) const noexcept {
        return task == Task::Resource ? resource_label : slo_label;
    }
    bool operator==(const Monitor&) const = default;
};

/// Raw material for a Corpus; `Corpus::build` validates it.
struct CorpusParts {
    std::vector<Service> services;
    std::vector<DependencyEdge> edges;
    std::vector<Incident> incidents;
    std::vector<Monitor> monitors;
    Ontology ontology;
};

/// Validated, immutable collection of incidents, services, dependency edges
/// and monitors. Every list is held sorted by id (edges by dependent, then
/// upstream), so iteration order never depends on input file order.
class Corpus {
  public:
    /// Validates all invariants. Throws SchemaError for structural problems
    /// and ReferenceError for ids that do not resolve.
    static Corpus build(CorpusParts parts);

    const std::vector<Service>& services() const noexcept { return parts_.services; }
    const std::vector<DependencyEdge>& edges() const noexcept { return parts_.edges; }
    const std::vector<Incident>& incidents() const noexcept { return parts_.incidents; }
    const std::vector<Monitor>& monitors() const noexcept { return parts_.monitors; }
    const Ontology& ontology() const noexcept { return parts_.ontology; }

    /// Copy of the underlying parts, for deriving an updated corpus.
    CorpusParts parts() const { return parts_; }

    /// Throw ReferenceError when the id is unknown.
    const Service& service(std::string_view id) const;
    const Incident& incident(std::string_view id) const;
    const Monitor& monitor(std::string_view id) const;

    const Service* find_service(std::string_view id) const noexcept;
    const Incident* find_incident(std::string_view id) const noexcept;

    /// Direct (one-hop) upstreams of `service_id`, sorted by id.
    std::vector<const Service*> upstream_services(std::string_view service_id) const;

    /// Monitors carrying a label for `task`, sorted by id.
    std::vector<const Monitor*> labeled_monitors(Task task) const;

    bool operator==(const Corpus& other) const;

  private:
    explicit Corpus(CorpusParts parts);

    CorpusParts parts_;
    std::unordered_map<std::string, std::size_t> service_index_;
    std::unordered_map<std::string, std::size_t> incident_index_;
    std::unordered_map<std::string, std::size_t> monitor_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> upstream_index_;
};

namespace corpus_files {
inline constexpr const char* incidents = "incidents.jsonl";
inline constexpr const char* services = "services.jsonl";
inline constexpr const char* dependencies = "dependencies.jsonl";
inline constexpr const char* monitors = "monitors.jsonl";
inline constexpr const char* ontology = "ontology.json";
}  // namespace corpus_files

/// Reads the four JSONL files (and optional ontology.json) under `root`.
Corpus load_corpus(const std::filesystem::path& root);

/// Writes the corpus in the same layout; ontology.json only when non-default.
void save_corpus(const Corpus& corpus, const std::filesystem::path& root);

std::vector<const Service*> upstream_services(const Corpus& corpus, std::string_view service_id);
std::vector<const Monitor*> labeled_monitors(const Corpus& corpus, Task task);

}  // namespace xlc
