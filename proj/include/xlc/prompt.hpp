#pragma once

#include "xlc/corpus.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::prompt {

enum class RcaStrategy { NoDEP, DEP, InC_NoDEP, InC_DEP };

inline constexpr RcaStrategy kAllStrategies[] = {RcaStrategy::NoDEP, RcaStrategy::DEP, RcaStrategy::InC_NoDEP,
                                                 RcaStrategy::InC_DEP};

/// "NoDEP", "DEP", "InC_NoDEP", "InC_DEP".
std::string_view to_string(RcaStrategy s) noexcept;
/// "nodep", "dep", "inc-nodep", "inc-dep".
std::string_view cli_name(RcaStrategy s) noexcept;
/// Accepts either spelling, case-insensitively.
std::optional<RcaStrategy> parse_strategy(std::string_view text) noexcept;

constexpr bool uses_upstream(RcaStrategy s) noexcept { return s == RcaStrategy::DEP || s == RcaStrategy::InC_DEP; }
constexpr bool uses_examples(RcaStrategy s) noexcept {
    return s == RcaStrategy::InC_NoDEP || s == RcaStrategy::InC_DEP;
}

enum class MonitorCase { C1, C2, C3, C4 };

inline constexpr MonitorCase kAllCases[] = {MonitorCase::C1, MonitorCase::C2, MonitorCase::C3, MonitorCase::C4};

std::string_view to_string(MonitorCase c) noexcept;  // "C1".."C4"
std::optional<MonitorCase> parse_case(std::string_view text) noexcept;

constexpr bool uses_service_description(MonitorCase c) noexcept {
    return c == MonitorCase::C2 || c == MonitorCase::C3;
}
constexpr bool uses_components(MonitorCase c) noexcept { return c == MonitorCase::C3 || c == MonitorCase::C4; }

enum class Section {
    TaskDescription,
    HistoricalExamples,
    AnsweringFormat,
    IncidentDetails,
    UpstreamDependencies,
    AdditionalGuidance,
    MonitorMetadata,
    ServiceDescription,
    ComponentDescriptions,
};

std::string_view to_string(Section s) noexcept;

struct RenderedPrompt {
    std::string text;
    std::vector<Section> sections;
    std::uint64_t hash = 0;  ///< prompt_hash(text)
    std::vector<std::string> warnings;

    std::string hash_hex() const;
};

inline constexpr std::size_t kMaxExamples = 5;

struct UpstreamInfo {
    std::string name;
    std::string description;
};

struct Example {
    std::string title;
    std::string summary;
    std::string root_cause;
};

/// Renders a root-cause prompt. Interpolated fields are whitespace-collapsed
/// so that no input can introduce a line of its own.
///
/// `example_pool` is the number of retrievable incidents; an in-context
/// strategy with no examples raises MissingExamples unless the pool is empty.
/// Fewer than five examples add a warning. More than five, or an empty
/// upstream list for a service with upstream edges under a dependency
/// strategy, raise PreconditionError.
RenderedPrompt build_rca_prompt(RcaStrategy strategy, const Incident& incident, const Service& owning_service,
                                std::span<const UpstreamInfo> upstream, std::span<const Example> examples,
                                std::size_t example_pool = kMaxExamples, bool service_has_upstream = false);

/// Monitor classification prompt for `task` under context case `c`.
RenderedPrompt build_monitor_prompt(Task task, MonitorCase c, const Monitor& monitor, const Service& service,
                                    const Ontology& ontology = Ontology());

struct RcaAnswer {
    std::string root_cause;
    bool is_dependency_failure = false;

    bool operator==(const RcaAnswer&) const = default;
};

/// Reads the first well-formed JSON object in `text`, tolerating prose and
/// code fences around it. Throws ParseError.
RcaAnswer parse_rca_response(std::string_view text);

/// The JSON shape the answering format asks for.
std::string render_rca_answer(const RcaAnswer& answer);

struct ClassAnswer {
    std::optional<std::string> predicted;  ///< nullopt is ParseFailure
    std::string rationale;

    bool parse_failure() const noexcept { return !predicted.has_value(); }
    bool operator==(const ClassAnswer&) const = default;
};

/// Last ontology label mentioned in the Q2 answer (whole text when there is
/// no Q2 marker). Matching ignores case, spaces, hyphens, underscores and a
/// trailing plural "s".
ClassAnswer parse_monitor_response(std::string_view text, Task task, const Ontology& ontology = Ontology());

}  // namespace xlc::prompt
