#pragma once

#include "xlc/ontology.hpp"

#include <string_view>
#include <vector>

namespace xlc::vocabulary {

inline constexpr std::string_view kVersion = "xlc-vocab/1";

/// Class-characteristic vocabulary for one ontology label. Keywords are
/// lower-case token sequences as produced by `split_identifiers`.
struct ClassVocabulary {
    std::string_view label;
    std::vector<std::string_view> keywords;
    std::vector<std::string_view> name_fragments;    ///< CamelCase monitor-name pieces
    std::vector<std::string_view> metric_fragments;  ///< camelCase metric names
};

/// Entries for the built-in ontology, in ontology order.
const std::vector<ClassVocabulary>& classes(Task task);

/// Lookup by label (case/hyphen-insensitive); nullptr when not covered.
const ClassVocabulary* find(Task task, std::string_view label);

/// Splits camelCase, PascalCase and snake_case words and then tokenizes:
/// "HostCpuUtilization_p99" -> {"host", "cpu", "utilization", "p99"}.
std::vector<std::string> split_identifiers(std::string_view text);

/// Number of (possibly overlapping) occurrences of each keyword token
/// sequence in `tokens`, summed.
std::size_t keyword_hits(const std::vector<std::string>& tokens, const ClassVocabulary& vocab);

}  // namespace xlc::vocabulary
