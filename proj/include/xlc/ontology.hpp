#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlc {

/// Which classification dimension a monitor label belongs to.
enum class Task { Resource, Slo };

std::string_view to_string(Task task) noexcept;
std::optional<Task> parse_task(std::string_view text) noexcept;

/// Monitor class sets: 13 resource classes ("what to monitor") and 9 SLO
/// classes ("which metric"). Label lookup ignores case, spaces, hyphens and
/// underscores.
class Ontology {
  public:
    static constexpr std::size_t kResourceCount = 13;
    static constexpr std::size_t kSloCount = 9;

    /// Built-in class sets, in report row order.
    Ontology();
    /// Throws SchemaError on wrong cardinality or duplicate labels.
    Ontology(std::vector<std::string> resource_classes, std::vector<std::string> slo_classes);

    std::span<const std::string> classes(Task task) const noexcept;
    const std::vector<std::string>& resource_classes() const noexcept { return resource_; }
    const std::vector<std::string>& slo_classes() const noexcept { return slo_; }

    /// Canonical label for `text`, if it names a class of `task`.
    std::optional<std::string> canonical(Task task, std::string_view text) const;
    bool contains(Task task, std::string_view text) const { return canonical(task, text).has_value(); }

    bool is_builtin() const;
    bool operator==(const Ontology&) const = default;

  private:
    std::vector<std::string> resource_;
    std::vector<std::string> slo_;
};

}  // namespace xlc
