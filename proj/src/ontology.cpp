#include "xlc/ontology.hpp"

#include "xlc/error.hpp"
#include "xlc/text.hpp"

#include <set>

namespace xlc {

namespace {

std::vector<std::string> builtin_resource() {
    return {"API",       "Dependency", "Compute cluster", "Service level", "Cache-memory",
            "Ram-memory", "CPU",       "Paging memory",   "Container",     "IO",
            "Storage",   "Certificate", "None-of-the-above"};
}

std::vector<std::string> builtin_slo() {
    return {"Availability", "Capacity",    "Freshness",    "Interruption Rate", "Latency",
            "Others",       "Reliability", "Success Rate", "Throughput"};
}

void validate(const std::vector<std::string>& labels, std::size_t expected, const char* name) {
    if (labels.size() != expected)
        throw SchemaError("ontology.json", 0,
                          std::string(name) + " must have exactly " + std::to_string(expected) +
                              " labels, got " + std::to_string(labels.size()));
    std::set<std::string> seen;
    for (const auto& label : labels) {
        const auto key = text::label_key(label);
        if (key.empty()) throw SchemaError("ontology.json", 0, std::string(name) + " contains an empty label");
        if (!seen.insert(key).second)
            throw SchemaError("ontology.json", 0, std::string(name) + " has duplicate label '" + label + "'");
    }
}

}  // namespace

std::string_view to_string(Task task) noexcept { return task == Task::Resource ? "resource" : "slo"; }

std::optional<Task> parse_task(std::string_view text) noexcept {
    if (text::iequals(text, "resource")) return Task::Resource;
    if (text::iequals(text, "slo")) return Task::Slo;
    return std::nullopt;
}

Ontology::Ontology() : resource_(builtin_resource()), slo_(builtin_slo()) {}

Ontology::Ontology(std::vector<std::string> resource_classes, std::vector<std::string> slo_classes)
    : resource_(std::move(resource_classes)), slo_(std::move(slo_classes)) {
    validate(resource_, kResourceCount, "resource_classes");
    validate(slo_, kSloCount, "slo_classes");
}

std::span<const std::string> Ontology::classes(Task task) const noexcept {
    return task == Task::Resource ? std::span<const std::string>(resource_) : std::span<const std::string>(slo_);
}

std::optional<std::string> Ontology::canonical(Task task, std::string_view text) const {
    const auto key = text::label_key(text);
    for (const auto& label : classes(task))
        if (text::label_key(label) == key) return label;
    return std::nullopt;
}

bool Ontology::is_builtin() const { return resource_ == builtin_resource() && slo_ == builtin_slo(); }

}  // namespace xlc
