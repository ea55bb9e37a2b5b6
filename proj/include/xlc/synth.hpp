#pragma once

#include "xlc/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace xlc::synth {

struct SynthSpec {
    std::uint64_t seed = 7;
    std::size_t n_services = 40;
    std::size_t n_incidents = 200;
    double dependency_failure_fraction = 0.5;
    std::size_t n_monitors = 260;
    double edge_density = 0.1;

    /// Throws SpecError.
    void validate() const;
};

/// Services split three ways: a faulty set whose descriptions open with a
/// "faulty: <Name>." marker, an exposed set with exactly one faulty upstream
/// each, and the rest, which have none. Dependency-failure incidents belong
/// to exposed services and name their faulty upstream in the root cause.
/// Every monitor gets a resource label (class i mod 13); the first
/// round(n * 180 / 260) also get an SLO label (class i mod 9).
Corpus generate_corpus(const SynthSpec& spec);

/// generate_corpus, then save_corpus into `dir`.
Corpus generate(const SynthSpec& spec, const std::filesystem::path& dir);

/// Labeled-monitor count per class of `task`, in built-in ontology order.
std::vector<std::size_t> quota(const SynthSpec& spec, Task task);

std::size_t slo_labeled_count(std::size_t n_monitors) noexcept;

}  // namespace xlc::synth
