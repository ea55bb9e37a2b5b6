#pragma once

#include "xlc/corpus.hpp"
#include "xlc/embedding.hpp"
#include "xlc/metrics.hpp"
#include "xlc/records.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xlc::report {

/// Display labels for the root-cause table, in row order.
inline constexpr const char* kMetricLabels[] = {"BLEU-4 (smoothed)", "METEOR (exact+stem)", "ROUGE-L",
                                                "Semantic (embedding cosine)"};
/// Root-cause table columns; the first is the excluded fine-tuned baseline.
inline constexpr const char* kRcaColumns[] = {"FtGPT", "NoDEP", "DEP", "InC NoDEP", "InC DEP"};
inline constexpr const char* kFtGptNote =
    "FtGPT (fine-tuned baseline) is excluded: this toolkit has no fine-tuning backend.";

struct StrategyResult {
    prompt::RcaStrategy strategy{};
    std::size_t records = 0;
    std::size_t scored = 0;  ///< records with text metrics
    std::size_t parse_failures = 0;
    std::size_t errors = 0;
    std::vector<metrics::AggregateRow> rows;  ///< empty when nothing was scored
    /// The same rows restricted to dependency-failure incidents (SD) and to
    /// the others (NoSD).
    std::vector<metrics::AggregateRow> rows_sd;
    std::vector<metrics::AggregateRow> rows_nosd;
    metrics::BinaryScore dependency;
};

struct CaseResult {
    prompt::MonitorCase monitor_case{};
    metrics::ClassReport report;
};

struct TaskResult {
    Task task{};
    std::vector<CaseResult> cases;  ///< C1..C4 order, present cases only
};

struct Report {
    std::vector<StrategyResult> rca;  ///< canonical strategy order, present strategies only
    std::vector<TaskResult> monitor;  ///< SLO first, then resource
    std::vector<std::string> warnings;
};

/// Scores one strategy's records against the corpus references. Failed calls
/// are left out of the text metrics and count as negative predictions.
/// Throws EvalError naming an incident without a dependency-failure label.
StrategyResult evaluate_rca(std::span<const RcaRunRecord> records, const Corpus& corpus, const Embedder& embedder,
                            std::vector<std::string>* warnings = nullptr);

CaseResult evaluate_monitor(std::span<const MonitorRunRecord> records, const Corpus& corpus, Task task);

/// Groups records by strategy and by (task, case), in canonical order.
Report build_report(std::span<const RcaRunRecord> rca, std::span<const MonitorRunRecord> monitor,
                    const Corpus& corpus, const Embedder& embedder);

nlohmann::ordered_json to_json(const Report& report);

/// Metrics x {FtGPT, NoDEP, DEP, InC NoDEP, InC DEP}; mean ± std, 2 decimals.
std::string render_rca_table(std::span<const StrategyResult> results);

/// Metrics x strategies x {NoSD, SD}.
std::string render_rca_split_table(std::span<const StrategyResult> results);

/// Classes x {precision, recall, f1-score, accuracy} x {C1..C4}.
std::string render_class_table(const TaskResult& result, const Ontology& ontology);

std::string render_text(const Report& report, const Ontology& ontology);

}  // namespace xlc::report
