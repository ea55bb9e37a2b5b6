#pragma once

#include "xlc/embedding.hpp"
#include "xlc/records.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::metrics {

using Tokens = std::span<const std::string>;

/// Sentence BLEU-4 on a 0-100 scale. For n >= 2, an n-gram order with no
/// clipped matches uses (0 + 1) / (total + 1). Brevity penalty exp(1 - r/c)
/// when the candidate is shorter than the reference.
double bleu4_smooth(Tokens candidate, Tokens reference);

/// ROUGE-L F1 (beta = 1), 0-100.
double rouge_l(Tokens candidate, Tokens reference);

inline constexpr double kMeteorAlpha = 0.9;
inline constexpr double kMeteorGamma = 0.5;
inline constexpr double kMeteorBeta = 3.0;

/// Aligned (candidate index, reference index) pairs, sorted by candidate index.
using Alignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Exact stage, then Porter-stem stage. Within a stage candidate tokens are
/// visited left to right; each takes the reference position right after the
/// one aligned to its predecessor when that position is free and matches,
/// otherwise the leftmost free matching position.
Alignment meteor_alignment(Tokens candidate, Tokens reference);

/// Number of runs of pairs contiguous in both candidate and reference.
std::size_t chunk_count(const Alignment& alignment);

/// METEOR (exact + stem, no synonyms), 0-100.
double meteor(Tokens candidate, Tokens reference);

/// Text overloads tokenize with text::tokenize. When either side tokenizes
/// to nothing they return 0 and, if `warning` is given, describe why.
double bleu4_smooth(std::string_view candidate, std::string_view reference, std::string* warning = nullptr);
double rouge_l(std::string_view candidate, std::string_view reference, std::string* warning = nullptr);
double meteor(std::string_view candidate, std::string_view reference, std::string* warning = nullptr);

/// max(0, cosine) * 100.
double semantic_cosine(const Embedding& candidate, const Embedding& reference);
double semantic_cosine(std::string_view candidate, std::string_view reference, const Embedder& embedder);

struct TextScore {
    double bleu4 = 0.0;
    double rouge_l_f = 0.0;
    double meteor = 0.0;
    double semantic_cosine = 0.0;
};

TextScore score_text(std::string_view candidate, std::string_view reference, const Embedder& embedder,
                     std::vector<std::string>* warnings = nullptr);

struct AggregateRow {
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
};

/// Rows BLEU, METEOR, ROUGE, Semantic; population standard deviation.
/// Throws EvalError on an empty list.
std::vector<AggregateRow> aggregate(std::span<const TextScore> scores);

struct BinaryScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Precision, recall and F1 with 0 for any zero denominator.
BinaryScore binary_score(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn = 0);

/// Dependency failure is the positive class; parse failures and failed calls
/// count as negative predictions. Throws EvalError naming the first incident
/// without a truth label.
BinaryScore dependency_f1(std::span<const RcaRunRecord> records, const std::map<std::string, bool>& truth);

struct PrfTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double class_accuracy = 0.0;  ///< per-class recall
    std::size_t support = 0;      ///< truth instances
    std::size_t predicted = 0;    ///< parsed predictions of this class
};

struct ClassReport {
    /// One row per class, in the order given to class_report.
    std::vector<std::pair<std::string, ClassMetrics>> per_class;
    double overall_accuracy = 0.0;
    PrfTriple macro;
    PrfTriple micro;
    PrfTriple weighted;
    std::size_t parse_failures = 0;
    std::size_t total = 0;

    const ClassMetrics& at(std::string_view label) const;
};

/// Single-label report over `classes`. A parse failure (or failed call) is
/// wrong for its truth class and enters no predicted-class tally; it still
/// counts in the micro precision denominator, so micro P = micro R =
/// accuracy. Macro averages classes with at least one truth instance;
/// weighted uses truth support. Throws EvalError for a record without truth
/// or a truth label outside `classes`.
ClassReport class_report(std::span<const MonitorRunRecord> records, const std::map<std::string, std::string>& truth,
                         std::span<const std::string> classes);

}  // namespace xlc::metrics
