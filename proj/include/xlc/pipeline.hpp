#pragma once

#include "xlc/corpus.hpp"
#include "xlc/embedding.hpp"
#include "xlc/llm.hpp"
#include "xlc/prompt.hpp"
#include "xlc/records.hpp"
#include "xlc/retrieval.hpp"
#include "xlc/sanitize.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::pipeline {

struct RcaOptions {
    std::size_t k = retrieval::kDefaultK;
    std::string model = "gpt-4";
    std::size_t max_output_tokens = 1024;
    sanitize::CleanOptions clean;
};

/// Read-only inputs shared by every RCA run. `index` and `embedder` are
/// needed only by in-context strategies.
struct RcaContext {
    const Corpus& corpus;
    const retrieval::Index* index = nullptr;
    const Embedder* embedder = nullptr;
    RcaOptions options;
};

struct PreparedRca {
    prompt::RenderedPrompt prompt;
    std::vector<std::string> examples_used;
};

/// Retrieval (leave-one-out, incidents with a root cause only), upstream
/// lookup and prompt rendering. Throws ReferenceError for an unknown incident.
PreparedRca prepare_rca(const RcaContext& ctx, std::string_view incident_id, prompt::RcaStrategy strategy);

/// Fills prediction fields from a raw response; parse errors become ParseFailure.
void apply_rca_response(RcaRunRecord& record, std::string_view response);

/// Provider failures are recorded in `error`.
RcaRunRecord run_rca(const RcaContext& ctx, llm::Provider& provider, std::string_view incident_id,
                     prompt::RcaStrategy strategy);

/// Records in `eval_ids` order. Per-record failures land in the record's
/// `error`; BatchError when every record of a non-empty batch failed.
std::vector<RcaRunRecord> run_rca_batch(const RcaContext& ctx, const llm::Gateway& gateway,
                                        prompt::RcaStrategy strategy, std::span<const std::string> eval_ids);

struct MonitorOptions {
    std::string model = "gpt-4";
    std::size_t max_output_tokens = 1024;
};

/// One record per labeled monitor of `task`, by monitor id. `only`, when
/// non-null, restricts the run to those monitor ids. Throws
/// PreconditionError when the task has no labeled monitors.
std::vector<MonitorRunRecord> run_monitor_batch(const Corpus& corpus, const llm::Gateway& gateway, Task task,
                                                prompt::MonitorCase c, const MonitorOptions& options = {},
                                                const std::vector<std::string>* only = nullptr);

/// Replaces the records of `strategy` in `existing` by `fresh` (ids in
/// `eval_ids` order, any `fresh` record winning over an existing one) and
/// orders the result by canonical strategy order.
std::vector<RcaRunRecord> merge_rca_runs(const std::vector<RcaRunRecord>& existing,
                                         const std::vector<RcaRunRecord>& fresh, prompt::RcaStrategy strategy,
                                         std::span<const std::string> eval_ids);

/// Same for one (task, case) block, ordered by task, case, then monitor id.
std::vector<MonitorRunRecord> merge_monitor_runs(const std::vector<MonitorRunRecord>& existing,
                                                 const std::vector<MonitorRunRecord>& fresh, Task task,
                                                 prompt::MonitorCase c);

// ---------------------------------------------------------------------------
// Summarization with a content-hash cache

/// `summary_cache.jsonl` next to the corpus: {"key", "summary"} rows, where
/// the key hashes the field kind and the raw text.
class SummaryCache {
  public:
    static constexpr const char* kFile = "summary_cache.jsonl";

    static SummaryCache load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    const std::string* find(const std::string& key) const;
    void put(std::string key, std::string summary);
    std::size_t size() const noexcept { return entries_.size(); }

    static std::string key(std::string_view kind, std::string_view raw_text);

  private:
    std::map<std::string, std::string> entries_;
};

struct SummarizeStats {
    std::size_t generated = 0;
    std::size_t cached = 0;
};

/// Fills clean_summary, clean_root_cause and summarized_description, reusing
/// cached summaries for unchanged raw text.
Corpus summarize_corpus(const Corpus& corpus, llm::Provider& provider, SummaryCache& cache,
                        const llm::SummarizeOptions& options = {}, const sanitize::CleanOptions& clean = {},
                        SummarizeStats* stats = nullptr);

}  // namespace xlc::pipeline
