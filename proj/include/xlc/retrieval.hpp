#pragma once

#include "xlc/corpus.hpp"
#include "xlc/embedding.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::retrieval {

inline constexpr std::size_t kDefaultK = 5;
inline constexpr double kUnitNormTolerance = 1e-9;

struct IndexEntry {
    std::string incident_id;
    Embedding vector;
    std::uint64_t text_fingerprint = 0;
};

struct Neighbor {
    std::string incident_id;
    double score = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// Dense, immutable set of unit-norm incident embeddings.
class Index {
  public:
    Index() = default;
    /// Throws PreconditionError on mixed dimensions, non-unit vectors or duplicate ids.
    explicit Index(std::vector<IndexEntry> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
    const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
    bool contains(std::string_view incident_id) const;

    /// One entry per row.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& matrix() const noexcept {
        return matrix_;
    }

  private:
    std::vector<IndexEntry> entries_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> matrix_;
};

/// Summary used for prompts and retrieval: clean_summary, else the sanitized raw summary.
std::string incident_summary_text(const Incident& incident);

/// `title + "\n" + summary`. Root causes are never embedded.
std::string embedding_text(const Incident& incident);

/// HashingEmbedder with IDF fitted on the embedding texts of every incident.
HashingEmbedder corpus_embedder(const Corpus& corpus);

struct BuildResult {
    Index index;
    std::vector<std::string> warnings;
};

/// Embeds every incident in id order. Incidents whose text has nothing to
/// embed are skipped with a warning; other embedder failures propagate with
/// the incident id attached.
BuildResult build_index(const Corpus& corpus, const Embedder& embedder);

/// Exact cosine ranking over all non-excluded entries: score descending,
/// ties by incident id ascending. Returns min(k, available) neighbors.
std::vector<Neighbor> top_k(const Index& index, const Embedding& query, std::size_t k,
                            const std::set<std::string>& exclude = {});

std::vector<Neighbor> top_k(const Index& index, const Embedder& embedder, std::string_view query_text,
                            std::size_t k, const std::set<std::string>& exclude = {});

inline constexpr const char* kIndexFile = "index.bin";
inline constexpr const char* kIndexMetaFile = "index.meta.jsonl";
inline constexpr char kIndexMagic[] = "XLCIDX1";

/// index.bin: magic, u32 dimension, u32 count, then count x dimension
/// little-endian float32. index.meta.jsonl: ids and fingerprints, row order.
void save_index(const Index& index, const std::filesystem::path& dir);

/// Vectors are re-normalized in double precision after reading.
Index load_index(const std::filesystem::path& dir);

}  // namespace xlc::retrieval
