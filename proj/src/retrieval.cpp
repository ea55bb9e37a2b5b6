#include "xlc/retrieval.hpp"

#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/sanitize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace xlc::retrieval {

Index::Index(std::vector<IndexEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) return;
    const auto dim = entries_.front().vector.size();
    std::set<std::string> ids;
    matrix_.resize(static_cast<Eigen::Index>(entries_.size()), dim);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.vector.size() != dim) throw PreconditionError("index entry '" + e.incident_id + "' has wrong dimension");
        if (std::abs(e.vector.norm() - 1.0) > kUnitNormTolerance)
            throw PreconditionError("index entry '" + e.incident_id + "' is not unit-norm");
        if (!ids.insert(e.incident_id).second) throw PreconditionError("duplicate index entry '" + e.incident_id + "'");
        matrix_.row(static_cast<Eigen::Index>(i)) = e.vector.transpose();
    }
}

bool Index::contains(std::string_view incident_id) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const IndexEntry& e) { return e.incident_id == incident_id; });
}

std::string incident_summary_text(const Incident& incident) {
    if (incident.clean_summary) return *incident.clean_summary;
    return sanitize::clean_text(incident.raw_summary).text;
}

std::string embedding_text(const Incident& incident) { return incident.title + "\n" + incident_summary_text(incident); }

HashingEmbedder corpus_embedder(const Corpus& corpus) {
    std::vector<std::string> docs;
    docs.reserve(corpus.incidents().size());
    for (const auto& inc : corpus.incidents()) docs.push_back(embedding_text(inc));
    HashingEmbedder embedder;
    embedder.fit(docs);
    return embedder;
}

BuildResult build_index(const Corpus& corpus, const Embedder& embedder) {
    BuildResult result;
    std::vector<IndexEntry> entries;
    entries.reserve(corpus.incidents().size());
    for (const auto& inc : corpus.incidents()) {
        const auto textv = embedding_text(inc);
        try {
            entries.push_back({inc.id, embedder.embed(textv), fnv1a64(textv)});
        } catch (const PreconditionError& e) {
            result.warnings.push_back("incident " + inc.id + " excluded from index: " + e.what());
        } catch (const std::exception& e) {
            throw Error("embedding incident " + inc.id + " failed: " + e.what());
        }
    }
    result.index = Index(std::move(entries));
    return result;
}

std::vector<Neighbor> top_k(const Index& index, const Embedding& query, std::size_t k,
                            const std::set<std::string>& exclude) {
    if (k == 0) throw PreconditionError("top_k needs k >= 1");
    if (index.empty()) return {};
    if (static_cast<std::size_t>(query.size()) != index.dimension())
        throw PreconditionError("query dimension does not match index");
    const double qnorm = query.norm();
    const Eigen::VectorXd scores = qnorm == 0.0 ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()))
                                                : Eigen::VectorXd(index.matrix() * (query / qnorm));

    const auto& entries = index.entries();
    std::vector<std::size_t> candidates;
    candidates.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (!exclude.count(entries[i].incident_id)) candidates.push_back(i);

    const auto better = [&](std::size_t a, std::size_t b) {
        const double sa = scores[static_cast<Eigen::Index>(a)];
        const double sb = scores[static_cast<Eigen::Index>(b)];
        if (sa != sb) return sa > sb;
        return entries[a].incident_id < entries[b].incident_id;
    };
    const std::size_t n = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n), candidates.end(), better);

    std::vector<Neighbor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::clamp(scores[static_cast<Eigen::Index>(candidates[i])], -1.0, 1.0);
        out.push_back({entries[candidates[i]].incident_id, s});
    }
    return out;
}

std::vector<Neighbor> top_k(const Index& index, const Embedder& embedder, std::string_view query_text,
                            std::size_t k, const std::set<std::string>& exclude) {
    return top_k(index, embedder.embed(query_text), k, exclude);
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                    static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& file) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw SchemaError(file, 0, "truncated index header");
    return static_cast<std::uint32_t>(bytes[0]) | static_cast<std::uint32_t>(bytes[1]) << 8 |
           static_cast<std::uint32_t>(bytes[2]) << 16 | static_cast<std::uint32_t>(bytes[3]) << 24;
}

}  // namespace

void save_index(const Index& index, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream bin(dir / kIndexFile, std::ios::binary | std::ios::trunc);
    if (!bin) throw Error("cannot write " + (dir / kIndexFile).string());
    bin.write(kIndexMagic, sizeof kIndexMagic - 1);
    put_u32(bin, static_cast<std::uint32_t>(index.dimension()));
    put_u32(bin, static_cast<std::uint32_t>(index.size()));
    for (const auto& e : index.entries())
        for (Eigen::Index d = 0; d < e.vector.size(); ++d)
            put_u32(bin, std::bit_cast<std::uint32_t>(static_cast<float>(e.vector[d])));

    std::ofstream meta(dir / kIndexMetaFile, std::ios::binary | std::ios::trunc);
    for (const auto& e : index.entries()) {
        nlohmann::ordered_json row{{"incident_id", e.incident_id}, {"text_fingerprint", to_hex(e.text_fingerprint)}};
        meta << row.dump() << '\n';
    }
}

Index load_index(const std::filesystem::path& dir) {
    const auto bin_path = dir / kIndexFile;
    const auto meta_path = dir / kIndexMetaFile;
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw MissingFile(bin_path.string());
    std::ifstream meta(meta_path, std::ios::binary);
    if (!meta) throw MissingFile(meta_path.string());

    char magic[sizeof kIndexMagic - 1];
    if (!bin.read(magic, sizeof magic) || std::memcmp(magic, kIndexMagic, sizeof magic) != 0)
        throw SchemaError(kIndexFile, 0, "bad magic (expected XLCIDX1)");
    const auto dim = get_u32(bin, kIndexFile);
    const auto count = get_u32(bin, kIndexFile);

    std::vector<IndexEntry> entries(count);
    for (auto& e : entries) {
        e.vector.resize(dim);
        for (std::uint32_t d = 0; d < dim; ++d) e.vector[d] = std::bit_cast<float>(get_u32(bin, kIndexFile));
        const double norm = e.vector.norm();
        if (norm == 0.0) throw SchemaError(kIndexFile, 0, "zero vector in index");
        e.vector /= norm;
    }
    std::string line;
    std::size_t row = 0;
    while (std::getline(meta, line)) {
        if (line.empty()) continue;
        if (row >= count) throw SchemaError(kIndexMetaFile, row + 1, "more metadata rows than index entries");
        try {
            const auto j = nlohmann::json::parse(line);
            entries[row].incident_id = j.at("incident_id").get<std::string>();
            entries[row].text_fingerprint = std::stoull(j.at("text_fingerprint").get<std::string>(), nullptr, 16);
        } catch (const std::exception& e) {
            throw SchemaError(kIndexMetaFile, row + 1, e.what());
        }
        ++row;
    }
    if (row != count) throw SchemaError(kIndexMetaFile, row, "fewer metadata rows than index entries");
    return Index(std::move(entries));
}

}  // namespace xlc::retrieval
