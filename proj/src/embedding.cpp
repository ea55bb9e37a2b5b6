#include "xlc/embedding.hpp"

#include "http_json.hpp"
#include "xlc/error.hpp"
#include "xlc/hash.hpp"
#include "xlc/text.hpp"

#include <cmath>
#include <set>

namespace xlc {

std::vector<std::string> HashingEmbedder::features(std::string_view text) {
    const auto tokens = text::tokenize(text);
    std::vector<std::string> out;
    out.reserve(tokens.size() * 2);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out.push_back("u:" + tokens[i]);
        if (i + 1 < tokens.size()) out.push_back("b:" + tokens[i] + " " + tokens[i + 1]);
    }
    return out;
}

std::size_t HashingEmbedder::bucket(std::string_view feature) noexcept {
    return static_cast<std::size_t>(fnv1a64(feature) % kDimension);
}

void HashingEmbedder::fit(std::span<const std::string> documents) {
    std::vector<std::size_t> df(kDimension, 0);
    for (const auto& doc : documents) {
        std::set<std::size_t> seen;
        for (const auto& f : features(doc)) seen.insert(bucket(f));
        for (auto b : seen) ++df[b];
    }
    const double n = static_cast<double>(documents.size());
    idf_.assign(kDimension, 1.0);
    for (std::size_t b = 0; b < kDimension; ++b)
        idf_[b] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[b]))) + 1.0;
}

Embedding HashingEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw PreconditionError("cannot embed empty text");
    Embedding v = Embedding::Zero(kDimension);
    for (const auto& f : features(text)) v[static_cast<Eigen::Index>(bucket(f))] += 1.0;
    if (fitted())
        for (std::size_t b = 0; b < kDimension; ++b) v[static_cast<Eigen::Index>(b)] *= idf_[b];
    const double norm = v.norm();
    if (norm == 0.0) throw PreconditionError("text has no tokens to embed");
    v /= norm;
    return v;
}

RemoteEmbedder::RemoteEmbedder(llm::RemoteConfig config, std::string model, std::size_t dimension)
    : config_(std::move(config)), model_(std::move(model)), dimension_(dimension) {}

Embedding RemoteEmbedder::embed(std::string_view text) const {
    if (text.empty()) throw PreconditionError("cannot embed empty text");
    nlohmann::json body{{"model", model_}, {"input", std::string(text)}};
    const auto response = detail::post_json(config_, body);
    std::vector<double> values;
    try {
        values = response.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(200, std::string("malformed embeddings response: ") + e.what());
    }
    if (values.size() != dimension_)
        throw ProviderError(200, "embedding dimension " + std::to_string(values.size()) + " != configured " +
                                     std::to_string(dimension_));
    Embedding v = Eigen::Map<const Embedding>(values.data(), static_cast<Eigen::Index>(values.size()));
    const double norm = v.norm();
    if (norm == 0.0) throw ProviderError(200, "remote embedder returned a zero vector");
    return v / norm;
}

}  // namespace xlc
