#pragma once

#include "xlc/llm.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xlc {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Embedding = Vector<double>;

/// Cosine similarity; 0 when either vector is zero.
template <class DerivedA, class DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
    return a.dot(b) / (na * nb);
}

/// Text to fixed-dimension vector.
class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const noexcept = 0;
    /// Throws PreconditionError for empty text.
    virtual Embedding embed(std::string_view text) const = 0;
};

/// Offline embedder: unigram and bigram features of the metric tokenizer,
/// FNV-1a hashed into 512 buckets, TF x IDF weighted, L2-normalized.
/// Unfitted, every IDF weight is 1.
class HashingEmbedder final : public Embedder {
  public:
    static constexpr std::size_t kDimension = 512;

    std::size_t dimension() const noexcept override { return kDimension; }
    Embedding embed(std::string_view text) const override;

    /// Smoothed IDF per bucket: ln((1 + N) / (1 + df)) + 1.
    void fit(std::span<const std::string> documents);
    bool fitted() const noexcept { return idf_.size() == kDimension; }

    /// Feature strings ("u:tok", "b:tok1 tok2") in text order.
    static std::vector<std::string> features(std::string_view text);
    static std::size_t bucket(std::string_view feature) noexcept;

  private:
    std::vector<double> idf_;
};

/// OpenAI-compatible embeddings endpoint (request `model`, `input`; reads
/// `data[0].embedding`). Shares the retry rules of RemoteHttpProvider.
class RemoteEmbedder final : public Embedder {
  public:
    RemoteEmbedder(llm::RemoteConfig config, std::string model, std::size_t dimension);
    std::size_t dimension() const noexcept override { return dimension_; }
    Embedding embed(std::string_view text) const override;

  private:
    llm::RemoteConfig config_;
    std::string model_;
    std::size_t dimension_;
};

}  // namespace xlc
