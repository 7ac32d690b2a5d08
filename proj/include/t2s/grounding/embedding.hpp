#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/common/result.hpp"

namespace t2s::grounding {

struct DenseVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
};

struct GroundingError {
    enum class Kind { ProviderUnavailable, EmptyInput, InvalidInput, Io, Format };

    Kind kind = Kind::InvalidInput;
    std::string message;
};

std::string_view to_string(GroundingError::Kind kind);

/// Dot product over the shared prefix divided by both norms; 0 when either
/// vector is all zeros.
double cosine_similarity(const DenseVector& a, const DenseVector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    /// Identifies provider+model+dimension; stored in index manifests so a
    /// query is never compared against vectors from a different model.
    virtual std::string id() const = 0;
    virtual Result<DenseVector, GroundingError> embed(std::string_view text) = 0;
    virtual Result<std::vector<DenseVector>, GroundingError> embed_batch(const std::vector<std::string>& texts);
};

/// Seeded feature hashing of character trigrams (over " " + lowercase text +
/// " ") into a fixed number of buckets, L2-normalized. No model, no network.
class HashingEmbeddingProvider final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 256;
    static constexpr std::uint64_t kDefaultSeed = 0x7432735eedULL;

    explicit HashingEmbeddingProvider(std::size_t dimension = kDefaultDimension,
                                      std::uint64_t seed = kDefaultSeed);

    std::string id() const override;
    Result<DenseVector, GroundingError> embed(std::string_view text) override;

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

struct RemoteEmbeddingConfig {
    std::string baseUrl;  // POST {baseUrl}/embeddings
    std::string model;
    std::string apiKeyEnvVar;  // empty: no Authorization header
    std::chrono::milliseconds requestTimeout{std::chrono::seconds(30)};
    std::size_t batchSize = 64;
};

/// OpenAI-compatible embeddings endpoint:
///   request  {"model": M, "input": [texts]}
///   response {"data": [{"index": i, "embedding": [...]}, ...]}
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config);

    std::string id() const override;
    Result<DenseVector, GroundingError> embed(std::string_view text) override;
    Result<std::vector<DenseVector>, GroundingError> embed_batch(const std::vector<std::string>& texts) override;

private:
    Result<std::vector<DenseVector>, GroundingError> request(const std::vector<std::string>& texts);

    RemoteEmbeddingConfig config_;
};

}  // namespace t2s::grounding
