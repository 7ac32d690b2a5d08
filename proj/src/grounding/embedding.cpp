#include "t2s/grounding/embedding.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "t2s/common/http_client.hpp"
#include "t2s/common/text.hpp"

namespace t2s::grounding {

std::string_view to_string(GroundingError::Kind kind) {
    switch (kind) {
        case GroundingError::Kind::ProviderUnavailable: return "ProviderUnavailable";
        case GroundingError::Kind::EmptyInput: return "EmptyInput";
        case GroundingError::Kind::InvalidInput: return "InvalidInput";
        case GroundingError::Kind::Io: return "IoError";
        case GroundingError::Kind::Format: return "FormatError";
    }
    return "";
}

double cosine_similarity(const DenseVector& a, const DenseVector& b) {
    const std::size_t n = std::min(a.values.size(), b.values.size());
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

Result<std::vector<DenseVector>, GroundingError> EmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<DenseVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto v = embed(t);
        if (!v) return std::move(v).error();
        out.push_back(std::move(v).value());
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// FNV-1a, 64 bit, starting from a seed-mixed offset basis.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Byte offsets of code point starts, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
    }
    offsets.push_back(s.size());
    return offsets;
}

}  // namespace

HashingEmbeddingProvider::HashingEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension == 0 ? kDefaultDimension : dimension), seed_(seed) {}

std::string HashingEmbeddingProvider::id() const {
    return "hashing-trigram:dim=" + std::to_string(dimension_) + ":seed=" + std::to_string(seed_);
}

Result<DenseVector, GroundingError> HashingEmbeddingProvider::embed(std::string_view input) {
    const std::string normalized = text::collapse_whitespace(text::to_lower(input));
    if (normalized.empty()) return GroundingError{GroundingError::Kind::EmptyInput, "empty text"};

    const std::string padded = " " + normalized + " ";
    const auto offsets = code_point_offsets(padded);
    DenseVector v;
    v.values.assign(dimension_, 0.0);
    const std::size_t codePoints = offsets.size() - 1;
    for (std::size_t i = 0; i + 3 <= codePoints; ++i) {
        const std::string_view gram(padded.data() + offsets[i], offsets[i + 3] - offsets[i]);
        const std::uint64_t h = fnv1a(gram, seed_);
        // The top bit picks the sign so collisions tend to cancel.
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        v.values[h % dimension_] += sign;
    }
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        // Every trigram cancelled out; fall back to a fixed unit vector.
        v.values[fnv1a(padded, seed_) % dimension_] = 1.0;
        return v;
    }
    for (double& x : v.values) x /= norm;
    return v;
}

// ---------------------------------------------------------------------------

RemoteEmbeddingProvider::RemoteEmbeddingProvider(RemoteEmbeddingConfig config) : config_(std::move(config)) {}

std::string RemoteEmbeddingProvider::id() const { return "remote:" + config_.model; }

Result<DenseVector, GroundingError> RemoteEmbeddingProvider::embed(std::string_view text) {
    auto batch = request({std::string(text)});
    if (!batch) return std::move(batch).error();
    return std::move(batch->front());
}

Result<std::vector<DenseVector>, GroundingError> RemoteEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<DenseVector> out;
    out.reserve(texts.size());
    const std::size_t step = std::max<std::size_t>(1, config_.batchSize);
    for (std::size_t i = 0; i < texts.size(); i += step) {
        std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(i),
                                       texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), i + step)));
        auto vectors = request(chunk);
        if (!vectors) return std::move(vectors).error();
        for (auto& v : *vectors) out.push_back(std::move(v));
    }
    return out;
}

Result<std::vector<DenseVector>, GroundingError> RemoteEmbeddingProvider::request(
    const std::vector<std::string>& texts) {
    using Kind = GroundingError::Kind;
    for (const auto& t : texts) {
        if (text::trim(t).empty()) return GroundingError{Kind::EmptyInput, "empty text"};
    }

    http::Request req;
    req.method = http::Method::Post;
    std::string base = config_.baseUrl;
    while (!base.empty() && base.back() == '/') base.pop_back();
    req.url = base + "/embeddings";
    req.timeout = config_.requestTimeout;
    req.contentType = "application/json";
    if (!config_.apiKeyEnvVar.empty()) {
        const char* key = std::getenv(config_.apiKeyEnvVar.c_str());
        if (key == nullptr || *key == '\0') {
            return GroundingError{Kind::ProviderUnavailable,
                                  "environment variable " + config_.apiKeyEnvVar + " is not set"};
        }
        req.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
    req.body = nlohmann::json{{"model", config_.model}, {"input", texts}}.dump();

    auto response = http::send(req);
    if (!response) return GroundingError{Kind::ProviderUnavailable, "embedding request failed: " + response.error().message};
    if (response->status < 200 || response->status >= 300) {
        return GroundingError{Kind::ProviderUnavailable,
                              "embedding endpoint returned HTTP " + std::to_string(response->status) + ": " +
                                  std::string(text::utf8_prefix(response->body, 300))};
    }

    const auto doc = nlohmann::json::parse(response->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() || doc["data"].size() != texts.size()) {
        return GroundingError{Kind::ProviderUnavailable, "malformed embedding response"};
    }
    std::vector<DenseVector> out(texts.size());
    std::size_t position = 0;
    for (const auto& item : doc["data"]) {
        const std::size_t index = item.contains("index") && item["index"].is_number_unsigned()
                                      ? item["index"].get<std::size_t>()
                                      : position;
        ++position;
        if (index >= out.size() || !item.contains("embedding") || !item["embedding"].is_array()) {
            return GroundingError{Kind::ProviderUnavailable, "malformed embedding response"};
        }
        for (const auto& x : item["embedding"]) {
            if (!x.is_number()) return GroundingError{Kind::ProviderUnavailable, "non-numeric embedding value"};
            const double d = x.get<double>();
            if (!std::isfinite(d)) return GroundingError{Kind::ProviderUnavailable, "non-finite embedding value"};
            out[index].values.push_back(d);
        }
    }
    const std::size_t dim = out.front().dimension();
    for (const auto& v : out) {
        if (v.dimension() == 0 || v.dimension() != dim) {
            return GroundingError{Kind::ProviderUnavailable, "inconsistent embedding dimensions"};
        }
    }
    return out;
}

}  // namespace t2s::grounding
