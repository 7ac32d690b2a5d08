#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/grounding/bm25.hpp"
#include "t2s/grounding/embedding.hpp"
#include "t2s/grounding/match.hpp"
#include "t2s/grounding/rrf.hpp"
#include "t2s/kg/schema.hpp"

namespace t2s::grounding {

inline constexpr int kSchemaIndexFormatVersion = 1;

enum class KindFilter { Class, Property, ObjectProperty, DatatypeProperty };

bool matches(KindFilter filter, kg::SchemaKind kind);

struct HybridSearchOptions {
    std::size_t candidateDepth = 50;  // per arm
    double rrfK = kDefaultRrfK;
};

struct HybridSearchResult {
    std::vector<ScoredMatch> matches;
    /// True when the dense arm was skipped; `degradedReason` says why.
    bool degraded = false;
    std::string degradedReason;
};

/// Schema entities with one dense and one BM25 sparse vector each, kept in
/// IRI order. Immutable once built or loaded.
class SchemaIndex {
public:
    /// Rejects an empty document list. A repeated IRI keeps its last
    /// document. Fails without side effects if the provider does.
    static Result<SchemaIndex, GroundingError> build(std::vector<kg::SchemaDocument> docs, EmbeddingProvider& provider);

    /// Writes the index directory through a staging directory and a rename,
    /// replacing any previous index at `dir`.
    Result<Unit, GroundingError> save(const std::filesystem::path& dir) const;
    static Result<SchemaIndex, GroundingError> load(const std::filesystem::path& dir);

    std::size_t size() const { return docs_.size(); }
    const std::vector<kg::SchemaDocument>& documents() const { return docs_; }
    const kg::SchemaDocument* find(const kg::Iri& iri) const;
    const std::string& provider_id() const { return providerId_; }
    std::size_t dimension() const { return dimension_; }
    const CorpusStats& corpus_stats() const { return stats_; }

    /// Dense ranking by cosine similarity and sparse ranking by BM25, each
    /// restricted to `filter` and cut to candidateDepth, fused with RRF.
    /// `provider` may be null; the dense arm then degrades to sparse-only, as
    /// it does on provider failure or a provider id different from the one
    /// the index was built with.
    HybridSearchResult hybrid_search(std::string_view query, EmbeddingProvider* provider,
                                     std::optional<KindFilter> filter, std::size_t limit,
                                     const HybridSearchOptions& options = {}) const;

private:
    std::vector<kg::SchemaDocument> docs_;
    std::vector<DenseVector> dense_;
    std::vector<SparseVector> sparse_;
    CorpusStats stats_;
    std::string providerId_;
    std::size_t dimension_ = 0;
};

}  // namespace t2s::grounding
