#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/grounding/embedding.hpp"

namespace t2s::grounding {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5))
double bm25_idf(double documentCount, double documentFrequency);

/// idf * tf(k1+1) / (tf + k1(1 - b + b*len/avglen))
double bm25_weight(double tf, double length, double averageLength, double idf, const Bm25Params& params = {});

/// Document frequencies and lengths of the corpus a sparse vector refers to.
/// Term ids are positions in the sorted vocabulary.
class CorpusStats {
public:
    CorpusStats() = default;
    static CorpusStats from_documents(const std::vector<std::string>& texts, Bm25Params params = {});
    static CorpusStats from_parts(std::vector<std::string> vocabulary, std::vector<std::uint32_t> documentFrequency,
                                  std::uint64_t documentCount, double averageLength, Bm25Params params);

    std::uint64_t document_count() const { return documentCount_; }
    double average_length() const { return averageLength_; }
    const Bm25Params& params() const { return params_; }
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const std::vector<std::uint32_t>& document_frequency() const { return documentFrequency_; }

    /// -1 when the term is not in the vocabulary.
    std::int64_t term_id(std::string_view term) const;
    double idf(std::uint32_t termId) const;

private:
    std::vector<std::string> vocabulary_;
    std::vector<std::uint32_t> documentFrequency_;
    std::uint64_t documentCount_ = 0;
    double averageLength_ = 0.0;
    Bm25Params params_;
};

/// (term id, weight) pairs sorted by term id, weights strictly positive.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    double dot(const SparseVector& other) const;
};

/// BM25 weights of `text` treated as a document of the corpus. Terms outside
/// the vocabulary are dropped.
Result<SparseVector, GroundingError> sparse_vectorize(std::string_view text, const CorpusStats& stats);

/// Query-side vector: weight 1 for every distinct in-vocabulary token, so the
/// dot product with a document vector is that document's BM25 score.
Result<SparseVector, GroundingError> sparse_query_vector(std::string_view text, const CorpusStats& stats);

}  // namespace t2s::grounding
