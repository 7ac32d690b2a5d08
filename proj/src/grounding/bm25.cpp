#include "t2s/grounding/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "t2s/common/text.hpp"

namespace t2s::grounding {

double bm25_idf(double documentCount, double documentFrequency) {
    return std::log(1.0 + (documentCount - documentFrequency + 0.5) / (documentFrequency + 0.5));
}

double bm25_weight(double tf, double length, double averageLength, double idf, const Bm25Params& params) {
    const double norm = averageLength > 0.0 ? length / averageLength : 1.0;
    return idf * (tf * (params.k1 + 1.0)) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

CorpusStats CorpusStats::from_documents(const std::vector<std::string>& texts, Bm25Params params) {
    std::map<std::string, std::uint32_t> df;
    std::uint64_t totalLength = 0;
    for (const auto& t : texts) {
        const auto tokens = text::tokenize(t);
        totalLength += tokens.size();
        for (const auto& term : std::set<std::string>(tokens.begin(), tokens.end())) ++df[term];
    }
    CorpusStats stats;
    stats.params_ = params;
    stats.documentCount_ = texts.size();
    stats.averageLength_ = texts.empty() ? 0.0 : static_cast<double>(totalLength) / static_cast<double>(texts.size());
    for (auto& [term, count] : df) {
        stats.vocabulary_.push_back(term);
        stats.documentFrequency_.push_back(count);
    }
    return stats;
}

CorpusStats CorpusStats::from_parts(std::vector<std::string> vocabulary, std::vector<std::uint32_t> documentFrequency,
                                    std::uint64_t documentCount, double averageLength, Bm25Params params) {
    CorpusStats stats;
    stats.vocabulary_ = std::move(vocabulary);
    stats.documentFrequency_ = std::move(documentFrequency);
    stats.documentCount_ = documentCount;
    stats.averageLength_ = averageLength;
    stats.params_ = params;
    return stats;
}

std::int64_t CorpusStats::term_id(std::string_view term) const {
    const auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), term,
                                     [](const std::string& a, std::string_view b) { return a < b; });
    if (it == vocabulary_.end() || *it != term) return -1;
    return it - vocabulary_.begin();
}

double CorpusStats::idf(std::uint32_t termId) const {
    return bm25_idf(static_cast<double>(documentCount_), static_cast<double>(documentFrequency_.at(termId)));
}

double SparseVector::dot(const SparseVector& other) const {
    double sum = 0.0;
    auto a = entries.begin();
    auto b = other.entries.begin();
    while (a != entries.end() && b != other.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            sum += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return sum;
}

Result<SparseVector, GroundingError> sparse_vectorize(std::string_view input, const CorpusStats& stats) {
    const auto tokens = text::tokenize(input);
    if (tokens.empty()) return GroundingError{GroundingError::Kind::EmptyInput, "no tokens in text"};
    std::map<std::uint32_t, std::uint32_t> tf;
    for (const auto& t : tokens) {
        const auto id = stats.term_id(t);
        if (id >= 0) ++tf[static_cast<std::uint32_t>(id)];
    }
    SparseVector v;
    for (const auto& [id, count] : tf) {
        const double w = bm25_weight(count, static_cast<double>(tokens.size()), stats.average_length(), stats.idf(id),
                                     stats.params());
        if (w > 0.0) v.entries.emplace_back(id, w);
    }
    return v;
}

Result<SparseVector, GroundingError> sparse_query_vector(std::string_view input, const CorpusStats& stats) {
    const auto tokens = text::tokenize(input);
    if (tokens.empty()) return GroundingError{GroundingError::Kind::EmptyInput, "no tokens in query"};
    std::set<std::uint32_t> ids;
    for (const auto& t : tokens) {
        const auto id = stats.term_id(t);
        if (id >= 0) ids.insert(static_cast<std::uint32_t>(id));
    }
    SparseVector v;
    for (auto id : ids) v.entries.emplace_back(id, 1.0);
    return v;
}

}  // namespace t2s::grounding
