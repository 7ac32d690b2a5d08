#include "t2s/grounding/schema_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "t2s/common/binary_io.hpp"
#include "t2s/common/text.hpp"

namespace t2s::grounding {

namespace fs = std::filesystem;
using kg::SchemaDocument;
using kg::SchemaKind;

bool matches(KindFilter filter, SchemaKind kind) {
    switch (filter) {
        case KindFilter::Class: return kind == SchemaKind::Class;
        case KindFilter::Property: return kg::is_property(kind);
        case KindFilter::ObjectProperty: return kind == SchemaKind::ObjectProperty;
        case KindFilter::DatatypeProperty: return kind == SchemaKind::DatatypeProperty;
    }
    return false;
}

Result<SchemaIndex, GroundingError> SchemaIndex::build(std::vector<SchemaDocument> docs, EmbeddingProvider& provider) {
    if (docs.empty()) return GroundingError{GroundingError::Kind::InvalidInput, "no schema documents to index"};

    // Keyed by IRI, last document wins.
    std::map<std::string, SchemaDocument> byIri;
    for (auto& d : docs) byIri.insert_or_assign(d.iri.str(), std::move(d));

    SchemaIndex index;
    std::vector<std::string> texts;
    for (auto& [iri, d] : byIri) {
        texts.push_back(d.text);
        index.docs_.push_back(std::move(d));
    }

    auto vectors = provider.embed_batch(texts);
    if (!vectors) return std::move(vectors).error();
    index.dense_ = std::move(vectors).value();
    index.dimension_ = index.dense_.front().dimension();
    for (const auto& v : index.dense_) {
        if (v.dimension() != index.dimension_) {
            return GroundingError{GroundingError::Kind::ProviderUnavailable, "provider returned mixed dimensions"};
        }
    }
    index.providerId_ = provider.id();

    index.stats_ = CorpusStats::from_documents(texts);
    for (const auto& t : texts) {
        auto sv = sparse_vectorize(t, index.stats_);
        // A document without tokens has no lexical presence.
        index.sparse_.push_back(sv ? std::move(sv).value() : SparseVector{});
    }
    return index;
}

const SchemaDocument* SchemaIndex::find(const kg::Iri& iri) const {
    const auto it = std::lower_bound(docs_.begin(), docs_.end(), iri,
                                     [](const SchemaDocument& d, const kg::Iri& key) { return d.iri < key; });
    if (it == docs_.end() || it->iri != iri) return nullptr;
    return &*it;
}

namespace {

struct Candidate {
    std::size_t doc;
    double score;
};

// Top `depth` by score, ties by position (= IRI order).
std::vector<std::size_t> top_candidates(std::vector<Candidate> all, std::size_t depth) {
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    if (all.size() > depth) all.resize(depth);
    std::vector<std::size_t> out;
    out.reserve(all.size());
    for (const auto& c : all) out.push_back(c.doc);
    return out;
}

}  // namespace

HybridSearchResult SchemaIndex::hybrid_search(std::string_view query, EmbeddingProvider* provider,
                                              std::optional<KindFilter> filter, std::size_t limit,
                                              const HybridSearchOptions& options) const {
    HybridSearchResult result;
    if (limit == 0 || text::trim(query).empty()) return result;

    auto admitted = [&](std::size_t i) { return !filter || matches(*filter, docs_[i].kind); };

    std::vector<std::size_t> denseRanking;
    if (provider == nullptr) {
        result.degraded = true;
        result.degradedReason = "no embedding provider configured";
    } else if (provider->id() != providerId_) {
        result.degraded = true;
        result.degradedReason = "embedding provider '" + provider->id() + "' does not match index provider '" +
                                providerId_ + "'";
    } else {
        auto qv = provider->embed(query);
        if (!qv) {
            result.degraded = true;
            result.degradedReason = qv.error().message;
        } else {
            std::vector<Candidate> all;
            for (std::size_t i = 0; i < docs_.size(); ++i) {
                if (admitted(i)) all.push_back({i, cosine_similarity(*qv, dense_[i])});
            }
            denseRanking = top_candidates(std::move(all), options.candidateDepth);
        }
    }

    std::vector<std::size_t> sparseRanking;
    if (auto qs = sparse_query_vector(query, stats_); qs && !qs->entries.empty()) {
        std::vector<Candidate> all;
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            if (!admitted(i)) continue;
            const double s = qs->dot(sparse_[i]);
            if (s > 0.0) all.push_back({i, s});
        }
        sparseRanking = top_candidates(std::move(all), options.candidateDepth);
    }

    std::vector<std::vector<std::string>> rankings(2);
    for (auto i : denseRanking) rankings[0].push_back(docs_[i].iri.str());
    for (auto i : sparseRanking) rankings[1].push_back(docs_[i].iri.str());
    std::map<std::size_t, std::size_t> denseRankOf;
    std::map<std::size_t, std::size_t> sparseRankOf;
    for (std::size_t r = 0; r < denseRanking.size(); ++r) denseRankOf[denseRanking[r]] = r + 1;
    for (std::size_t r = 0; r < sparseRanking.size(); ++r) sparseRankOf[sparseRanking[r]] = r + 1;

    for (const auto& item : rrf_fuse(rankings, options.rrfK)) {
        if (result.matches.size() == limit) break;
        const auto* doc = find(kg::Iri(item.id));
        const auto i = static_cast<std::size_t>(doc - docs_.data());
        ScoredMatch m{doc->iri, doc->label, std::string(kg::to_string(doc->kind)), item.score, {}, {}, doc->domain,
                      doc->range, doc->comment};
        if (auto it = denseRankOf.find(i); it != denseRankOf.end()) m.denseRank = it->second;
        if (auto it = sparseRankOf.find(i); it != sparseRankOf.end()) m.sparseRank = it->second;
        result.matches.push_back(std::move(m));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::uint32_t kDocsMagic = 0x54325344;    // "T2SD"
constexpr std::uint32_t kDenseMagic = 0x54325356;   // "T2SV"
constexpr std::uint32_t kSparseMagic = 0x54325342;  // "T2SB"

void write_optional(io::BinaryWriter& w, const std::optional<std::string>& s) {
    w.write<std::uint8_t>(s ? 1 : 0);
    if (s) w.write_string(*s);
}

std::optional<std::string> read_optional(io::BinaryReader& r) {
    if (r.read<std::uint8_t>() == 0) return std::nullopt;
    return r.read_string();
}

std::optional<std::string> iri_text(const std::optional<kg::Iri>& iri) {
    return iri ? std::optional<std::string>(iri->str()) : std::nullopt;
}

}  // namespace

Result<Unit, GroundingError> SchemaIndex::save(const fs::path& dir) const {
    try {
        io::StagingDirectory staging(dir);
        const auto& root = staging.path();

        io::BinaryWriter docs(root / "documents.bin");
        docs.write(kDocsMagic);
        docs.write<std::uint64_t>(docs_.size());
        for (const auto& d : docs_) {
            docs.write_string(d.iri.str());
            docs.write<std::uint8_t>(static_cast<std::uint8_t>(d.kind));
            docs.write_string(d.label);
            write_optional(docs, d.comment);
            write_optional(docs, iri_text(d.domain));
            write_optional(docs, iri_text(d.range));
        }
        docs.close();

        io::BinaryWriter dense(root / "dense.bin");
        dense.write(kDenseMagic);
        dense.write<std::uint64_t>(dense_.size());
        dense.write<std::uint64_t>(dimension_);
        for (const auto& v : dense_) {
            for (double x : v.values) dense.write(x);
        }
        dense.close();

        io::BinaryWriter sparse(root / "sparse.bin");
        sparse.write(kSparseMagic);
        sparse.write(stats_.params().k1);
        sparse.write(stats_.params().b);
        sparse.write<std::uint64_t>(stats_.document_count());
        sparse.write(stats_.average_length());
        sparse.write<std::uint64_t>(stats_.vocabulary().size());
        for (std::size_t i = 0; i < stats_.vocabulary().size(); ++i) {
            sparse.write_string(stats_.vocabulary()[i]);
            sparse.write(stats_.document_frequency()[i]);
        }
        for (const auto& v : sparse_) {
            sparse.write<std::uint32_t>(static_cast<std::uint32_t>(v.entries.size()));
            for (const auto& [id, w] : v.entries) {
                sparse.write(id);
                sparse.write(w);
            }
        }
        sparse.close();

        nlohmann::json manifest = {
            {"format", "t2s-schema-index"},
            {"formatVersion", kSchemaIndexFormatVersion},
            {"providerId", providerId_},
            {"dimension", dimension_},
            {"documentCount", docs_.size()},
            {"bm25",
             {{"k1", stats_.params().k1},
              {"b", stats_.params().b},
              {"documentCount", stats_.document_count()},
              {"averageLength", stats_.average_length()},
              {"vocabularySize", stats_.vocabulary().size()}}},
            {"files", {"documents.bin", "dense.bin", "sparse.bin"}},
        };
        io::write_text_file(root / "manifest.json", manifest.dump(2) + "\n");
        staging.publish();
    } catch (const std::exception& e) {
        return GroundingError{GroundingError::Kind::Io, e.what()};
    }
    return Unit{};
}

Result<SchemaIndex, GroundingError> SchemaIndex::load(const fs::path& dir) {
    using Kind = GroundingError::Kind;
    try {
        const auto manifest = nlohmann::json::parse(io::read_text_file(dir / "manifest.json"), nullptr, false);
        if (manifest.is_discarded() || manifest.value("format", "") != "t2s-schema-index") {
            return GroundingError{Kind::Format, "not a schema index: " + dir.string()};
        }
        if (manifest.value("formatVersion", 0) != kSchemaIndexFormatVersion) {
            return GroundingError{Kind::Format, "unsupported schema index version in " + dir.string()};
        }

        SchemaIndex index;
        index.providerId_ = manifest.value("providerId", "");

        io::BinaryReader docs(dir / "documents.bin");
        if (docs.read<std::uint32_t>() != kDocsMagic) return GroundingError{Kind::Format, "bad documents.bin"};
        const auto n = docs.read<std::uint64_t>();
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string iri = docs.read_string();
            const auto kind = docs.read<std::uint8_t>();
            if (kind > static_cast<std::uint8_t>(SchemaKind::DatatypeProperty)) {
                return GroundingError{Kind::Format, "bad schema kind in documents.bin"};
            }
            std::string label = docs.read_string();
            auto comment = read_optional(docs);
            auto domain = read_optional(docs);
            auto range = read_optional(docs);
            auto doc = kg::make_schema_document(kg::Iri(std::move(iri)), static_cast<SchemaKind>(kind),
                                                std::move(label), std::move(comment),
                                                domain ? std::optional<kg::Iri>(kg::Iri(*domain)) : std::nullopt,
                                                range ? std::optional<kg::Iri>(kg::Iri(*range)) : std::nullopt);
            index.docs_.push_back(std::move(doc));
        }

        io::BinaryReader dense(dir / "dense.bin");
        if (dense.read<std::uint32_t>() != kDenseMagic) return GroundingError{Kind::Format, "bad dense.bin"};
        const auto denseCount = dense.read<std::uint64_t>();
        index.dimension_ = dense.read<std::uint64_t>();
        if (denseCount != n) return GroundingError{Kind::Format, "dense.bin count mismatch"};
        index.dense_.resize(n);
        for (auto& v : index.dense_) {
            v.values.resize(index.dimension_);
            for (auto& x : v.values) x = dense.read<double>();
        }

        io::BinaryReader sparse(dir / "sparse.bin");
        if (sparse.read<std::uint32_t>() != kSparseMagic) return GroundingError{Kind::Format, "bad sparse.bin"};
        Bm25Params params;
        params.k1 = sparse.read<double>();
        params.b = sparse.read<double>();
        const auto docCount = sparse.read<std::uint64_t>();
        const auto avgLength = sparse.read<double>();
        const auto vocabSize = sparse.read<std::uint64_t>();
        std::vector<std::string> vocab;
        std::vector<std::uint32_t> df;
        vocab.reserve(vocabSize);
        df.reserve(vocabSize);
        for (std::uint64_t i = 0; i < vocabSize; ++i) {
            vocab.push_back(sparse.read_string());
            df.push_back(sparse.read<std::uint32_t>());
        }
        index.stats_ = CorpusStats::from_parts(std::move(vocab), std::move(df), docCount, avgLength, params);
        index.sparse_.resize(n);
        for (auto& v : index.sparse_) {
            const auto entries = sparse.read<std::uint32_t>();
            for (std::uint32_t e = 0; e < entries; ++e) {
                const auto id = sparse.read<std::uint32_t>();
                const auto w = sparse.read<double>();
                if (id >= vocabSize) return GroundingError{Kind::Format, "sparse.bin term id out of range"};
                v.entries.emplace_back(id, w);
            }
        }
        return index;
    } catch (const std::exception& e) {
        return GroundingError{Kind::Io, std::string("cannot load schema index: ") + e.what()};
    }
}

}  // namespace t2s::grounding
