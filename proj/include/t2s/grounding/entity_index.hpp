#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/grounding/bm25.hpp"
#include "t2s/grounding/embedding.hpp"
#include "t2s/grounding/match.hpp"

namespace t2s::grounding {

inline constexpr int kEntityIndexFormatVersion = 1;

struct EntityIndexEntry {
    kg::Iri iri;
    std::string name;
    std::optional<std::string> description;
};

struct EntityIndexOptions {
    /// Entries held in memory before a sorted run is spilled to disk.
    std::size_t maxBufferedEntries = 250000;
    /// Postings held in memory before a postings run is spilled.
    std::size_t maxBufferedPostings = 4000000;
    Bm25Params bm25;
};

struct EntityIndexBuildReport {
    std::size_t ingested = 0;
    std::size_t skippedEmptyName = 0;
    std::size_t documents = 0;  // distinct IRIs after last-write-wins
    std::size_t terms = 0;
};

/// Streaming builder: memory use is bounded by the buffer options, not by the
/// input size. Entries go to sorted runs in a staging directory; finish()
/// merges them into the final files and renames the directory into place.
/// Destroying an unfinished builder leaves `target` untouched.
class EntityIndexBuilder {
public:
    explicit EntityIndexBuilder(std::filesystem::path target, EntityIndexOptions options = {});
    ~EntityIndexBuilder();
    EntityIndexBuilder(const EntityIndexBuilder&) = delete;
    EntityIndexBuilder& operator=(const EntityIndexBuilder&) = delete;

    /// False when the entry was skipped (blank name). A later entry with the
    /// same IRI replaces an earlier one.
    bool add(EntityIndexEntry entry);
    Result<EntityIndexBuildReport, GroundingError> finish();

private:
    struct State;
    std::unique_ptr<State> state_;
};

Result<EntityIndexBuildReport, GroundingError> build_entity_index(const std::vector<EntityIndexEntry>& entries,
                                                                  const std::filesystem::path& target,
                                                                  EntityIndexOptions options = {});

/// Read-only view over a built entity index. Term dictionary, postings and
/// documents stay on disk and are read with positioned reads, so one
/// instance serves concurrent searches.
class EntityIndex {
public:
    static Result<EntityIndex, GroundingError> open(const std::filesystem::path& dir);

    std::size_t size() const;

    /// BM25 over name and description with the name counted twice: per term
    /// tf = 2*tf(name) + tf(description), length = 2*|name| + |description|.
    /// Zero scores are dropped; ties go to the smaller IRI.
    std::vector<ScoredMatch> search(std::string_view query, std::size_t limit) const;

    std::optional<EntityIndexEntry> lookup(const kg::Iri& iri) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace t2s::grounding
