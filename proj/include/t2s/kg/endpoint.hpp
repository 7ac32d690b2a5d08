#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t2s/common/result.hpp"
#include "t2s/kg/rdf.hpp"
#include "t2s/kg/results.hpp"
#include "t2s/kg/schema.hpp"

namespace t2s::kg {

struct EndpointConfig {
    std::string queryUrl;
    std::chrono::milliseconds requestTimeout{std::chrono::seconds(60)};
    std::size_t maxRows = 100;
    std::size_t maxExcerptEdges = 100;
    /// Queries whose GET URL would exceed this length are sent as POST.
    std::size_t maxGetUrlLength = 2048;
};

/// The error channel of every endpoint call. Endpoint-reported problems are
/// ordinary values that the agent renders as observations.
struct EndpointError {
    enum class Kind { Syntax, Timeout, Transport, MalformedResults };

    Kind kind = Kind::Transport;
    std::string message;
    int httpStatus = 0;
};

std::string_view to_string(EndpointError::Kind kind);

struct Edge {
    Iri predicate;
    RdfTerm object;
};

/// Outgoing edges of one subject, sorted by (predicate, object).
struct EntityExcerpt {
    Iri subject;
    std::vector<Edge> edges;
    bool truncated = false;
    std::size_t totalEdges = 0;
};

struct PropertyExample {
    RdfTerm subject;
    RdfTerm object;
};

inline constexpr std::size_t kPropertyExampleLimit = 5;

/// The inspection and execution surface the agent dispatches to. An explicit
/// timeout can only shorten the configured per-request timeout (the agent
/// uses this to keep every call inside its remaining budget).
class KnowledgeGraph {
public:
    virtual ~KnowledgeGraph() = default;

    virtual Result<SparqlResultSet, EndpointError> execute(
        std::string_view query, std::optional<std::chrono::milliseconds> timeout = std::nullopt) = 0;
    virtual Result<EntityExcerpt, EndpointError> outgoing_edges(
        const Iri& entity, std::optional<std::chrono::milliseconds> timeout = std::nullopt) = 0;
    virtual Result<std::vector<PropertyExample>, EndpointError> property_examples(
        const Iri& property, std::optional<std::chrono::milliseconds> timeout = std::nullopt) = 0;
};

/// SPARQL 1.1 Protocol client (GET, or form-encoded POST for long queries),
/// requesting application/sparql-results+json. Stateless and safe for
/// concurrent use.
class SparqlClient final : public KnowledgeGraph {
public:
    explicit SparqlClient(EndpointConfig config);

    const EndpointConfig& config() const { return config_; }

    /// SELECT rows are capped at maxRows.
    Result<SparqlResultSet, EndpointError> execute(
        std::string_view query,
        std::optional<std::chrono::milliseconds> timeout = std::nullopt) override;

    /// Like execute() without the row cap.
    Result<SparqlResultSet, EndpointError> execute_uncapped(
        std::string_view query, std::optional<std::chrono::milliseconds> timeout = std::nullopt);

    Result<EntityExcerpt, EndpointError> outgoing_edges(
        const Iri& entity, std::optional<std::chrono::milliseconds> timeout = std::nullopt) override;

    Result<std::vector<PropertyExample>, EndpointError> property_examples(
        const Iri& property, std::optional<std::chrono::milliseconds> timeout = std::nullopt) override;

private:
    EndpointConfig config_;
};

std::string outgoing_edges_query(const Iri& entity);
std::string property_examples_query(const Iri& property);

/// Maps one HTTP outcome to results or exactly one error kind.
Result<SparqlResultSet, EndpointError> classify_response(int status, std::string_view body);

// ---------------------------------------------------------------------------
// Harvesting, used to build the grounding indexes.

struct HarvestError {
    EndpointError cause;
    std::size_t progress = 0;  // items successfully harvested before the failure
};

struct HarvestOptions {
    std::size_t pageSize = 10000;
    /// Label/comment language preferred when a schema entity has several.
    std::string preferredLanguage = "en";
};

/// All owl:Class, owl:ObjectProperty and owl:DatatypeProperty instances with
/// label, comment, domain and range, ordered by IRI.
Result<std::vector<SchemaDocument>, HarvestError> harvest_schema(SparqlClient& client,
                                                                 const HarvestOptions& options = {});

struct HarvestedEntity {
    Iri iri;
    std::string label;
    std::optional<std::string> labelLanguage;
    std::optional<std::string> comment;
};

/// Streams every labeled, non-schema IRI subject once per label. With a
/// language filter, only labels tagged with that language or untagged labels
/// are yielded. Returns the number of yielded entities.
Result<std::size_t, HarvestError> harvest_entities(
    SparqlClient& client, const std::optional<std::string>& languageFilter,
    const std::function<void(const HarvestedEntity&)>& sink, const HarvestOptions& options = {});

std::string schema_harvest_query(SchemaKind kind, std::size_t limit, std::size_t offset);
std::string entity_harvest_query(const std::optional<std::string>& languageFilter,
                                 std::size_t limit, std::size_t offset);

}  // namespace t2s::kg
