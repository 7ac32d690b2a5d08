#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/grounding/embedding.hpp"
#include "t2s/grounding/entity_index.hpp"
#include "t2s/grounding/schema_index.hpp"
#include "t2s/kg/endpoint.hpp"
#include "t2s/llm/chat.hpp"
#include "t2s/llm/protocol.hpp"
#include "t2s/tracelab/run_log.hpp"

namespace t2s::agent {

/// Everything the agent needs to know about one configured dataset. Indexes
/// and the graph client are shared, read-only, between concurrent runs.
struct DatasetRef {
    std::string id;    // the dataset URL clients send
    std::string name;  // used in prompts and logs, e.g. "DBpedia"
    std::shared_ptr<kg::KnowledgeGraph> graph;
    std::shared_ptr<const grounding::SchemaIndex> schemaIndex;
    std::map<std::string, std::shared_ptr<const grounding::EntityIndex>> entityIndexByLanguage;
    std::string defaultLanguage = "en";

    /// The detected language if an entity index exists for it, else the default.
    std::string route_language(const std::string& detected) const;
};

struct AgentOptions {
    std::size_t maxIterations = 15;
    std::size_t parseRetries = 2;
    std::size_t searchResults = 10;
    std::size_t excerptEdges = 100;
    std::size_t resultRows = 30;
    std::size_t maxObservationChars = 8000;
    /// Kept back from the budget for the fallback extraction call.
    std::chrono::milliseconds budgetReserve{60000};
    grounding::HybridSearchOptions hybrid;
};

struct AgentDeps {
    llm::ChatBackend* llm = nullptr;
    grounding::EmbeddingProvider* embedder = nullptr;  // null: schema search runs lexical-only
};

struct TraceStep {
    std::size_t index = 0;  // 1-based, contiguous
    std::string thought;
    llm::ActionInvocation action;
    std::string observation;
    std::int64_t durationMs = 0;
    bool wasRepeatIntercepted = false;
    bool rejected = false;  // a stop that was not accepted
};

struct ExecutedQuery {
    std::string query;
    std::string observation;
};

struct AgentState {
    std::string question;
    const DatasetRef* dataset = nullptr;
    std::string language;
    std::vector<TraceStep> steps;
    std::size_t iteration = 0;
    std::optional<ExecutedQuery> lastExecutedQuery;
};

using Origin = tracelab::RunOrigin;

struct AgentOutcome {
    std::string finalQuery;  // empty only when no query could be produced
    Origin origin = Origin::FallbackExtraction;
    std::vector<TraceStep> trace;
    std::int64_t totalDurationMs = 0;
    std::size_t iterations = 0;
    std::string language;
    /// Why the loop ended without a stop, or what went wrong in finalization.
    std::vector<std::string> notes;

    bool has_query() const { return !finalQuery.empty(); }
};

/// The warning observed instead of re-running an action.
extern const std::string kRepeatObservation;

/// True iff an earlier, non-rejected step has the same kind and the same
/// argument after whitespace collapsing. stop is never a repeat.
bool detect_repeat(const std::vector<TraceStep>& history, const llm::ActionInvocation& invocation);

/// Runs one action and renders its result as a capped observation. Endpoint
/// and grounding failures become observations; nothing throws.
std::string dispatch_action(AgentState& state, const llm::ActionInvocation& invocation, const AgentDeps& deps,
                            const AgentOptions& options, std::optional<std::chrono::milliseconds> timeout);

AgentOutcome run_agent(std::string_view question, const DatasetRef& dataset, const AgentDeps& deps,
                       std::chrono::milliseconds budget, const AgentOptions& options = {});

/// The RunRecord logged for an outcome. Rejected stops stay in `trace` but are
/// left out of `actions`.
tracelab::RunRecord make_run_record(const AgentOutcome& outcome, std::string runId, const DatasetRef& dataset,
                                    std::string question);

}  // namespace t2s::agent
