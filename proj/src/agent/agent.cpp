#include "t2s/agent/agent.hpp"

#include <algorithm>

#include "t2s/agent/language.hpp"
#include "t2s/common/text.hpp"
#include "t2s/llm/prompts.hpp"

namespace t2s::agent {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;
using llm::ActionInvocation;

const std::string kRepeatObservation =
    "This exact action was already performed earlier with the same argument, so it was not run again; the result "
    "would be identical. Choose a different action or a different argument.";

namespace {

const std::string kStopRejected =
    "stop was not accepted. stop returns the most recently executed query, so the step right before stop must be "
    "an execute_sparql call. Run your final query with execute_sparql, check the result, then call stop().";

const std::string kParseRetry =
    "Your reply could not be parsed: {{error}}. Reply with one line starting with \"Thought:\" and one line "
    "starting with \"Action:\" that calls exactly one of the seven actions, e.g. Action: search_entity_by_label(Berlin)";

std::int64_t ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<milliseconds>(b - a).count();
}

std::string cap_observation(std::string observation, std::size_t maxChars) {
    if (observation.size() <= maxChars) return observation;
    const std::size_t total = observation.size();
    const std::size_t keep = maxChars > 120 ? maxChars - 120 : maxChars / 2;
    std::string out(text::utf8_prefix(observation, keep));
    out += "\n[observation truncated: showing " + std::to_string(out.size()) + " of " + std::to_string(total) +
           " characters]";
    return out;
}

std::string one_line(std::string_view s, std::size_t maxBytes) {
    std::string flat = text::collapse_whitespace(s);
    if (flat.size() <= maxBytes) return flat;
    return std::string(text::utf8_prefix(flat, maxBytes)) + "...";
}

std::optional<kg::Iri> parse_iri_argument(const std::string& argument) {
    std::string s = text::trim(argument);
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>') s = s.substr(1, s.size() - 2);
    if (auto expanded = kg::expand_known_prefix(s)) s = *expanded;
    if (s.find("://") == std::string::npos && s.rfind("urn:", 0) != 0) return std::nullopt;
    return kg::Iri::parse(s);
}

std::string endpoint_error(const kg::EndpointError& e) {
    if (e.kind == kg::EndpointError::Kind::Syntax) return "SPARQL syntax error: " + e.message;
    return "Endpoint error (" + std::string(kg::to_string(e.kind)) + "): " + e.message;
}

std::string render_matches(const std::string& heading, const std::vector<grounding::ScoredMatch>& matches) {
    if (matches.empty()) return heading + ": no matches.";
    std::string out = heading + ", top " + std::to_string(matches.size()) + ":\n";
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const auto& m = matches[i];
        out += std::to_string(i + 1) + ". " + m.iri.to_sparql() + " \"" + one_line(m.label, 120) + "\"";
        if (m.kind != "instance") out += " (" + m.kind + ")";
        if (m.domain) out += " domain " + m.domain->to_sparql();
        if (m.range) out += " range " + m.range->to_sparql();
        if (m.description && !m.description->empty()) out += " - " + one_line(*m.description, 200);
        out += '\n';
    }
    return out;
}

std::string search_entities(const AgentState& state, const std::string& label, const AgentOptions& options) {
    const auto& indexes = state.dataset->entityIndexByLanguage;
    auto it = indexes.find(state.language);
    if (it == indexes.end() || !it->second) return "No entity index is available for this dataset.";
    return render_matches("Entities matching \"" + label + "\" (" + state.language + " labels)",
                          it->second->search(label, options.searchResults));
}

std::string search_schema(const AgentState& state, const AgentDeps& deps, const std::string& label,
                          grounding::KindFilter filter, const AgentOptions& options) {
    const auto& index = state.dataset->schemaIndex;
    if (!index) return "No schema index is available for this dataset.";
    auto result = index->hybrid_search(label, deps.embedder, filter, options.searchResults, options.hybrid);
    const std::string what = filter == grounding::KindFilter::Class ? "Classes" : "Properties";
    std::string out = render_matches(what + " matching \"" + label + "\"", result.matches);
    if (result.degraded) out += "\n(note: only lexical matching was used: " + result.degradedReason + ")";
    return out;
}

std::string render_excerpt(const kg::EntityExcerpt& excerpt, std::size_t cap) {
    if (excerpt.edges.empty()) return excerpt.subject.to_sparql() + " has no outgoing edges.";
    const std::size_t shown = std::min(cap, excerpt.edges.size());
    const std::size_t total = std::max(excerpt.totalEdges, excerpt.edges.size());
    std::string out = excerpt.subject.to_sparql() + " has " + std::to_string(total) + " outgoing edges";
    out += shown < total ? ", showing the first " + std::to_string(shown) + ":\n" : ":\n";
    for (std::size_t i = 0; i < shown; ++i) {
        out += excerpt.edges[i].predicate.to_sparql() + " " + excerpt.edges[i].object.to_ntriples() + "\n";
    }
    return out;
}

std::string render_examples(const kg::Iri& property, const std::vector<kg::PropertyExample>& examples) {
    if (examples.empty()) return "No usage examples found for " + property.to_sparql() + ".";
    std::string out = "Usage examples of " + property.to_sparql() + ":\n";
    for (const auto& ex : examples) {
        out += ex.subject.to_ntriples() + " " + property.to_sparql() + " " + ex.object.to_ntriples() + "\n";
    }
    return out;
}

std::string render_results(const kg::SparqlResultSet& results, std::size_t cap) {
    if (results.is_ask()) return std::string("ASK result: ") + (*results.boolean ? "true" : "false");
    const std::size_t total = results.truncated ? results.originalRowCount : results.rows.size();
    std::string vars;
    for (const auto& v : results.variables) vars += (vars.empty() ? "?" : "\t?") + v;
    if (results.rows.empty()) return "The query returned no rows (variables: " + (vars.empty() ? "none" : vars) + ").";
    const std::size_t shown = std::min(cap, results.rows.size());
    std::string out = "The query returned " + std::to_string(total) + (total == 1 ? " row" : " rows");
    out += shown < total ? ", showing the first " + std::to_string(shown) + ":\n" : ":\n";
    out += vars + "\n";
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& row = results.rows[i];
        std::string line;
        for (std::size_t c = 0; c < results.variables.size(); ++c) {
            if (c) line += '\t';
            auto it = row.find(results.variables[c]);
            line += it == row.end() ? "-" : it->second.to_ntriples();
        }
        out += line + "\n";
    }
    return out;
}

std::vector<llm::HistoryEntry> history_of(const std::vector<TraceStep>& steps) {
    std::vector<llm::HistoryEntry> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back({s.thought, llm::format_invocation(s.action), s.observation});
    return out;
}

}  // namespace

std::string DatasetRef::route_language(const std::string& detected) const {
    auto it = entityIndexByLanguage.find(detected);
    if (it != entityIndexByLanguage.end() && it->second) return detected;
    return defaultLanguage;
}

bool detect_repeat(const std::vector<TraceStep>& history, const ActionInvocation& invocation) {
    if (invocation.kind == ActionKind::Stop) return false;
    const auto normalized = text::collapse_whitespace(invocation.argument);
    return std::any_of(history.begin(), history.end(), [&](const TraceStep& s) {
        return !s.rejected && s.action.kind == invocation.kind &&
               text::collapse_whitespace(s.action.argument) == normalized;
    });
}

std::string dispatch_action(AgentState& state, const ActionInvocation& invocation, const AgentDeps& deps,
                            const AgentOptions& options, std::optional<milliseconds> timeout) {
    const std::string arg = text::trim(invocation.argument);
    const std::string name(to_string(invocation.kind));
    auto render = [&]() -> std::string {
        switch (invocation.kind) {
            case ActionKind::SearchEntityByLabel:
                if (arg.empty()) return name + " needs a label to search for, e.g. " + name + "(Berlin).";
                return search_entities(state, arg, options);
            case ActionKind::SearchPropertyByLabel:
                if (arg.empty()) return name + " needs a label to search for, e.g. " + name + "(population).";
                return search_schema(state, deps, arg, grounding::KindFilter::Property, options);
            case ActionKind::SearchClassByLabel:
                if (arg.empty()) return name + " needs a label to search for, e.g. " + name + "(City).";
                return search_schema(state, deps, arg, grounding::KindFilter::Class, options);
            case ActionKind::GetKnowledgegraphEntry: {
                auto iri = parse_iri_argument(arg);
                if (!iri) {
                    return name + " expects a full entity URI such as http://dbpedia.org/resource/Sufism, got \"" +
                           one_line(arg, 200) + "\". Use search_entity_by_label to find the URI first.";
                }
                auto excerpt = state.dataset->graph->outgoing_edges(*iri, timeout);
                if (!excerpt) return endpoint_error(excerpt.error());
                return render_excerpt(*excerpt, options.excerptEdges);
            }
            case ActionKind::GetPropertyExamples: {
                auto iri = parse_iri_argument(arg);
                if (!iri) {
                    return name + " expects a full property URI such as http://dbpedia.org/ontology/birthPlace, got \"" +
                           one_line(arg, 200) + "\". Use search_property_by_label to find the URI first.";
                }
                auto examples = state.dataset->graph->property_examples(*iri, timeout);
                if (!examples) return endpoint_error(examples.error());
                return render_examples(*iri, *examples);
            }
            case ActionKind::ExecuteSparql: {
                if (arg.empty()) return name + " needs a SPARQL query.";
                auto results = state.dataset->graph->execute(invocation.argument, timeout);
                std::string obs = results ? render_results(*results, options.resultRows) : endpoint_error(results.error());
                state.lastExecutedQuery = ExecutedQuery{invocation.argument, obs};
                return obs;
            }
            case ActionKind::Stop: return "stop is handled by the controller loop.";
        }
        return "unknown action";
    };
    std::string observation = cap_observation(render(), options.maxObservationChars);
    if (invocation.kind == ActionKind::ExecuteSparql && state.lastExecutedQuery) {
        state.lastExecutedQuery->observation = observation;
    }
    return observation;
}

AgentOutcome run_agent(std::string_view question, const DatasetRef& dataset, const AgentDeps& deps,
                       milliseconds budget, const AgentOptions& options) {
    const auto start = Clock::now();
    const auto deadline = start + budget;
    auto left_for_loop = [&] {
        return std::chrono::duration_cast<milliseconds>(deadline - Clock::now()) - options.budgetReserve;
    };

    AgentOutcome outcome;
    AgentState state;
    state.question = std::string(question);
    state.dataset = &dataset;
    state.language = dataset.route_language(detect_language(question));
    outcome.language = state.language;

    bool stopped = false;
    std::size_t rejectedStops = 0;
    while (state.iteration < options.maxIterations && !stopped) {
        if (left_for_loop() <= milliseconds(0)) {
            outcome.notes.push_back("budget reserve reached after " + std::to_string(state.iteration) + " iterations");
            break;
        }
        if (deps.llm == nullptr) {
            outcome.notes.push_back("no language model configured");
            break;
        }
        ++state.iteration;
        const auto stepStart = Clock::now();

        auto messages = llm::render_controller_prompt(dataset.name, question, history_of(state.steps), state.language);
        std::optional<llm::ControllerDecision> decision;
        std::optional<llm::LlmError> llmError;
        bool outOfTime = false;
        for (std::size_t attempt = 0; attempt <= options.parseRetries && !decision; ++attempt) {
            const auto left = left_for_loop();
            if (left <= milliseconds(0)) {
                outOfTime = true;
                break;
            }
            auto reply = deps.llm->complete(messages, left);
            if (!reply) {
                llmError = reply.error();
                const auto kind = reply.error().kind;
                if (kind == llm::LlmError::Kind::ScriptExhausted || kind == llm::LlmError::Kind::Configuration) break;
                continue;
            }
            llmError.reset();
            auto parsed = llm::parse_controller_output(*reply);
            if (parsed) {
                decision = std::move(parsed).value();
                break;
            }
            messages.push_back({llm::Role::Assistant, reply->empty() ? "(empty reply)" : *reply});
            messages.push_back({llm::Role::User, "Observation: " + llm::render_template(kParseRetry, {{"error", parsed.error().message}})});
        }
        if (outOfTime) {
            outcome.notes.push_back("budget reserve reached while waiting for the model");
            break;
        }
        if (!decision && llmError) {
            outcome.notes.push_back("model call failed (" + std::string(llm::to_string(llmError->kind)) +
                                    "): " + llmError->message);
            break;
        }
        if (!decision) {
            // the iteration is spent, nothing is added to the trace
            outcome.notes.push_back("iteration " + std::to_string(state.iteration) + ": no parsable action");
            continue;
        }

        TraceStep step;
        step.index = state.steps.size() + 1;
        step.thought = decision->thought;
        step.action = decision->action;
        if (step.action.kind == ActionKind::Stop) {
            const bool afterExecute = !state.steps.empty() && state.steps.back().action.kind == ActionKind::ExecuteSparql;
            if (afterExecute && state.lastExecutedQuery) {
                stopped = true;
            } else {
                step.rejected = true;
                step.observation = kStopRejected;
                ++rejectedStops;
            }
        } else if (detect_repeat(state.steps, step.action)) {
            step.wasRepeatIntercepted = true;
            step.observation = kRepeatObservation;
            if (step.action.kind == ActionKind::ExecuteSparql) {
                // still counts as the latest execution, so a following stop returns this text
                const auto normalized = text::collapse_whitespace(step.action.argument);
                std::string previous;
                for (const auto& s : state.steps) {
                    if (s.action.kind == ActionKind::ExecuteSparql && !s.wasRepeatIntercepted &&
                        text::collapse_whitespace(s.action.argument) == normalized) {
                        previous = s.observation;
                    }
                }
                state.lastExecutedQuery = ExecutedQuery{step.action.argument, previous};
            }
        } else {
            step.observation = dispatch_action(state, step.action, deps, options, left_for_loop());
        }
        step.durationMs = ms_between(stepStart, Clock::now());
        state.steps.push_back(std::move(step));
        if (rejectedStops >= 2) {
            outcome.notes.push_back("stop rejected twice without a preceding execute_sparql");
            break;
        }
    }
    outcome.iterations = state.iteration;

    if (stopped) {
        outcome.origin = Origin::Stop;
        outcome.finalQuery = state.lastExecutedQuery->query;
    } else {
        outcome.origin = Origin::FallbackExtraction;
        if (state.iteration >= options.maxIterations) outcome.notes.push_back("iteration limit reached");
        const auto left = std::chrono::duration_cast<milliseconds>(deadline - Clock::now()) - milliseconds(100);
        if (!state.steps.empty() && deps.llm != nullptr && left > milliseconds(0)) {
            auto reply = deps.llm->complete(llm::render_extraction_prompt(dataset.name, question, history_of(state.steps)), left);
            if (!reply) {
                outcome.notes.push_back("extraction call failed (" + std::string(llm::to_string(reply.error().kind)) +
                                        "): " + reply.error().message);
            } else if (auto query = llm::extract_sparql_text(*reply)) {
                outcome.finalQuery = *query;
            } else {
                outcome.notes.push_back("extraction reply contained no query");
            }
        }
        if (outcome.finalQuery.empty() && state.lastExecutedQuery) {
            outcome.finalQuery = state.lastExecutedQuery->query;
            outcome.notes.push_back("using the last executed query");
        }
        if (outcome.finalQuery.empty()) outcome.notes.push_back("no query could be produced");
    }
    outcome.trace = std::move(state.steps);
    outcome.totalDurationMs = ms_between(start, Clock::now());
    return outcome;
}

tracelab::RunRecord make_run_record(const AgentOutcome& outcome, std::string runId, const DatasetRef& dataset,
                                    std::string question) {
    tracelab::RunRecord r;
    r.runId = std::move(runId);
    r.datasetName = dataset.name;
    r.question = std::move(question);
    r.language = outcome.language;
    for (const auto& s : outcome.trace) {
        if (!s.rejected) r.actions.push_back(s.action.kind);
        r.trace.push_back({s.thought, s.action.kind, s.action.argument, s.observation, s.durationMs,
                           s.wasRepeatIntercepted, s.rejected});
    }
    r.stepCount = r.actions.size();
    // a record must have positive duration even for instant scripted runs
    r.durationSeconds = std::max(1e-3, static_cast<double>(outcome.totalDurationMs) / 1000.0);
    r.origin = outcome.origin;
    r.finalQuery = outcome.finalQuery;
    return r;
}

}  // namespace t2s::agent
