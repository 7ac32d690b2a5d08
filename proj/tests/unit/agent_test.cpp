#include <gtest/gtest.h>

#include <random>

#include "mini_dbpedia.hpp"
#include "t2s/agent/agent.hpp"
#include "t2s/agent/language.hpp"

using namespace t2s;
using namespace t2s::agent;
using std::chrono::milliseconds;

namespace {

std::string action(const std::string& call, const std::string& thought = "next") {
    return "Thought: " + thought + "\nAction: " + call;
}

std::string execute(const std::string& query) { return action("execute_sparql(" + query + ")"); }

const std::string kSelectCities = "SELECT ?c WHERE { ?c a <http://dbpedia.org/ontology/City> }";

class AgentTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { kg_ = std::make_unique<testkit::MiniDbpedia>(); }
    static void TearDownTestSuite() { kg_.reset(); }

    void SetUp() override {
        kg_->endpoint().set_delay(milliseconds(0));
        kg_->endpoint().clear_forced_response();
    }

    AgentOutcome run(llm::ChatBackend& llm, const std::string& question = "How many people live in Berlin?",
                     milliseconds budget = milliseconds(600000), AgentOptions options = {}) {
        AgentDeps deps{&llm, &kg_->embedder()};
        return run_agent(question, kg_->dataset(), deps, budget, options);
    }

    AgentState fresh_state(const std::string& language = "en") {
        AgentState s;
        s.question = "q";
        s.dataset = &kg_->dataset();
        s.language = language;
        return s;
    }

    std::string dispatch(const ActionKind kind, const std::string& arg, AgentState* state = nullptr,
                         AgentOptions options = {}) {
        AgentState local = fresh_state();
        AgentDeps deps{nullptr, &kg_->embedder()};
        return dispatch_action(state ? *state : local, {kind, arg}, deps, options, std::nullopt);
    }

    static std::unique_ptr<testkit::MiniDbpedia> kg_;
};

std::unique_ptr<testkit::MiniDbpedia> AgentTest::kg_;

}  // namespace

TEST(Language, Examples) {
    EXPECT_EQ(detect_language("¿Cuál es la población de Berlín?"), "es");
    EXPECT_EQ(detect_language("Who are the founders of the company?"), "en");
    EXPECT_EQ(detect_language("Berlin"), "en");
    EXPECT_EQ(detect_language("Dame todas las ciudades de Alemania"), "es");
    EXPECT_EQ(detect_language("¡Berlin!"), "es");
    EXPECT_EQ(detect_language("de the"), "en");  // tie
}

TEST(Repeat, Detection) {
    std::vector<TraceStep> history(2);
    history[0].action = {ActionKind::SearchEntityByLabel, "Berlin"};
    history[1].action = {ActionKind::ExecuteSparql, "SELECT ?x WHERE {\n  ?x ?p ?o }"};
    EXPECT_TRUE(detect_repeat(history, {ActionKind::SearchEntityByLabel, "Berlin"}));
    EXPECT_FALSE(detect_repeat(history, {ActionKind::SearchPropertyByLabel, "Berlin"}));
    EXPECT_TRUE(detect_repeat(history, {ActionKind::ExecuteSparql, "SELECT  ?x WHERE { ?x ?p ?o }"}));
    EXPECT_FALSE(detect_repeat(history, {ActionKind::ExecuteSparql, "SELECT ?y WHERE { ?y ?p ?o }"}));
    EXPECT_FALSE(detect_repeat(history, {ActionKind::Stop, ""}));
    history[0].rejected = true;
    EXPECT_FALSE(detect_repeat(history, {ActionKind::SearchEntityByLabel, "Berlin"}));
}

TEST_F(AgentTest, SearchPropertyObservationListsPopulationTotal) {
    const auto obs = dispatch(ActionKind::SearchPropertyByLabel, "population");
    EXPECT_NE(obs.find("1. <http://dbpedia.org/ontology/populationTotal> \"population total\""), std::string::npos)
        << obs;
    EXPECT_NE(obs.find("domain <http://dbpedia.org/ontology/City>"), std::string::npos);
    EXPECT_NE(obs.find("range <http://www.w3.org/2001/XMLSchema#nonNegativeInteger>"), std::string::npos);
    EXPECT_EQ(obs, dispatch(ActionKind::SearchPropertyByLabel, "population"));
}

TEST_F(AgentTest, SearchClassAndEntity) {
    EXPECT_NE(dispatch(ActionKind::SearchClassByLabel, "city").find("1. <http://dbpedia.org/ontology/City>"),
              std::string::npos);
    const auto obs = dispatch(ActionKind::SearchEntityByLabel, "Berlin");
    EXPECT_NE(obs.find("1. <http://dbpedia.org/resource/Berlin> \"Berlin\""), std::string::npos) << obs;
    auto es = fresh_state("es");
    const auto obsEs = dispatch(ActionKind::SearchEntityByLabel, "Berlín", &es);
    EXPECT_NE(obsEs.find("1. <http://dbpedia.org/resource/Berlin> \"Berlín\""), std::string::npos) << obsEs;
    EXPECT_NE(dispatch(ActionKind::SearchEntityByLabel, "  ").find("needs a label"), std::string::npos);
}

TEST_F(AgentTest, ExecuteObservations) {
    AgentState state = fresh_state();
    const auto bad = dispatch(ActionKind::ExecuteSparql, "SELECT ?x WHERE { ?x ?p ", &state);
    EXPECT_EQ(bad.rfind("SPARQL syntax error:", 0), 0u) << bad;
    ASSERT_TRUE(state.lastExecutedQuery);
    EXPECT_EQ(state.lastExecutedQuery->query, "SELECT ?x WHERE { ?x ?p ");

    const auto good = dispatch(ActionKind::ExecuteSparql, testkit::kBerlinPopulationQuery, &state);
    EXPECT_NE(good.find("\"3644826\"^^<http://www.w3.org/2001/XMLSchema#nonNegativeInteger>"), std::string::npos)
        << good;
    EXPECT_EQ(state.lastExecutedQuery->query, testkit::kBerlinPopulationQuery);
    EXPECT_EQ(state.lastExecutedQuery->observation, good);

    EXPECT_EQ(dispatch(ActionKind::ExecuteSparql, "ASK { <http://dbpedia.org/resource/Berlin> ?p ?o }"),
              "ASK result: true");
    const auto none = dispatch(ActionKind::ExecuteSparql, "SELECT ?x WHERE { ?x a <http://ex.org/Nothing> }");
    EXPECT_NE(none.find("no rows"), std::string::npos);
}

TEST_F(AgentTest, ResultRowsAndObservationCapped) {
    AgentOptions options;
    options.resultRows = 3;
    const auto obs = dispatch(ActionKind::ExecuteSparql, "SELECT ?s ?p ?o WHERE { ?s ?p ?o }", nullptr, options);
    EXPECT_NE(obs.find(", showing the first 3:"), std::string::npos) << obs;
    options.resultRows = 30;
    options.maxObservationChars = 300;
    const auto capped = dispatch(ActionKind::ExecuteSparql, "SELECT ?s ?p ?o WHERE { ?s ?p ?o }", nullptr, options);
    EXPECT_LE(capped.size(), 300u);
    EXPECT_NE(capped.find("[observation truncated:"), std::string::npos);
}

TEST_F(AgentTest, InspectionActions) {
    const auto entry = dispatch(ActionKind::GetKnowledgegraphEntry, "http://dbpedia.org/resource/Sufism");
    EXPECT_EQ(entry.rfind("<http://dbpedia.org/resource/Sufism> has 4 outgoing edges:", 0), 0u) << entry;
    EXPECT_EQ(dispatch(ActionKind::GetKnowledgegraphEntry, "dbr:Sufism"), entry);
    EXPECT_EQ(dispatch(ActionKind::GetKnowledgegraphEntry, "<http://dbpedia.org/resource/Sufism>"), entry);
    EXPECT_NE(dispatch(ActionKind::GetKnowledgegraphEntry, "Sufism").find("expects a full entity URI"),
              std::string::npos);

    const auto examples = dispatch(ActionKind::GetPropertyExamples, "http://dbpedia.org/ontology/country");
    const auto lines = std::count(examples.begin(), examples.end(), '\n');
    EXPECT_GE(lines, 2);
    EXPECT_LE(lines, 6);  // heading + at most 5 examples
    EXPECT_NE(examples.find("<http://dbpedia.org/ontology/country>"), std::string::npos);
}

TEST_F(AgentTest, EndpointFailuresBecomeObservations) {
    kg_->endpoint().force_response(503, "down for maintenance");
    const auto obs = dispatch(ActionKind::ExecuteSparql, kSelectCities);
    EXPECT_EQ(obs.rfind("Endpoint error (", 0), 0u) << obs;
}

TEST_F(AgentTest, HappyPathStops) {
    llm::ScriptedChatBackend llm(testkit::happy_path_script());
    const auto started = std::chrono::steady_clock::now();
    auto outcome = run(llm);
    const auto elapsed = std::chrono::steady_clock::now() - started;
    EXPECT_LT(elapsed, std::chrono::seconds(5));
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.finalQuery, testkit::kBerlinPopulationQuery);
    ASSERT_EQ(outcome.trace.size(), 4u);
    for (std::size_t i = 0; i < outcome.trace.size(); ++i) EXPECT_EQ(outcome.trace[i].index, i + 1);
    EXPECT_EQ(outcome.trace[2].action.kind, ActionKind::ExecuteSparql);
    EXPECT_NE(outcome.trace[2].observation.find("3644826"), std::string::npos);
    EXPECT_EQ(outcome.iterations, 4u);
    EXPECT_EQ(llm.calls(), 4u);  // no extraction call

    auto record = make_run_record(outcome, "run-1", kg_->dataset(), "How many people live in Berlin?");
    EXPECT_TRUE(tracelab::validate(record).empty());
    EXPECT_EQ(record.stepCount, 4u);
    EXPECT_EQ(record.actions.back(), ActionKind::Stop);
}

TEST_F(AgentTest, EachCallSeesThePreviousObservation) {
    llm::ScriptedChatBackend llm(testkit::happy_path_script());
    auto outcome = run(llm);
    const auto prompts = llm.received();
    ASSERT_EQ(prompts.size(), outcome.trace.size());
    for (std::size_t n = 1; n < prompts.size(); ++n) {
        EXPECT_NE(prompts[n].back().content.find(outcome.trace[n - 1].observation), std::string::npos) << n;
    }
}

TEST_F(AgentTest, PrematureStopRejectedOnceThenHonored) {
    llm::ScriptedChatBackend llm({action("stop()"), execute(kSelectCities), action("stop()")});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.finalQuery, kSelectCities);
    ASSERT_EQ(outcome.trace.size(), 3u);
    EXPECT_TRUE(outcome.trace[0].rejected);
    EXPECT_NE(outcome.trace[0].observation.find("execute_sparql"), std::string::npos);
    auto record = make_run_record(outcome, "r", kg_->dataset(), "q");
    EXPECT_EQ(record.actions, (std::vector<ActionKind>{ActionKind::ExecuteSparql, ActionKind::Stop}));
    EXPECT_EQ(record.trace.size(), 3u);
}

TEST_F(AgentTest, StopMustFollowExecute) {
    llm::ScriptedChatBackend llm({execute(kSelectCities), action("search_entity_by_label(Berlin)"), action("stop()"),
                                  execute(testkit::kBerlinPopulationQuery), action("stop()")});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.finalQuery, testkit::kBerlinPopulationQuery);
    EXPECT_TRUE(outcome.trace[2].rejected);
}

TEST_F(AgentTest, SecondPrematureStopFallsBack) {
    llm::ScriptedChatBackend llm({action("stop()"), action("search_entity_by_label(Berlin)"), action("stop()"),
                                  "```sparql\n" + testkit::kBerlinPopulationQuery + "\n```"});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_EQ(outcome.finalQuery, testkit::kBerlinPopulationQuery);
    EXPECT_EQ(outcome.trace.size(), 3u);
    const auto extraction = llm.received().back();
    EXPECT_NE(extraction.back().content.find("Output the final SPARQL, and the SPARQL only:"), std::string::npos);
}

TEST_F(AgentTest, NeverStoppingRunEndsAtFifteen) {
    std::vector<std::string> script;
    for (int i = 0; i < 15; ++i) script.push_back(execute(kSelectCities + " LIMIT " + std::to_string(i + 1)));
    script.push_back("Final answer:\n" + testkit::kBerlinPopulationQuery);
    llm::ScriptedChatBackend llm(script);
    auto outcome = run(llm);
    EXPECT_EQ(outcome.iterations, 15u);
    EXPECT_EQ(outcome.trace.size(), 15u);
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_EQ(outcome.finalQuery, testkit::kBerlinPopulationQuery);
    EXPECT_EQ(llm.calls(), 16u);
}

TEST_F(AgentTest, FailedExtractionFallsBackToLastExecuted) {
    std::vector<std::string> script;
    for (int i = 0; i < 15; ++i) script.push_back(execute(kSelectCities + " LIMIT " + std::to_string(i + 1)));
    llm::ScriptedChatBackend llm(script);  // nothing left for extraction
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_EQ(outcome.finalQuery, kSelectCities + " LIMIT 15");
}

TEST_F(AgentTest, NoQueryProducible) {
    llm::ScriptedChatBackend llm({action("search_entity_by_label(Berlin)"), "I have no idea."});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_FALSE(outcome.has_query());
}

TEST_F(AgentTest, RepeatIntercepted) {
    llm::ScriptedChatBackend llm({action("search_entity_by_label(Berlin)"), action("search_entity_by_label(Berlin)"),
                                  execute(kSelectCities), execute("SELECT ?c\nWHERE {   ?c a <http://dbpedia.org/ontology/City> }"),
                                  action("stop()")});
    const int before = kg_->endpoint().request_count();
    auto outcome = run(llm);
    ASSERT_EQ(outcome.trace.size(), 5u);
    EXPECT_FALSE(outcome.trace[0].wasRepeatIntercepted);
    EXPECT_TRUE(outcome.trace[1].wasRepeatIntercepted);
    EXPECT_EQ(outcome.trace[1].observation, kRepeatObservation);
    EXPECT_TRUE(outcome.trace[3].wasRepeatIntercepted);
    EXPECT_EQ(kg_->endpoint().request_count() - before, 1);  // only the first execute hit the endpoint
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.finalQuery, "SELECT ?c\nWHERE {   ?c a <http://dbpedia.org/ontology/City> }");
}

TEST_F(AgentTest, ParseRetriesDoNotCountAsIterations) {
    llm::ScriptedChatBackend llm({"hmm", "let me think", execute(kSelectCities), action("stop()")});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.iterations, 2u);
    const auto third = llm.received()[2];
    ASSERT_GE(third.size(), 4u);
    EXPECT_EQ(third[2].role, llm::Role::Assistant);
    EXPECT_NE(third.back().content.find("could not be parsed"), std::string::npos);
}

TEST_F(AgentTest, ExhaustedRetriesConsumeAnIteration) {
    llm::ScriptedChatBackend llm({"a", "b", "c", execute(kSelectCities), action("stop()")});
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::Stop);
    EXPECT_EQ(outcome.iterations, 3u);
    EXPECT_EQ(outcome.trace.size(), 2u);
}

TEST_F(AgentTest, SpanishQuestionRoutesToSpanishIndex) {
    llm::ScriptedChatBackend llm({action("search_entity_by_label(Berlín)"), execute(testkit::kBerlinPopulationQuery),
                                  action("stop()")});
    auto outcome = run(llm, "¿Cuál es la población de Berlín?");
    EXPECT_EQ(outcome.language, "es");
    EXPECT_NE(outcome.trace[0].observation.find("(es labels)"), std::string::npos);
    EXPECT_NE(llm.received()[0][1].content.find("Question language: es"), std::string::npos);
}

TEST_F(AgentTest, StaysInsideBudget) {
    kg_->endpoint().set_delay(milliseconds(300));
    int n = 0;
    llm::FunctionChatBackend llm([&](const std::vector<llm::ChatMessage>& messages) -> Result<std::string, llm::LlmError> {
        if (messages.back().content.find("Output the final SPARQL") != std::string::npos) return std::string("no idea");
        return execute(kSelectCities + " LIMIT " + std::to_string(++n));
    });
    AgentOptions options;
    options.budgetReserve = milliseconds(400);
    const auto started = std::chrono::steady_clock::now();
    auto outcome = run(llm, "q", milliseconds(1500), options);
    const auto elapsed = std::chrono::steady_clock::now() - started;
    EXPECT_LT(elapsed, milliseconds(1500));
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_LT(outcome.iterations, 15u);
    EXPECT_TRUE(outcome.has_query());
}

TEST_F(AgentTest, LlmFailureGoesToFallback) {
    llm::FunctionChatBackend llm([](const std::vector<llm::ChatMessage>&) -> Result<std::string, llm::LlmError> {
        return llm::LlmError{llm::LlmError::Kind::Transport, "connection refused"};
    });
    auto outcome = run(llm);
    EXPECT_EQ(outcome.origin, Origin::FallbackExtraction);
    EXPECT_FALSE(outcome.has_query());
    EXPECT_TRUE(outcome.trace.empty());
}

// Random scripts mixing every action, stops, garbage and repeats. Whatever the
// model does, the loop invariants hold.
TEST_F(AgentTest, AdversarialScriptsKeepInvariants) {
    const std::vector<std::string> pool{
        action("search_entity_by_label(Berlin)"),
        action("search_property_by_label(population)"),
        action("search_class_by_label(city)"),
        action("get_knowledgegraph_entry(http://dbpedia.org/resource/Berlin)"),
        action("get_property_examples(http://dbpedia.org/ontology/country)"),
        execute(kSelectCities),
        execute(testkit::kBerlinPopulationQuery),
        execute("SELECT ?x WHERE { ?x "),
        action("stop()"),
        action("stop()"),
        "no action here",
        "```sparql\nSELECT ?x WHERE { ?x ?p ?o } LIMIT 1\n```",
    };
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int round = 0; round < 120; ++round) {
        std::vector<std::string> script;
        const std::size_t len = 1 + rng() % 60;
        for (std::size_t i = 0; i < len; ++i) script.push_back(pool[pick(rng)]);
        llm::ScriptedChatBackend llm(script);
        auto outcome = run(llm);
        ASSERT_LE(outcome.iterations, 15u);
        ASSERT_LE(outcome.trace.size(), 15u);
        for (std::size_t i = 0; i < outcome.trace.size(); ++i) ASSERT_EQ(outcome.trace[i].index, i + 1);
        if (outcome.origin == Origin::Stop) {
            ASSERT_GE(outcome.trace.size(), 2u);
            ASSERT_EQ(outcome.trace.back().action.kind, ActionKind::Stop);
            std::string lastExecuted;
            for (const auto& s : outcome.trace) {
                if (s.action.kind == ActionKind::ExecuteSparql) lastExecuted = s.action.argument;
            }
            ASSERT_EQ(outcome.finalQuery, lastExecuted);
        }
        auto record = make_run_record(outcome, "r", kg_->dataset(), "q");
        ASSERT_TRUE(tracelab::validate(record).empty());
        for (std::size_t i = 0; i < record.actions.size(); ++i) {
            if (record.actions[i] == ActionKind::Stop) {
                ASSERT_GT(i, 0u);
                ASSERT_EQ(record.actions[i - 1], ActionKind::ExecuteSparql);
            }
        }
    }
}
