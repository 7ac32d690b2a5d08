#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <nlohmann/json.hpp>

#include "mini_dbpedia.hpp"
#include "t2s/common/binary_io.hpp"
#include "t2s/common/http_client.hpp"
#include "t2s/service/config.hpp"
#include "t2s/service/service.hpp"

using namespace t2s;
using namespace t2s::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("t2s_service_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void fake_index(const fs::path& dir) {
    fs::create_directories(dir);
    io::write_text_file(dir / "manifest.json", "{}");
}

json minimal_config() {
    return json::parse(R"({
      "llm": {"baseUrl": "http://localhost:1234/v1", "model": "some-model"},
      "datasets": [{
        "id": "https://text2sparql.aksw.org/2025/dbpedia/",
        "name": "DBpedia",
        "endpoint": "http://localhost:8890/sparql",
        "schemaIndex": "idx/schema",
        "entityIndexes": {"en": "idx/en"}
      }]
    })");
}

std::string problems_of(const Result<AppConfig, ConfigErrors>& r) { return r ? "" : r.error().joined(); }

}  // namespace

TEST(Config, MinimalValidConfigLoads) {
    const auto dir = temp_dir("minimal");
    fake_index(dir / "idx/schema");
    fake_index(dir / "idx/en");
    auto cfg = parse_config(minimal_config(), dir);
    ASSERT_TRUE(cfg) << problems_of(cfg);
    EXPECT_EQ(cfg->totalBudget, std::chrono::seconds(600));
    ASSERT_EQ(cfg->datasets.size(), 1u);
    EXPECT_EQ(cfg->datasets[0].schemaIndex, dir / "idx/schema");
    EXPECT_EQ(cfg->llm.temperature, 0.0);
    EXPECT_EQ(cfg->agent.maxIterations, 15u);
    EXPECT_NE(cfg->find_dataset("https://text2sparql.aksw.org/2025/dbpedia/"), nullptr);

    io::write_text_file(dir / "config.json", minimal_config().dump());
    auto loaded = load_config(dir / "config.json");
    ASSERT_TRUE(loaded) << problems_of(loaded);
    ::setenv("T2S_CONFIG", (dir / "config.json").c_str(), 1);
    EXPECT_TRUE(load_config(""));
    ::unsetenv("T2S_CONFIG");
    EXPECT_FALSE(load_config(""));
}

TEST(Config, BudgetOverTenMinutesRejected) {
    const auto dir = temp_dir("budget");
    fake_index(dir / "idx/schema");
    fake_index(dir / "idx/en");
    auto doc = minimal_config();
    doc["totalBudgetSeconds"] = 900;
    auto cfg = parse_config(doc, dir);
    ASSERT_FALSE(cfg);
    EXPECT_NE(problems_of(cfg).find("totalBudgetSeconds"), std::string::npos);
}

TEST(Config, MissingBaseUrlNamed) {
    const auto dir = temp_dir("baseurl");
    fake_index(dir / "idx/schema");
    fake_index(dir / "idx/en");
    auto doc = minimal_config();
    doc["llm"].erase("baseUrl");
    auto cfg = parse_config(doc, dir);
    ASSERT_FALSE(cfg);
    EXPECT_NE(problems_of(cfg).find("llm.baseUrl"), std::string::npos);
}

TEST(Config, ReportsEveryProblem) {
    const auto dir = temp_dir("every");
    auto doc = minimal_config();
    doc["totalBudgetSeconds"] = 601;
    doc["llm"].erase("model");
    doc["datasets"][0]["endpoint"] = "not a url";
    doc["datasets"][0]["defaultLanguage"] = "es";
    auto cfg = parse_config(doc, dir);
    ASSERT_FALSE(cfg);
    const auto& problems = cfg.error().problems;
    const auto all = cfg.error().joined();
    for (const char* field : {"totalBudgetSeconds", "llm.model", "datasets[0].endpoint", "datasets[0].schemaIndex",
                              "datasets[0].entityIndexes.en", "datasets[0].defaultLanguage"}) {
        EXPECT_NE(all.find(field), std::string::npos) << field << "\n" << all;
    }
    EXPECT_GE(problems.size(), 6u);
    EXPECT_FALSE(parse_config(json::parse(R"({"llm": {}})"), dir));
}

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { kg_ = std::make_unique<testkit::MiniDbpedia>(); }
    static void TearDownTestSuite() { kg_.reset(); }

    std::unique_ptr<Text2SparqlService> make_service(ChatBackendFactory factory, const fs::path& log) {
        ServiceOptions options;
        options.totalBudget = std::chrono::seconds(20);
        options.agent.budgetReserve = std::chrono::seconds(2);
        return std::make_unique<Text2SparqlService>(
            std::vector<agent::DatasetRef>{kg_->dataset()}, std::move(factory),
            std::make_shared<grounding::HashingEmbeddingProvider>(), std::make_shared<tracelab::RunLog>(log), options);
    }

    static ChatBackendFactory happy_factory() {
        return [] { return std::make_unique<llm::ScriptedChatBackend>(testkit::happy_path_script()); };
    }

    static std::unique_ptr<testkit::MiniDbpedia> kg_;
};

std::unique_ptr<testkit::MiniDbpedia> ServiceTest::kg_;

TEST_F(ServiceTest, ParameterErrors) {
    auto service = make_service(happy_factory(), temp_dir("params") / "runs.jsonl");
    auto noQuestion = service->handle({{"dataset", testkit::kDbpediaDatasetId}});
    EXPECT_EQ(noQuestion.status, 400);
    EXPECT_EQ(json::parse(noQuestion.body)["parameter"], "question");
    auto unknown = service->handle({{"dataset", "https://example.org/unknown"}, {"question", "q"}});
    EXPECT_EQ(unknown.status, 400);
    EXPECT_EQ(json::parse(unknown.body)["parameter"], "dataset");
    EXPECT_EQ(json::parse(unknown.body)["known"][0], testkit::kDbpediaDatasetId);
    auto noDataset = service->handle({{"question", "q"}});
    EXPECT_EQ(noDataset.status, 400);
    EXPECT_EQ(json::parse(noDataset.body)["parameter"], "dataset");
}

TEST_F(ServiceTest, PlaceholderWhenNothingProduced) {
    auto service = make_service(
        [] {
            return std::make_unique<llm::FunctionChatBackend>([](const std::vector<llm::ChatMessage>&) {
                return Result<std::string, llm::LlmError>(llm::LlmError{llm::LlmError::Kind::Transport, "down"});
            });
        },
        temp_dir("placeholder") / "runs.jsonl");
    auto reply = service->handle({{"dataset", testkit::kDbpediaDatasetId}, {"question", "Who?"}});
    EXPECT_EQ(reply.status, 200);
    EXPECT_EQ(json::parse(reply.body)["query"], kPlaceholderQuery);
    EXPECT_EQ(reply.headers.count(kWarningHeader), 1u);
}

TEST_F(ServiceTest, HttpRoundTripAndConcurrency) {
    const auto log = temp_dir("http") / "runs.jsonl";
    // The reply depends on the question, so crossed traces would show up as
    // a LIMIT that does not match the question number.
    auto service = make_service(
        [] {
            return std::make_unique<llm::FunctionChatBackend>([](const std::vector<llm::ChatMessage>& messages) {
                const auto& user = messages[1].content;
                const auto at = user.find("question number ");
                const std::string n = at == std::string::npos ? "0" : user.substr(at + 16, 1);
                const std::string query = "SELECT ?c WHERE { ?c a <http://dbpedia.org/ontology/City> } LIMIT " + n;
                const bool executed = user.find("Action: execute_sparql") != std::string::npos;
                return Result<std::string, llm::LlmError>(executed ? std::string("Thought: done\nAction: stop()")
                                                                   : "Thought: run\nAction: execute_sparql(" + query + ")");
            });
        },
        log);
    HttpServer server(*service, 4);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::thread listener([&] { server.listen(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    auto get = [&](const std::string& question) {
        http::Request req;
        req.url = base + "/text2sparql?dataset=" + http::url_encode(testkit::kDbpediaDatasetId) +
                  "&question=" + http::url_encode(question);
        req.timeout = std::chrono::seconds(20);
        return http::send(req);
    };

    auto single = get("Who are the founders of the company? question number 7");
    ASSERT_TRUE(single);
    EXPECT_EQ(single->status, 200);
    auto body = json::parse(single->body);
    EXPECT_EQ(body["dataset"], testkit::kDbpediaDatasetId);
    EXPECT_EQ(body["question"], "Who are the founders of the company? question number 7");
    EXPECT_NE(body["query"].get<std::string>().find("LIMIT 7"), std::string::npos);

    http::Request bad;
    bad.url = base + "/text2sparql?dataset=" + http::url_encode("https://example.org/unknown") + "&question=x";
    auto unknown = http::send(bad);
    ASSERT_TRUE(unknown);
    EXPECT_EQ(unknown->status, 400);

    std::vector<std::future<Result<http::Response, http::Failure>>> inflight;
    for (int i = 1; i <= 4; ++i) {
        inflight.push_back(std::async(std::launch::async, get, "¿Qué ciudad? question number " + std::to_string(i)));
    }
    for (int i = 1; i <= 4; ++i) {
        auto r = inflight[static_cast<std::size_t>(i - 1)].get();
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 200);
        auto b = json::parse(r->body);
        EXPECT_EQ(b["question"], "¿Qué ciudad? question number " + std::to_string(i));
        EXPECT_NE(b["query"].get<std::string>().find("LIMIT " + std::to_string(i)), std::string::npos);
    }
    server.stop();
    listener.join();

    auto records = tracelab::load_run_log(log);
    ASSERT_TRUE(records);
    ASSERT_EQ(records->records.size(), 5u);
    std::set<std::string> ids;
    for (const auto& r : records->records) {
        ids.insert(r.runId);
        const auto n = r.question.substr(r.question.size() - 1);
        for (const auto& step : r.trace) {
            if (step.kind == ActionKind::ExecuteSparql) {
                EXPECT_NE(step.argument.find("LIMIT " + n), std::string::npos);
            }
        }
        EXPECT_EQ(r.origin, tracelab::RunOrigin::Stop);
    }
    EXPECT_EQ(ids.size(), 5u);
}

TEST_F(ServiceTest, ConfigOpensRealIndexes) {
    auto doc = minimal_config();
    doc["datasets"][0]["endpoint"] = kg_->endpoint().endpoint_url();
    doc["datasets"][0]["schemaIndex"] = (kg_->index_root() / "schema").string();
    doc["datasets"][0]["entityIndexes"] = {{"en", (kg_->index_root() / "entities-en").string()},
                                           {"es", (kg_->index_root() / "entities-es").string()}};
    auto cfg = parse_config(doc, temp_dir("real"));
    ASSERT_TRUE(cfg) << problems_of(cfg);
    auto datasets = open_datasets(*cfg);
    ASSERT_TRUE(datasets) << datasets.error();
    ASSERT_EQ(datasets->size(), 1u);
    EXPECT_EQ((*datasets)[0].entityIndexByLanguage.size(), 2u);
    EXPECT_GT((*datasets)[0].schemaIndex->size(), 0u);
}
