// t2s: serve the /text2sparql endpoint, build indexes, probe them, and
// analyze run logs.

#include <csignal>
#include <filesystem>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "t2s/agent/agent.hpp"
#include "t2s/grounding/build.hpp"
#include "t2s/llm/chat.hpp"
#include "t2s/service/config.hpp"
#include "t2s/service/service.hpp"
#include "t2s/tracelab/analytics.hpp"
#include "t2s/tracelab/report.hpp"
#include "t2s/tracelab/run_log.hpp"

using namespace t2s;

namespace {

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int fail(const std::string& message) {
    std::cerr << "t2s: " << message << "\n";
    return 1;
}

struct ConfigArgs {
    std::string path;
};

Result<service::AppConfig, std::string> config_from(const ConfigArgs& args) {
    auto cfg = service::load_config(args.path);
    if (!cfg) return cfg.error().joined();
    return std::move(*cfg);
}

std::unique_ptr<grounding::EmbeddingProvider> embedder_from(const std::string& configPath) {
    if (configPath.empty()) return std::make_unique<grounding::HashingEmbeddingProvider>();
    auto cfg = service::load_config(configPath);
    if (!cfg) return nullptr;
    return service::make_embedding_provider(cfg->embedding);
}

int serve(const ConfigArgs& args) {
    auto cfg = config_from(args);
    if (!cfg) return fail("invalid config:\n" + cfg.error());
    // Fail at startup, not on the first request, when the model is unreachable by config.
    auto probe = llm::RemoteChatBackend::create(cfg->llm);
    if (!probe) return fail("llm: " + probe.error().message);
    auto datasets = service::open_datasets(*cfg);
    if (!datasets) return fail(datasets.error());

    std::shared_ptr<grounding::EmbeddingProvider> embedder = service::make_embedding_provider(cfg->embedding);
    auto log = std::make_shared<tracelab::RunLog>(cfg->logPath);
    service::ServiceOptions options;
    options.totalBudget = cfg->totalBudget;
    options.agent = cfg->agent;
    const llm::LlmConfig llmConfig = cfg->llm;
    service::Text2SparqlService svc(
        std::move(*datasets),
        [llmConfig]() -> std::unique_ptr<llm::ChatBackend> {
            auto backend = llm::RemoteChatBackend::create(llmConfig);
            if (!backend) return nullptr;
            return std::move(*backend);
        },
        embedder, log, options);

    service::HttpServer server(svc, cfg->threads);
    const int port = server.bind(cfg->listenHost, cfg->listenPort);
    if (port < 0) return fail("cannot bind " + cfg->listenHost + ":" + std::to_string(cfg->listenPort));
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << cfg->listenHost << ":" << port << " (" << cfg->datasets.size()
              << " datasets, log " << cfg->logPath.string() << ")\n";
    server.listen();
    g_server = nullptr;
    return 0;
}

int ask(const ConfigArgs& args, const std::string& datasetId, const std::string& question, bool showTrace) {
    auto cfg = config_from(args);
    if (!cfg) return fail("invalid config:\n" + cfg.error());
    auto backend = llm::RemoteChatBackend::create(cfg->llm);
    if (!backend) return fail("llm: " + backend.error().message);
    auto datasets = service::open_datasets(*cfg);
    if (!datasets) return fail(datasets.error());
    const agent::DatasetRef* dataset = nullptr;
    for (const auto& d : *datasets) {
        if (d.id == datasetId || d.name == datasetId) dataset = &d;
    }
    if (!dataset) return fail("unknown dataset " + datasetId);
    auto embedder = service::make_embedding_provider(cfg->embedding);
    agent::AgentDeps deps{backend->get(), embedder.get()};
    auto outcome = agent::run_agent(question, *dataset, deps, cfg->totalBudget, cfg->agent);
    if (showTrace) {
        for (const auto& step : outcome.trace) {
            std::cerr << "-- step " << step.index << (step.rejected ? " (rejected)" : "")
                      << (step.wasRepeatIntercepted ? " (repeat)" : "") << "\nThought: " << step.thought
                      << "\nAction: " << llm::format_invocation(step.action) << "\n"
                      << step.observation << "\n";
        }
        for (const auto& note : outcome.notes) std::cerr << "note: " << note << "\n";
        std::cerr << "origin: " << tracelab::to_string(outcome.origin) << ", " << outcome.iterations
                  << " iterations, " << outcome.totalDurationMs << " ms\n";
    }
    if (!outcome.has_query()) return fail("no query produced");
    std::cout << outcome.finalQuery << "\n";
    return 0;
}

kg::EndpointConfig endpoint_config(const std::string& url, int timeoutSeconds) {
    kg::EndpointConfig config;
    config.queryUrl = url;
    config.requestTimeout = std::chrono::seconds(timeoutSeconds);
    return config;
}

void print_matches(const std::vector<grounding::ScoredMatch>& matches) {
    std::size_t rank = 0;
    for (const auto& m : matches) {
        std::printf("%2zu. %.6f <%s> \"%s\" %s\n", ++rank, m.score, m.iri.str().c_str(), m.label.c_str(),
                    m.kind.c_str());
    }
}

Result<std::vector<tracelab::RunRecord>, std::string> records_from(const std::filesystem::path& path) {
    auto loaded = tracelab::load_run_log(path);
    if (!loaded) return loaded.error();
    for (const auto& warning : loaded->warnings) std::cerr << path.string() << ": " << warning << "\n";
    return std::move(loaded->records);
}

// An explicit log path wins; otherwise the config's logPath.
Result<std::filesystem::path, std::string> log_path(const std::string& explicitPath, const ConfigArgs& args) {
    if (!explicitPath.empty()) return std::filesystem::path(explicitPath);
    auto cfg = config_from(args);
    if (!cfg) return "no run log given and no usable config:\n" + cfg.error();
    return cfg->logPath;
}

tracelab::GroupBy group_by(bool byLanguage) {
    return byLanguage ? tracelab::GroupBy::DatasetAndLanguage : tracelab::GroupBy::Dataset;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text-to-SPARQL agent: service, index builders and run-log analytics"};
    app.require_subcommand(1);

    ConfigArgs cfgArgs;
    auto* serveCmd = app.add_subcommand("serve", "Run the HTTP service");
    serveCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");

    std::string datasetId, question;
    bool showTrace = false;
    auto* askCmd = app.add_subcommand("ask", "Answer one question and print the query");
    askCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");
    askCmd->add_option("-d,--dataset", datasetId, "Dataset id or name")->required();
    askCmd->add_option("question", question)->required();
    askCmd->add_flag("--trace", showTrace, "Print the exploration trace to stderr");

    std::string endpoint, outDir, embedConfig;
    std::string language;
    int endpointTimeout = 300;
    std::size_t pageSize = 10000;
    auto* schemaCmd = app.add_subcommand("build-schema-index", "Harvest the ontology and build the schema index");
    schemaCmd->add_option("-e,--endpoint", endpoint)->required();
    schemaCmd->add_option("-o,--out", outDir)->required();
    schemaCmd->add_option("--lang", language, "Preferred label language")->default_val("en");
    schemaCmd->add_option("-c,--config", embedConfig, "Take the embedding provider from this config");
    schemaCmd->add_option("--timeout", endpointTimeout, "Endpoint timeout in seconds")->capture_default_str();
    schemaCmd->add_option("--page-size", pageSize)->capture_default_str();

    auto* entityCmd = app.add_subcommand("build-entity-index", "Harvest labeled entities and build a BM25 index");
    entityCmd->add_option("-e,--endpoint", endpoint)->required();
    entityCmd->add_option("-o,--out", outDir)->required();
    entityCmd->add_option("--lang", language, "Label language; omit to index every label");
    entityCmd->add_option("--timeout", endpointTimeout, "Endpoint timeout in seconds")->capture_default_str();
    entityCmd->add_option("--page-size", pageSize)->capture_default_str();

    std::string indexDir, query, kindName;
    std::size_t limit = 10;
    auto* searchSchemaCmd = app.add_subcommand("search-schema", "Hybrid search over a schema index");
    searchSchemaCmd->add_option("-i,--index", indexDir)->required();
    searchSchemaCmd->add_option("query", query)->required();
    searchSchemaCmd->add_option("--kind", kindName, "class|property|objectProperty|datatypeProperty");
    searchSchemaCmd->add_option("-n,--limit", limit)->capture_default_str();
    searchSchemaCmd->add_option("-c,--config", embedConfig, "Take the embedding provider from this config");

    auto* searchEntityCmd = app.add_subcommand("search-entity", "BM25 search over an entity index");
    searchEntityCmd->add_option("-i,--index", indexDir)->required();
    searchEntityCmd->add_option("query", query)->required();
    searchEntityCmd->add_option("-n,--limit", limit)->capture_default_str();

    std::string logPath;
    bool byLanguage = false;
    auto* summarizeCmd = app.add_subcommand("summarize", "Mean and std of time and steps per dataset");
    summarizeCmd->add_option("log", logPath, "Run log (default: logPath of the config)");
    summarizeCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");
    summarizeCmd->add_flag("--by-language", byLanguage);
    auto* freqCmd = app.add_subcommand("freq", "Action counts per step");
    freqCmd->add_option("log", logPath, "Run log (default: logPath of the config)");
    freqCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");
    auto* cumulativeCmd = app.add_subcommand("cumulative", "Cumulative action counts per category");
    cumulativeCmd->add_option("log", logPath, "Run log (default: logPath of the config)");
    cumulativeCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");
    auto* transitionsCmd = app.add_subcommand("transitions", "Action transition counts and ratios");
    transitionsCmd->add_option("log", logPath, "Run log (default: logPath of the config)");
    transitionsCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");

    std::string groupA, groupB, metric = "steps";
    std::vector<double> sampleA, sampleB;
    auto* ttestCmd = app.add_subcommand("ttest", "Welch t-test between two groups or two summaries");
    ttestCmd->add_option("--log", logPath, "Run log; compare --a and --b groups");
    ttestCmd->add_option("-c,--config", cfgArgs.path, "Take the run log from this config");
    ttestCmd->add_option("--a", groupA, "Group key in the log");
    ttestCmd->add_option("--b", groupB, "Group key in the log");
    ttestCmd->add_option("--metric", metric)->check(CLI::IsMember({"steps", "time"}))->capture_default_str();
    ttestCmd->add_option("--sample-a", sampleA, "n mean std")->expected(3);
    ttestCmd->add_option("--sample-b", sampleB, "n mean std")->expected(3);
    ttestCmd->add_flag("--by-language", byLanguage);

    std::string format = "csv";
    auto* reportCmd = app.add_subcommand("report", "Write every analytics table to a directory");
    reportCmd->add_option("log", logPath, "Run log (default: logPath of the config)");
    reportCmd->add_option("-c,--config", cfgArgs.path, "Config file (default: $T2S_CONFIG)");
    reportCmd->add_option("-o,--out", outDir)->required();
    reportCmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    reportCmd->add_flag("--by-language", byLanguage);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serveCmd) return serve(cfgArgs);
        if (*askCmd) return ask(cfgArgs, datasetId, question, showTrace);

        if (*schemaCmd) {
            auto embedder = embedder_from(embedConfig);
            if (!embedder) return fail("invalid config " + embedConfig);
            kg::SparqlClient client(endpoint_config(endpoint, endpointTimeout));
            auto built = grounding::build_schema_index_from_graph(client, *embedder, outDir,
                                                                  kg::HarvestOptions{pageSize, language});
            if (!built) return fail(built.error());
            std::cerr << "indexed " << *built << " schema entities into " << outDir << "\n";
            return 0;
        }
        if (*entityCmd) {
            kg::SparqlClient client(endpoint_config(endpoint, endpointTimeout));
            std::optional<std::string> lang;
            if (!language.empty()) lang = language;
            kg::HarvestOptions harvest;
            harvest.pageSize = pageSize;
            auto built = grounding::build_entity_index_from_graph(client, lang, outDir, {}, harvest);
            if (!built) return fail(built.error());
            std::cerr << "ingested " << built->ingested << " labels, " << built->documents << " entities, "
                      << built->terms << " terms, skipped " << built->skippedEmptyName << " blank names\n";
            return 0;
        }
        if (*searchSchemaCmd) {
            auto index = grounding::SchemaIndex::load(indexDir);
            if (!index) return fail(index.error().message);
            std::optional<grounding::KindFilter> filter;
            if (kindName == "class") filter = grounding::KindFilter::Class;
            else if (kindName == "property") filter = grounding::KindFilter::Property;
            else if (kindName == "objectProperty") filter = grounding::KindFilter::ObjectProperty;
            else if (kindName == "datatypeProperty") filter = grounding::KindFilter::DatatypeProperty;
            else if (!kindName.empty()) return fail("unknown kind " + kindName);
            auto embedder = embedder_from(embedConfig);
            if (!embedder) return fail("invalid config " + embedConfig);
            auto result = index->hybrid_search(query, embedder.get(), filter, limit);
            if (result.degraded) std::cerr << "sparse only: " << result.degradedReason << "\n";
            print_matches(result.matches);
            return 0;
        }
        if (*searchEntityCmd) {
            auto index = grounding::EntityIndex::open(indexDir);
            if (!index) return fail(index.error().message);
            print_matches(index->search(query, limit));
            return 0;
        }

        if (*ttestCmd) {
            tracelab::SampleSummary a, b;
            if (!sampleA.empty() && !sampleB.empty()) {
                a = {sampleA[0], sampleA[1], sampleA[2]};
                b = {sampleB[0], sampleB[1], sampleB[2]};
            } else if (!groupA.empty() && !groupB.empty()) {
                auto path = log_path(logPath, cfgArgs);
                if (!path) return fail(path.error());
                auto records = records_from(*path);
                if (!records) return fail(records.error());
                const auto summary = tracelab::summarize(*records, group_by(byLanguage));
                auto pick = [&](const std::string& key, tracelab::SampleSummary& out) {
                    auto it = summary.find(key);
                    if (it == summary.end()) return false;
                    const auto& s = it->second;
                    out = metric == "steps" ? tracelab::SampleSummary{double(s.n), s.meanSteps, s.stdSteps}
                                            : tracelab::SampleSummary{double(s.n), s.meanTime, s.stdTime};
                    return true;
                };
                if (!pick(groupA, a)) return fail("no group " + groupA);
                if (!pick(groupB, b)) return fail("no group " + groupB);
            } else {
                return fail("ttest needs --sample-a and --sample-b, or --a and --b with a run log");
            }
            auto result = tracelab::welch_t_test(a, b);
            if (!result) return fail(result.error().message);
            std::printf("t=%.4f df=%.2f p=%.5f\n", result->t, result->df, result->pTwoTailed);
            return 0;
        }

        auto path = log_path(logPath, cfgArgs);
        if (!path) return fail(path.error());
        auto records = records_from(*path);
        if (!records) return fail(records.error());
        if (*reportCmd) {
            auto written = tracelab::emit_report(
                *records, outDir, format == "json" ? tracelab::ReportFormat::Json : tracelab::ReportFormat::Csv,
                group_by(byLanguage));
            if (!written) return fail(written.error());
            for (const auto& path : *written) std::cout << path.string() << "\n";
            return 0;
        }
        tracelab::Table table;
        if (*summarizeCmd) table = tracelab::summary_table(tracelab::summarize(*records, group_by(byLanguage)));
        if (*freqCmd) table = tracelab::frequency_table(tracelab::action_frequency_by_step(*records));
        if (*cumulativeCmd) table = tracelab::cumulative_table(tracelab::cumulative_by_category(*records));
        if (*transitionsCmd) table = tracelab::transition_table(tracelab::transition_counts(*records));
        std::cout << tracelab::to_csv(table);
        return 0;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}
