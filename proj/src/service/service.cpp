#include "t2s/service/service.hpp"

#include <httplib.h>

#include <cstdio>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

namespace t2s::service {

using nlohmann::json;
using std::chrono::milliseconds;

namespace {

HttpReply error_reply(int status, const std::string& message, const std::string& parameter) {
    json body{{"error", message}};
    if (!parameter.empty()) body["parameter"] = parameter;
    return {status, body.dump(), {}};
}

std::string random_hex(std::size_t bytes) {
    std::random_device rd;
    std::string out;
    for (std::size_t i = 0; i < bytes; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>(rd() & 0xff));
        out += buf;
    }
    return out;
}

}  // namespace

Text2SparqlService::Text2SparqlService(std::vector<agent::DatasetRef> datasets, ChatBackendFactory llmFactory,
                                       std::shared_ptr<grounding::EmbeddingProvider> embedder,
                                       std::shared_ptr<tracelab::RunLog> log, ServiceOptions options)
    : datasets_(std::move(datasets)),
      llmFactory_(std::move(llmFactory)),
      embedder_(std::move(embedder)),
      log_(std::move(log)),
      options_(std::move(options)),
      runPrefix_(random_hex(4)) {}

std::string Text2SparqlService::next_run_id() {
    return runPrefix_ + "-" + std::to_string(++runCounter_);
}

HttpReply Text2SparqlService::handle(const std::multimap<std::string, std::string>& params,
                                     std::chrono::steady_clock::time_point received) {
    auto param = [&](const std::string& key) -> std::optional<std::string> {
        auto it = params.find(key);
        if (it == params.end()) return std::nullopt;
        return it->second;
    };
    const auto datasetId = param("dataset");
    const auto question = param("question");
    if (!datasetId || datasetId->empty()) return error_reply(400, "missing parameter: dataset", "dataset");
    const agent::DatasetRef* dataset = nullptr;
    for (const auto& d : datasets_) {
        if (d.id == *datasetId) dataset = &d;
    }
    if (dataset == nullptr) {
        auto reply = error_reply(400, "unknown dataset: " + *datasetId, "dataset");
        json body = json::parse(reply.body);
        body["known"] = json::array();
        for (const auto& d : datasets_) body["known"].push_back(d.id);
        reply.body = body.dump();
        return reply;
    }
    if (!question || question->find_first_not_of(" \t\r\n") == std::string::npos) {
        return error_reply(400, "missing parameter: question", "question");
    }

    auto llm = llmFactory_ ? llmFactory_() : nullptr;
    if (!llm) return error_reply(500, "no language model backend available", "");

    const auto elapsed = std::chrono::duration_cast<milliseconds>(std::chrono::steady_clock::now() - received);
    const auto budget = std::max(milliseconds(1), options_.totalBudget - elapsed - options_.responseMargin);
    agent::AgentDeps deps{llm.get(), embedder_.get()};
    const auto outcome = agent::run_agent(*question, *dataset, deps, budget, options_.agent);

    const std::string runId = next_run_id();
    if (log_) {
        auto appended = log_->append(agent::make_run_record(outcome, runId, *dataset, *question));
        if (!appended) std::cerr << "run log: " << appended.error() << "\n";
    }

    HttpReply reply;
    reply.headers[kRunIdHeader] = runId;
    reply.headers[kOriginHeader] = std::string(tracelab::to_string(outcome.origin));
    std::string query = outcome.finalQuery;
    if (!outcome.has_query()) {
        query = kPlaceholderQuery;
        reply.headers[kWarningHeader] = "no query could be produced; placeholder returned";
    }
    reply.body = json{{"dataset", *datasetId}, {"question", *question}, {"query", query}}.dump(
        -1, ' ', false, json::error_handler_t::replace);
    return reply;
}

void Text2SparqlService::mount(httplib::Server& server) {
    server.Get("/text2sparql", [this](const httplib::Request& req, httplib::Response& res) {
        const auto received = std::chrono::steady_clock::now();
        HttpReply reply;
        try {
            reply = handle(req.params, received);
        } catch (const std::exception& e) {
            reply = error_reply(500, std::string("internal error: ") + e.what(), "");
        }
        res.status = reply.status;
        for (const auto& [k, v] : reply.headers) res.set_header(k, v);
        res.set_content(reply.body, "application/json");
    });
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        json datasets = json::array();
        for (const auto& d : datasets_) datasets.push_back(d.id);
        res.set_content(json{{"status", "ok"}, {"datasets", datasets}}.dump(), "application/json");
    });
}

HttpServer::HttpServer(Text2SparqlService& service, int threads) : server_(std::make_unique<httplib::Server>()) {
    const auto n = static_cast<std::size_t>(std::max(1, threads));
    server_->new_task_queue = [n] { return new httplib::ThreadPool(n); };
    server_->set_write_timeout(30, 0);
    service.mount(*server_);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::wait_until_ready() { server_->wait_until_ready(); }

void HttpServer::stop() {
    if (server_->is_running()) server_->stop();
}

}  // namespace t2s::service
