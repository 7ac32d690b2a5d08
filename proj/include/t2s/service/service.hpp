#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "t2s/agent/agent.hpp"
#include "t2s/llm/chat.hpp"
#include "t2s/tracelab/run_log.hpp"

namespace httplib {
class Server;
}

namespace t2s::service {

/// Returned when no query could be produced at all, with a warning header.
inline constexpr const char* kPlaceholderQuery = "SELECT * WHERE { ?s ?p ?o } LIMIT 1";
inline constexpr const char* kWarningHeader = "X-T2S-Warning";
inline constexpr const char* kOriginHeader = "X-T2S-Origin";
inline constexpr const char* kRunIdHeader = "X-T2S-Run-Id";

struct HttpReply {
    int status = 200;
    std::string body;  // JSON
    std::map<std::string, std::string> headers;
};

/// One model backend per request, so scripted backends are never shared.
using ChatBackendFactory = std::function<std::unique_ptr<llm::ChatBackend>()>;

struct ServiceOptions {
    std::chrono::milliseconds totalBudget{std::chrono::seconds(600)};
    /// Kept back for serializing and sending the response.
    std::chrono::milliseconds responseMargin{1000};
    agent::AgentOptions agent;
};

class Text2SparqlService {
public:
    Text2SparqlService(std::vector<agent::DatasetRef> datasets, ChatBackendFactory llmFactory,
                       std::shared_ptr<grounding::EmbeddingProvider> embedder, std::shared_ptr<tracelab::RunLog> log,
                       ServiceOptions options);

    /// Handles one /text2sparql request given its decoded query parameters.
    /// `received` is when the request arrived; the agent gets what is left
    /// of the total budget from then.
    HttpReply handle(const std::multimap<std::string, std::string>& params,
                     std::chrono::steady_clock::time_point received = std::chrono::steady_clock::now());

    /// Registers GET /text2sparql and GET /health.
    void mount(httplib::Server& server);

    const std::vector<agent::DatasetRef>& datasets() const { return datasets_; }

private:
    std::string next_run_id();

    std::vector<agent::DatasetRef> datasets_;
    ChatBackendFactory llmFactory_;
    std::shared_ptr<grounding::EmbeddingProvider> embedder_;
    std::shared_ptr<tracelab::RunLog> log_;
    ServiceOptions options_;
    std::atomic<std::uint64_t> runCounter_{0};
    std::string runPrefix_;
};

/// httplib server running a service on a worker pool.
class HttpServer {
public:
    HttpServer(Text2SparqlService& service, int threads);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and returns the port (port 0 picks a free one), or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void wait_until_ready();
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace t2s::service
