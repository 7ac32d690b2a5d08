#include "fixture_server.hpp"

#include <httplib.h>

#include <stdexcept>

namespace t2s::testkit {

FixtureServer::FixtureServer() : server_(std::make_unique<httplib::Server>()) {}

FixtureServer::~FixtureServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

void FixtureServer::get(const std::string& pattern, Handler handler) {
    server_->Get(pattern, std::move(handler));
}

void FixtureServer::post(const std::string& pattern, Handler handler) {
    server_->Post(pattern, std::move(handler));
}

void FixtureServer::start() {
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("fixture server could not bind");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

std::string FixtureServer::url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
}

SparqlFixture::SparqlFixture(TripleStore store) : store_(std::move(store)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); };
    server_.get("/sparql", handler);
    server_.post("/sparql", handler);
    server_.start();
}

void SparqlFixture::force_response(int status, std::string body) {
    std::lock_guard lock(mutex_);
    forcedStatus_ = status;
    forcedBody_ = std::move(body);
}

void SparqlFixture::clear_forced_response() { force_response(0, {}); }

std::string SparqlFixture::last_query() const {
    std::lock_guard lock(mutex_);
    return lastQuery_;
}

void SparqlFixture::handle(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    const std::string query = req.has_param("query") ? req.get_param_value("query") : std::string();
    int forcedStatus = 0;
    std::string forcedBody;
    {
        std::lock_guard lock(mutex_);
        lastQuery_ = query;
        forcedStatus = forcedStatus_;
        forcedBody = forcedBody_;
    }
    if (const auto delay = delayMs_.load(); delay > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    if (forcedStatus != 0) {
        res.status = forcedStatus;
        res.set_content(forcedBody, "text/plain");
        return;
    }
    if (query.empty()) {
        res.status = 400;
        res.set_content("Missing 'query' parameter", "text/plain");
        return;
    }
    auto results = store_.query(query);
    if (!results) {
        res.status = 400;
        res.set_content(results.error().message, "text/plain");
        return;
    }
    res.set_content(to_results_json(*results), "application/sparql-results+json");
}

std::string fixture_path(const std::string& name) { return std::string(T2S_FIXTURE_DIR) + "/" + name; }

}  // namespace t2s::testkit
