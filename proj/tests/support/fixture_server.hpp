#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "triple_store.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace t2s::testkit {

/// httplib server on 127.0.0.1 with an ephemeral port, running on its own
/// thread for the lifetime of the object.
class FixtureServer {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    FixtureServer();
    ~FixtureServer();
    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    void get(const std::string& pattern, Handler handler);
    void post(const std::string& pattern, Handler handler);
    /// Starts listening. Routes must be registered first.
    void start();

    int port() const { return port_; }
    std::string url(const std::string& path) const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

/// SPARQL 1.1 protocol endpoint over a TripleStore at /sparql. Parse errors
/// answer 400 with the message as text/plain. Optional per-request delay and
/// a forced status let tests drive the client's error paths.
class SparqlFixture {
public:
    explicit SparqlFixture(TripleStore store);

    std::string endpoint_url() const { return server_.url("/sparql"); }

    void set_delay(std::chrono::milliseconds delay) { delayMs_ = delay.count(); }
    /// Non-zero: every request answers with this status and body.
    void force_response(int status, std::string body);
    void clear_forced_response();

    int request_count() const { return requests_.load(); }
    std::string last_query() const;

private:
    void handle(const httplib::Request& req, httplib::Response& res);

    TripleStore store_;
    FixtureServer server_;
    std::atomic<long long> delayMs_{0};
    std::atomic<int> requests_{0};
    mutable std::mutex mutex_;
    int forcedStatus_ = 0;
    std::string forcedBody_;
    std::string lastQuery_;
};

std::string fixture_path(const std::string& name);

}  // namespace t2s::testkit
