#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "t2s/common/result.hpp"

namespace t2s::http {

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string path;    // always starts with '/', may carry "?query"

    /// "scheme://host:port", the form the HTTP client connects to.
    std::string origin() const;
};

/// Accepts http(s)://host[:port][/path][?query]. Returns nullopt otherwise.
std::optional<Url> parse_url(const std::string& url);

std::string url_encode(std::string_view value);
std::string url_decode(std::string_view value);
std::string form_encode(const std::vector<std::pair<std::string, std::string>>& params);

enum class Method { Get, Post };

struct Request {
    Method method = Method::Get;
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string contentType;
    std::chrono::milliseconds timeout{30000};
};

struct Response {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

enum class FailureKind { InvalidUrl, Connection, Timeout, Other };

struct Failure {
    FailureKind kind = FailureKind::Other;
    std::string message;
};

/// Performs one request on a fresh connection. Every transport outcome maps to
/// a Response (any status) or a Failure; nothing throws.
Result<Response, Failure> send(const Request& request);

}  // namespace t2s::http
