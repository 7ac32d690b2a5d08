#include "t2s/common/http_client.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>

namespace t2s::http {

std::string Url::origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
}

std::optional<Url> parse_url(const std::string& url) {
    Url out;
    const auto schemeEnd = url.find("://");
    if (schemeEnd == std::string::npos) return std::nullopt;
    out.scheme = url.substr(0, schemeEnd);
    for (auto& c : out.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (out.scheme != "http" && out.scheme != "https") return std::nullopt;

    const auto authorityStart = schemeEnd + 3;
    const auto pathStart = url.find_first_of("/?", authorityStart);
    const std::string authority = url.substr(
        authorityStart, pathStart == std::string::npos ? std::string::npos : pathStart - authorityStart);
    if (authority.empty()) return std::nullopt;

    const auto colon = authority.rfind(':');
    if (colon != std::string::npos && authority.find(']') == std::string::npos) {
        out.host = authority.substr(0, colon);
        const std::string portText = authority.substr(colon + 1);
        int port = 0;
        const auto [ptr, ec] = std::from_chars(portText.data(), portText.data() + portText.size(), port);
        if (ec != std::errc{} || ptr != portText.data() + portText.size() || port <= 0 || port > 65535) {
            return std::nullopt;
        }
        out.port = port;
    } else {
        out.host = authority;
        out.port = out.scheme == "https" ? 443 : 80;
    }
    if (out.host.empty()) return std::nullopt;

    out.path = pathStart == std::string::npos ? "/" : url.substr(pathStart);
    if (out.path.front() == '?') out.path.insert(out.path.begin(), '/');
    return out;
}

std::string url_encode(std::string_view value) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size() * 3);
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0x0F]);
        }
    }
    return out;
}

std::string url_decode(std::string_view value) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        const char c = value[i];
        if (c == '+') {
            out.push_back(' ');
        } else if (c == '%' && i + 2 < value.size() && hex(value[i + 1]) >= 0 &&
                   hex(value[i + 2]) >= 0) {
            out.push_back(static_cast<char>(hex(value[i + 1]) * 16 + hex(value[i + 2])));
            i += 2;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string form_encode(const std::vector<std::pair<std::string, std::string>>& params) {
    std::string out;
    for (const auto& [key, value] : params) {
        if (!out.empty()) out.push_back('&');
        out += url_encode(key);
        out.push_back('=');
        out += url_encode(value);
    }
    return out;
}

Result<Response, Failure> send(const Request& request) {
    const auto url = parse_url(request.url);
    if (!url) return Failure{FailureKind::InvalidUrl, "invalid URL: " + request.url};

    httplib::Client client(url->origin());
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    client.set_keep_alive(false);
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [name, value] : request.headers) headers.emplace(name, value);

    const auto started = std::chrono::steady_clock::now();
    httplib::Result result = request.method == Method::Get
                                 ? client.Get(url->path, headers)
                                 : client.Post(url->path, headers, request.body,
                                               request.contentType.empty()
                                                   ? "application/octet-stream"
                                                   : request.contentType);
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!result) {
        const auto err = result.error();
        // A read timeout surfaces as a generic read failure; the elapsed time
        // tells the two apart.
        const bool timedOut =
            err == httplib::Error::ConnectionTimeout ||
            ((err == httplib::Error::Read || err == httplib::Error::Write) &&
             elapsed >= request.timeout * 9 / 10);
        FailureKind kind = FailureKind::Other;
        if (timedOut) {
            kind = FailureKind::Timeout;
        } else if (err == httplib::Error::Connection || err == httplib::Error::SSLConnection ||
                   err == httplib::Error::Read || err == httplib::Error::Write) {
            kind = FailureKind::Connection;
        }
        return Failure{kind, httplib::to_string(err)};
    }

    Response response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [name, value] : result->headers) {
        std::string lowered = name;
        for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        response.headers[lowered] = value;
    }
    return response;
}

}  // namespace t2s::http
