#include "t2s/llm/chat.hpp"

#include <algorithm>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "t2s/common/http_client.hpp"
#include "t2s/common/text.hpp"

namespace t2s::llm {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::string_view to_string(LlmError::Kind kind) {
    switch (kind) {
        case LlmError::Kind::Timeout: return "Timeout";
        case LlmError::Kind::Transport: return "Transport";
        case LlmError::Kind::ProviderError: return "ProviderError";
        case LlmError::Kind::ScriptExhausted: return "ScriptExhausted";
        case LlmError::Kind::Configuration: return "Configuration";
    }
    return "Transport";
}

std::vector<std::string> validate(const LlmConfig& config) {
    std::vector<std::string> problems;
    if (config.baseUrl.empty()) {
        problems.push_back("llm.baseUrl is missing");
    } else if (!http::parse_url(config.baseUrl)) {
        problems.push_back("llm.baseUrl is not an http(s) URL: " + config.baseUrl);
    }
    if (config.model.empty()) problems.push_back("llm.model is missing");
    if (!(config.temperature >= 0.0)) problems.push_back("llm.temperature must be >= 0");
    if (config.maxOutputTokens <= 0) problems.push_back("llm.maxOutputTokens must be positive");
    if (config.requestTimeout.count() <= 0) problems.push_back("llm.requestTimeoutSeconds must be positive");
    return problems;
}

namespace {

std::optional<std::string> api_key(const LlmConfig& config) {
    if (config.apiKeyEnvVar.empty()) return std::string{};
    const char* value = std::getenv(config.apiKeyEnvVar.c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
}

}  // namespace

RemoteChatBackend::RemoteChatBackend(LlmConfig config) : config_(std::move(config)) {}

Result<std::unique_ptr<RemoteChatBackend>, LlmError> RemoteChatBackend::create(LlmConfig config) {
    auto problems = validate(config);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
        return LlmError{LlmError::Kind::Configuration, joined};
    }
    if (!api_key(config)) {
        return LlmError{LlmError::Kind::Configuration, "environment variable " + config.apiKeyEnvVar + " is not set"};
    }
    return std::make_unique<RemoteChatBackend>(std::move(config));
}

Result<std::string, LlmError> RemoteChatBackend::complete(const std::vector<ChatMessage>& messages,
                                                          std::optional<std::chrono::milliseconds> timeout) {
    using Kind = LlmError::Kind;
    // checked per call too: the variable can disappear after startup
    auto key = api_key(config_);
    if (!key) return LlmError{Kind::Configuration, "environment variable " + config_.apiKeyEnvVar + " is not set"};

    nlohmann::json body{{"model", config_.model},
                        {"temperature", config_.temperature},
                        {"max_tokens", config_.maxOutputTokens}};
    auto& out = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) out.push_back({{"role", to_string(m.role)}, {"content", m.content}});

    http::Request req;
    req.method = http::Method::Post;
    std::string base = config_.baseUrl;
    while (!base.empty() && base.back() == '/') base.pop_back();
    req.url = base + "/chat/completions";
    req.contentType = "application/json";
    req.body = body.dump();
    req.timeout = timeout ? std::min(*timeout, config_.requestTimeout) : config_.requestTimeout;
    if (!key->empty()) req.headers.emplace_back("Authorization", "Bearer " + *key);

    auto response = http::send(req);
    if (!response) {
        const auto& f = response.error();
        return LlmError{f.kind == http::FailureKind::Timeout ? Kind::Timeout : Kind::Transport, f.message};
    }
    const int status = response->status;
    if (status < 200 || status >= 300) {
        return LlmError{Kind::ProviderError, std::string(text::utf8_prefix(response->body, 500)), status};
    }
    const auto doc = nlohmann::json::parse(response->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty()) {
        return LlmError{Kind::ProviderError, "response has no choices: " + std::string(text::utf8_prefix(response->body, 200)),
                        status};
    }
    const auto& choice = doc["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string()) {
        return LlmError{Kind::ProviderError, "choice has no message content", status};
    }
    return choice["message"]["content"].get<std::string>();
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<std::string> responses) : responses_(std::move(responses)) {}

Result<std::string, LlmError> ScriptedChatBackend::complete(const std::vector<ChatMessage>& messages,
                                                            std::optional<std::chrono::milliseconds>) {
    std::lock_guard lock(mutex_);
    received_.push_back(messages);
    if (next_ >= responses_.size()) {
        return LlmError{LlmError::Kind::ScriptExhausted,
                        "script exhausted after " + std::to_string(responses_.size()) + " responses"};
    }
    return responses_[next_++];
}

std::vector<std::vector<ChatMessage>> ScriptedChatBackend::received() const {
    std::lock_guard lock(mutex_);
    return received_;
}

std::size_t ScriptedChatBackend::calls() const {
    std::lock_guard lock(mutex_);
    return received_.size();
}

std::size_t ScriptedChatBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return responses_.size() - next_;
}

}  // namespace t2s::llm
