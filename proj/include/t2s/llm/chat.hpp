#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/common/result.hpp"

namespace t2s::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct LlmConfig {
    std::string baseUrl;
    std::string model;
    std::string apiKeyEnvVar = "OPENAI_API_KEY";
    double temperature = 0.0;
    int maxOutputTokens = 2048;
    std::chrono::milliseconds requestTimeout{120000};
};

/// Field-level problems, empty when the config is usable.
std::vector<std::string> validate(const LlmConfig& config);

struct LlmError {
    enum class Kind { Timeout, Transport, ProviderError, ScriptExhausted, Configuration };
    Kind kind = Kind::Transport;
    std::string message;
    int status = 0;  // HTTP status for ProviderError
};

std::string_view to_string(LlmError::Kind kind);

/// One chat completion. Implementations must be callable from several threads
/// at once unless stated otherwise.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual Result<std::string, LlmError> complete(const std::vector<ChatMessage>& messages,
                                                   std::optional<std::chrono::milliseconds> timeout = std::nullopt) = 0;
};

/// OpenAI-style POST {baseUrl}/chat/completions with a bearer key taken from
/// the environment at call time.
class RemoteChatBackend final : public ChatBackend {
public:
    explicit RemoteChatBackend(LlmConfig config);

    /// Fails with Configuration if the config is invalid or the key variable
    /// is unset. No request is made.
    static Result<std::unique_ptr<RemoteChatBackend>, LlmError> create(LlmConfig config);

    Result<std::string, LlmError> complete(const std::vector<ChatMessage>& messages,
                                           std::optional<std::chrono::milliseconds> timeout = std::nullopt) override;

    const LlmConfig& config() const { return config_; }

private:
    LlmConfig config_;
};

/// Returns registered responses in order and keeps every prompt it was sent.
/// Meant for one agent run.
class ScriptedChatBackend final : public ChatBackend {
public:
    explicit ScriptedChatBackend(std::vector<std::string> responses);

    Result<std::string, LlmError> complete(const std::vector<ChatMessage>& messages,
                                           std::optional<std::chrono::milliseconds> timeout = std::nullopt) override;

    std::vector<std::vector<ChatMessage>> received() const;
    std::size_t calls() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> responses_;
    std::vector<std::vector<ChatMessage>> received_;
    std::size_t next_ = 0;
};

/// Adapter for callers that want to compute the reply from the prompt.
class FunctionChatBackend final : public ChatBackend {
public:
    using Fn = std::function<Result<std::string, LlmError>(const std::vector<ChatMessage>&)>;
    explicit FunctionChatBackend(Fn fn) : fn_(std::move(fn)) {}

    Result<std::string, LlmError> complete(const std::vector<ChatMessage>& messages,
                                           std::optional<std::chrono::milliseconds> = std::nullopt) override {
        return fn_(messages);
    }

private:
    Fn fn_;
};

}  // namespace t2s::llm
