// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

enum class MessageRole { system, user };

struct ChatMessage {
    MessageRole role = MessageRole::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

enum class ResponseFormat { text, json };

// A chat-completion request. Sampling is pinned: every request the engine
// issues goes out with temperature 0 and seed 42, and there is no way to
// construct one that doesn't. top_p is never sent.
class ChatRequest {
public:
    static constexpr double kTemperature = 0.0;
    static constexpr int kSeed = 42;

    ChatRequest(std::string tag, std::vector<ChatMessage> messages, ResponseFormat format = ResponseFormat::text)
        : tag(std::move(tag)), messages(std::move(messages)), response_format(format) {}

    double temperature() const { return kTemperature; }
    int seed() const { return kSeed; }

    // Concatenated message contents; what substring script keys match against.
    std::string joined_content() const;

    std::string tag; // template id the request was rendered from
    std::vector<ChatMessage> messages;
    ResponseFormat response_format;
};

struct ProviderProfile {
    std::string name;
    std::string base_url;
    std::string model_id;
    std::string api_key_env; // name of the variable, never the key
    bool supports_json_mode = false;

    static ProviderProfile from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Returns the assistant message content. Throws TransientError for
    // retryable failures, any other GatewayError for permanent ones.
    virtual std::string send(const ProviderProfile& profile, const ChatRequest& request) = 0;
};

// One recorded prompt/response pair.
struct Exchange {
    int turn = 0;
    std::string phase;
    std::string role; // questioner / responder / judge
    std::string tag;
    std::vector<ChatMessage> messages;
    std::string reply;
    std::string error;
};

struct SessionEvent {
    int turn = 0;
    std::string kind; // "degradation", "warning", ...
    std::string message;

    bool operator==(const SessionEvent&) const = default;
};

// Per-session sink for exchanges and events. Not thread-safe: a session owns
// its log.
struct ExchangeLog {
    int turn = 0;
    std::string phase;
    std::vector<Exchange> exchanges;
    std::vector<SessionEvent> events;

    void event(std::string kind, std::string message) {
        events.push_back({turn, std::move(kind), std::move(message)});
    }
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Removes a ```lang ... ``` wrapper if present and parses a single JSON value.
std::optional<nlohmann::json> parse_json_reply(std::string_view raw);

inline constexpr int kDefaultMaxReparse = 2;

class Gateway {
public:
    explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy = {}, Sleeper sleeper = {});

    // Sends with bounded retries on TransientError. Records the exchange in
    // `log` when one is given.
    std::string complete(const ProviderProfile& profile, const ChatRequest& request,
                         ExchangeLog* log = nullptr, std::string_view role = {}) const;

    // Asks until the reply parses as JSON, re-asking up to max_reparse times
    // with a correction appended. Throws JsonReplyError with the last raw
    // reply when every attempt fails.
    nlohmann::json complete_json(const ProviderProfile& profile, ChatRequest request,
                                 int max_reparse = kDefaultMaxReparse, ExchangeLog* log = nullptr,
                                 std::string_view role = {}) const;

    const RetryPolicy& retry_policy() const { return policy_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    RetryPolicy policy_;
    Sleeper sleeper_;
};

} // namespace turtlesoup
