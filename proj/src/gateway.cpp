// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/gateway.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <thread>

namespace turtlesoup {

using nlohmann::json;

namespace {

constexpr std::string_view kJsonCorrection =
    "Your previous reply could not be parsed as JSON. Reply again with a single valid JSON value only, "
    "without code fences or any other text.";

void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

} // namespace

std::string ChatRequest::joined_content() const {
    std::string out;
    for (const auto& m : messages) {
        if (!out.empty()) out.push_back('\n');
        out += m.content;
    }
    return out;
}

ProviderProfile ProviderProfile::from_json(const json& j) {
    ProviderProfile p;
    p.name = j.at("name").get<std::string>();
    p.base_url = j.value("base_url", std::string{});
    p.model_id = j.value("model_id", std::string{});
    p.api_key_env = j.value("api_key_env", std::string{});
    p.supports_json_mode = j.value("supports_json_mode", false);
    if (p.model_id.empty()) throw ConfigError(fmt::format("provider '{}': model_id must be non-empty", p.name));
    return p;
}

json ProviderProfile::to_json() const {
    return json{{"name", name},
                {"base_url", base_url},
                {"model_id", model_id},
                {"api_key_env", api_key_env},
                {"supports_json_mode", supports_json_mode}};
}

std::optional<json> parse_json_reply(std::string_view raw) {
    std::string s = text::trim(raw);
    if (s.rfind("```", 0) == 0) {
        auto first_nl = s.find('\n');
        auto close = s.rfind("```");
        if (close != std::string::npos && close > 2) {
            if (first_nl != std::string::npos && first_nl < close) {
                s = s.substr(first_nl + 1, close - first_nl - 1);
            } else {
                // ```{"a":1}``` on one line
                s = s.substr(3, close - 3);
            }
            s = text::trim(s);
        }
    }
    if (s.empty()) return std::nullopt;
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy, Sleeper sleeper)
    : backend_(std::move(backend)), policy_(policy), sleeper_(sleeper ? std::move(sleeper) : Sleeper(default_sleep)) {
    if (!backend_) throw ConfigError("gateway needs a backend");
    if (policy_.max_attempts < 1) throw ConfigError("retry policy needs at least one attempt");
}

std::string Gateway::complete(const ProviderProfile& profile, const ChatRequest& request, ExchangeLog* log,
                              std::string_view role) const {
    Exchange ex;
    if (log) {
        ex.turn = log->turn;
        ex.phase = log->phase;
        ex.role = std::string(role);
        ex.tag = request.tag;
        ex.messages = request.messages;
    }
    auto backoff = policy_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            std::string reply = backend_->send(profile, request);
            if (log) {
                ex.reply = reply;
                log->exchanges.push_back(std::move(ex));
            }
            return reply;
        } catch (const TransientError& e) {
            if (attempt >= policy_.max_attempts) {
                RetryExhausted err(fmt::format("{} failed after {} attempts: {}", request.tag, attempt, e.what()));
                if (log) {
                    ex.error = err.what();
                    log->exchanges.push_back(std::move(ex));
                }
                throw err;
            }
            sleeper_(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::chrono::milliseconds::rep>(static_cast<double>(backoff.count()) * policy_.multiplier));
        } catch (const GatewayError& e) {
            if (log) {
                ex.error = e.what();
                log->exchanges.push_back(std::move(ex));
            }
            throw;
        }
    }
}

json Gateway::complete_json(const ProviderProfile& profile, ChatRequest request, int max_reparse, ExchangeLog* log,
                            std::string_view role) const {
    std::string last;
    for (int attempt = 0; attempt <= max_reparse; ++attempt) {
        last = complete(profile, request, log, role);
        if (auto parsed = parse_json_reply(last)) return *parsed;
        request.messages.push_back({MessageRole::user, std::string(kJsonCorrection)});
    }
    throw JsonReplyError(fmt::format("{}: no parseable JSON after {} attempts", request.tag, max_reparse + 1), last);
}

} // namespace turtlesoup
