// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/openai_backend.hpp"

#include "turtlesoup/errors.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <cstdlib>

namespace turtlesoup {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin; // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ProviderError(fmt::format("base_url '{}' has no scheme", base_url));
    auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = base_url.substr(0, path_start);
    ep.path = path_start == std::string::npos ? std::string{} : base_url.substr(path_start);
    while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
    ep.path += "/chat/completions";
    return ep;
}

std::string_view role_name(MessageRole r) { return r == MessageRole::system ? "system" : "user"; }

} // namespace

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

OpenAiBackend::OpenAiBackend(std::chrono::seconds timeout, EnvLookup env) : timeout_(timeout), env_(std::move(env)) {}

json OpenAiBackend::build_payload(const ProviderProfile& profile, const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    json body{{"model", profile.model_id},
              {"messages", std::move(messages)},
              {"temperature", request.temperature()},
              {"seed", request.seed()}};
    if (request.response_format == ResponseFormat::json && profile.supports_json_mode)
        body["response_format"] = {{"type", "json_object"}};
    return body;
}

std::string OpenAiBackend::send(const ProviderProfile& profile, const ChatRequest& request) {
    if (profile.api_key_env.empty()) throw AuthError(fmt::format("provider '{}' names no api_key_env", profile.name));
    auto key = env_(profile.api_key_env);
    if (!key || key->empty())
        throw AuthError(fmt::format("environment variable {} is not set (provider '{}')", profile.api_key_env,
                                    profile.name));

    const Endpoint ep = split_url(profile.base_url);
    httplib::Client cli(ep.origin);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    cli.set_write_timeout(timeout_);
    httplib::Headers headers{{"Authorization", "Bearer " + *key}};

    auto res = cli.Post(ep.path, headers, build_payload(profile, request).dump(), "application/json");
    if (!res) throw TransientError(fmt::format("{}: transport error: {}", profile.name, httplib::to_string(res.error())));

    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError(fmt::format("{}: HTTP {}", profile.name, status));
    if (status == 429 || status >= 500) throw TransientError(fmt::format("{}: HTTP {}", profile.name, status));
    if (status != 200)
        throw ProviderError(fmt::format("{}: HTTP {}: {}", profile.name, status, res->body.substr(0, 300)));

    try {
        const json doc = json::parse(res->body);
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw ProviderError(fmt::format("{}: message content is not text", profile.name));
        return content.get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(fmt::format("{}: unexpected response body: {}", profile.name, e.what()));
    }
}

} // namespace turtlesoup
