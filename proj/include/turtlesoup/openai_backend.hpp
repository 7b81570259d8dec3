// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/gateway.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <optional>
#include <string>

namespace turtlesoup {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

// OpenAI-compatible chat-completions client (POST {base_url}/chat/completions).
class OpenAiBackend : public ChatBackend {
public:
    explicit OpenAiBackend(std::chrono::seconds timeout = std::chrono::seconds{180}, EnvLookup env = process_env);

    std::string send(const ProviderProfile& profile, const ChatRequest& request) override;

    static nlohmann::json build_payload(const ProviderProfile& profile, const ChatRequest& request);

private:
    std::chrono::seconds timeout_;
    EnvLookup env_;
};

} // namespace turtlesoup
