// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/gateway.hpp"
#include "turtlesoup/prompt_registry.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace turtlesoup {

// A gateway bound to one role: its provider profile, the prompt registry and
// the session's exchange log.
class RoleClient {
public:
    RoleClient(Gateway gateway, ProviderProfile profile, const PromptRegistry& prompts, std::string role,
               ExchangeLog* log = nullptr);

    // Renders `template_id` into the first message. With `follow_up` the
    // rendered prompt becomes the system message and follow_up the user one.
    ChatRequest request(std::string_view template_id, const Bindings& bindings,
                        ResponseFormat format = ResponseFormat::text,
                        std::optional<std::string> follow_up = std::nullopt) const;

    std::string send(const ChatRequest& request) const;
    nlohmann::json send_json(ChatRequest request, int max_reparse = kDefaultMaxReparse) const;

    std::string render(std::string_view template_id, const Bindings& bindings = {}) const;

    void event(std::string kind, std::string message) const;

    RoleClient with_log(ExchangeLog* log) const;

    const PromptRegistry& prompts() const { return *prompts_; }
    const ProviderProfile& profile() const { return profile_; }
    const std::string& role() const { return role_; }
    ExchangeLog* log() const { return log_; }

private:
    Gateway gateway_;
    ProviderProfile profile_;
    const PromptRegistry* prompts_;
    std::string role_;
    ExchangeLog* log_;
};

} // namespace turtlesoup
