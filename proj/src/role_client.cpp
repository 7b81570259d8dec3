// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/role_client.hpp"

namespace turtlesoup {

RoleClient::RoleClient(Gateway gateway, ProviderProfile profile, const PromptRegistry& prompts, std::string role,
                       ExchangeLog* log)
    : gateway_(std::move(gateway)), profile_(std::move(profile)), prompts_(&prompts), role_(std::move(role)),
      log_(log) {}

ChatRequest RoleClient::request(std::string_view template_id, const Bindings& bindings, ResponseFormat format,
                                std::optional<std::string> follow_up) const {
    std::string rendered = prompts_->render(template_id, bindings);
    std::vector<ChatMessage> messages;
    if (follow_up) {
        messages.push_back({MessageRole::system, std::move(rendered)});
        messages.push_back({MessageRole::user, std::move(*follow_up)});
    } else {
        messages.push_back({MessageRole::user, std::move(rendered)});
    }
    return ChatRequest(std::string(template_id), std::move(messages), format);
}

std::string RoleClient::send(const ChatRequest& request) const {
    return gateway_.complete(profile_, request, log_, role_);
}

nlohmann::json RoleClient::send_json(ChatRequest request, int max_reparse) const {
    return gateway_.complete_json(profile_, std::move(request), max_reparse, log_, role_);
}

std::string RoleClient::render(std::string_view template_id, const Bindings& bindings) const {
    return prompts_->render(template_id, bindings);
}

void RoleClient::event(std::string kind, std::string message) const {
    if (log_) log_->event(std::move(kind), std::move(message));
}

RoleClient RoleClient::with_log(ExchangeLog* log) const {
    RoleClient c = *this;
    c.log_ = log;
    return c;
}

} // namespace turtlesoup
