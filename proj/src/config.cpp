// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/config.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <fstream>

namespace turtlesoup {

using nlohmann::json;

std::string AblationFlags::label() const {
    if (*this == AblationFlags{}) return "full";
    if (*this == all_off()) return "all_off";
    std::vector<std::string> parts;
    if (no_deliberation) parts.emplace_back("no_deliberation");
    if (no_metacognition) parts.emplace_back("no_metacognition");
    if (no_pruning) parts.emplace_back("no_pruning");
    if (no_key_clue) parts.emplace_back("no_key_clue");
    return text::join(parts, "+");
}

void SessionConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (window_qgen < 1 || window_screen < 1) throw ConfigError("history windows must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(switch_threshold >= 0.0)) throw ConfigError("switch_threshold must be >= 0");
    if (max_reparse < 0) throw ConfigError("max_reparse must be >= 0");
}

json SessionConfig::to_json() const {
    return json{{"k", k},
                {"n_max", n_max},
                {"alpha", alpha},
                {"switch_threshold", switch_threshold},
                {"window_qgen", window_qgen},
                {"window_screen", window_screen},
                {"max_reparse", max_reparse},
                {"ablation",
                 {{"no_deliberation", ablation.no_deliberation},
                  {"no_metacognition", ablation.no_metacognition},
                  {"no_pruning", ablation.no_pruning},
                  {"no_key_clue", ablation.no_key_clue}}},
                {"mode", mode == PlayMode::agent ? "agent" : "human"}};
}

SessionConfig SessionConfig::from_json(const json& j) {
    SessionConfig c;
    try {
        c.k = j.value("k", c.k);
        c.n_max = j.value("n_max", c.n_max);
        c.alpha = j.value("alpha", c.alpha);
        c.switch_threshold = j.value("switch_threshold", c.switch_threshold);
        c.window_qgen = j.value("window_qgen", c.window_qgen);
        c.window_screen = j.value("window_screen", c.window_screen);
        c.max_reparse = j.value("max_reparse", c.max_reparse);
        if (j.contains("ablation")) {
            const auto& a = j.at("ablation");
            c.ablation.no_deliberation = a.value("no_deliberation", false);
            c.ablation.no_metacognition = a.value("no_metacognition", false);
            c.ablation.no_pruning = a.value("no_pruning", false);
            c.ablation.no_key_clue = a.value("no_key_clue", false);
        }
        const auto mode = j.value("mode", std::string("agent"));
        if (mode == "agent") c.mode = PlayMode::agent;
        else if (mode == "human") c.mode = PlayMode::human;
        else throw ConfigError(fmt::format("unknown mode '{}'", mode));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("bad session config: {}", e.what()));
    }
    c.validate();
    return c;
}

RoleProfiles EngineConfig::role_profiles() const {
    auto pick = [&](const char* role) -> ProviderProfile {
        auto r = roles.find(role);
        if (r == roles.end()) {
            // Scripted runs never reach a provider; any placeholder will do.
            if (oracle_script) return ProviderProfile{"scripted", "", "scripted", "", true};
            throw ConfigError(fmt::format("no provider configured for role '{}'", role));
        }
        auto p = providers.find(r->second);
        if (p == providers.end())
            throw ConfigError(fmt::format("role '{}' names unknown provider '{}'", role, r->second));
        return p->second;
    };
    return {pick("questioner"), pick("responder"), pick("judge")};
}

json EngineConfig::to_json() const {
    json provs = json::array();
    for (const auto& [_, p] : providers) provs.push_back(p.to_json());
    json j{{"providers", std::move(provs)}, {"roles", roles}, {"session", session.to_json()}};
    if (oracle_script) j["oracle_script"] = oracle_script->string();
    if (prompts_dir) j["prompts_dir"] = prompts_dir->string();
    return j;
}

EngineConfig EngineConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    EngineConfig c;
    auto resolve = [&](const std::string& s) {
        std::filesystem::path p(s);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return std::filesystem::absolute(p).lexically_normal();
    };
    try {
        for (const auto& p : j.value("providers", json::array())) {
            auto prof = ProviderProfile::from_json(p);
            auto name = prof.name;
            if (!c.providers.emplace(name, std::move(prof)).second)
                throw ConfigError(fmt::format("duplicate provider '{}'", name));
        }
        const json roles = j.value("roles", json::object());
        for (const auto& [role, name] : roles.items()) {
            if (role != "questioner" && role != "responder" && role != "judge")
                throw ConfigError(fmt::format("unknown role '{}'", role));
            c.roles[role] = name.get<std::string>();
        }
        if (j.contains("session")) c.session = SessionConfig::from_json(j.at("session"));
        if (j.contains("oracle_script")) c.oracle_script = resolve(j.at("oracle_script").get<std::string>());
        if (j.contains("prompts_dir")) c.prompts_dir = resolve(j.at("prompts_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("bad engine config: {}", e.what()));
    }
    c.role_profiles(); // fail early on dangling role names
    return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("malformed config {}: {}", path.string(), e.what()));
    }
    return from_json(j, std::filesystem::absolute(path).parent_path());
}

} // namespace turtlesoup
