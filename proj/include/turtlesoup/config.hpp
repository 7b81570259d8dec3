// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/gateway.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace turtlesoup {

struct AblationFlags {
    bool no_deliberation = false;
    bool no_metacognition = false;
    bool no_pruning = false;
    bool no_key_clue = false;

    static AblationFlags all_off() { return {true, true, true, true}; }

    // "full", "no_deliberation", ..., "all_off", or a '+'-joined mix.
    std::string label() const;

    bool operator==(const AblationFlags&) const = default;
};

enum class PlayMode { agent, human };

struct SessionConfig {
    int k = 5;       // deliberation interval
    int n_max = 30;  // turn budget
    double alpha = 0.7;
    double switch_threshold = 0.1;
    int window_qgen = 10;
    int window_screen = 4;
    int max_reparse = kDefaultMaxReparse;
    AblationFlags ablation;
    PlayMode mode = PlayMode::agent;

    // Throws ConfigError.
    void validate() const;

    nlohmann::json to_json() const;
    static SessionConfig from_json(const nlohmann::json& j);

    bool operator==(const SessionConfig&) const = default;
};

struct RoleProfiles {
    ProviderProfile questioner;
    ProviderProfile responder;
    ProviderProfile judge;
};

// The config file given to `run`, `ablate` and `serve`:
//
//   {
//     "providers": [{"name", "base_url", "model_id", "api_key_env", "supports_json_mode"}],
//     "roles": {"questioner": name, "responder": name, "judge": name},
//     "session": {...SessionConfig...},
//     "oracle_script": "path"   // optional: replay a script instead of calling providers
//     "prompts_dir": "path"     // optional
//   }
//
// Relative paths resolve against the config file's directory.
struct EngineConfig {
    std::map<std::string, ProviderProfile> providers;
    std::map<std::string, std::string> roles;
    SessionConfig session;
    std::optional<std::filesystem::path> oracle_script;
    std::optional<std::filesystem::path> prompts_dir;

    RoleProfiles role_profiles() const;

    nlohmann::json to_json() const;
    static EngineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static EngineConfig load(const std::filesystem::path& path);
};

} // namespace turtlesoup
