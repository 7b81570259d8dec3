// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/gateway.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace turtlesoup {

struct ScriptEntry {
    std::string match; // template id, or a substring of the request content
    std::string reply;
};

// Test backend that replays canned replies.
//
// Entries are grouped by match key, each key keeping its own cursor. For a
// request, keys are tried in order of first appearance in the script; a key
// applies when it equals the request tag or occurs in the request content.
// The first applicable key answers with its next reply.
//
// Running past the end of a key's replies throws ScriptExhausted unless the
// script was built with `cycle`, in which case the replies repeat.
class ScriptedOracle : public ChatBackend {
public:
    explicit ScriptedOracle(std::vector<ScriptEntry> script, bool cycle = false);

    // {"cycle": bool, "entries": [{"match": k, "reply": r} | {"match": k, "replies": [..]}]}
    static ScriptedOracle from_json(const nlohmann::json& doc);
    static ScriptedOracle load(const std::filesystem::path& path);

    ScriptedOracle(const ScriptedOracle& other);

    std::string send(const ProviderProfile& profile, const ChatRequest& request) override;

    std::size_t calls() const;

private:
    struct Track {
        std::string key;
        std::vector<std::string> replies;
        std::size_t cursor = 0;
    };

    std::vector<Track> tracks_;
    bool cycle_;
    std::size_t calls_ = 0;
    mutable std::mutex mutex_;
};

} // namespace turtlesoup
