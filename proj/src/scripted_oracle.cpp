// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/scripted_oracle.hpp"

#include "turtlesoup/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iterator>

namespace turtlesoup {

using nlohmann::json;

ScriptedOracle::ScriptedOracle(std::vector<ScriptEntry> script, bool cycle) : cycle_(cycle) {
    for (auto& e : script) {
        auto it = std::find_if(tracks_.begin(), tracks_.end(), [&](const Track& t) { return t.key == e.match; });
        if (it == tracks_.end()) {
            tracks_.push_back(Track{e.match, {}, 0});
            it = std::prev(tracks_.end());
        }
        it->replies.push_back(std::move(e.reply));
    }
}

ScriptedOracle::ScriptedOracle(const ScriptedOracle& other) {
    std::lock_guard lock(other.mutex_);
    tracks_ = other.tracks_;
    cycle_ = other.cycle_;
    calls_ = other.calls_;
}

ScriptedOracle ScriptedOracle::from_json(const json& doc) {
    std::vector<ScriptEntry> entries;
    const json& list = doc.is_array() ? doc : doc.at("entries");
    for (const auto& e : list) {
        const auto match = e.at("match").get<std::string>();
        if (match.empty()) throw ConfigError("oracle script: empty match key");
        if (e.contains("replies")) {
            for (const auto& r : e.at("replies")) entries.push_back({match, r.get<std::string>()});
        } else {
            entries.push_back({match, e.at("reply").get<std::string>()});
        }
    }
    const bool cycle = doc.is_object() && doc.value("cycle", false);
    return ScriptedOracle(std::move(entries), cycle);
}

ScriptedOracle ScriptedOracle::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read oracle script {}", path.string()));
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("malformed oracle script {}: {}", path.string(), e.what()));
    }
}

std::string ScriptedOracle::send(const ProviderProfile&, const ChatRequest& request) {
    const std::string content = request.joined_content();
    std::lock_guard lock(mutex_);
    ++calls_;
    for (auto& t : tracks_) {
        if (t.key != request.tag && content.find(t.key) == std::string::npos) continue;
        if (t.cursor >= t.replies.size()) {
            if (!cycle_) throw ScriptExhausted(fmt::format("script exhausted for key '{}'", t.key));
            t.cursor = 0;
        }
        return t.replies[t.cursor++];
    }
    throw ScriptExhausted(fmt::format("no script entry matches request '{}'", request.tag));
}

std::size_t ScriptedOracle::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

} // namespace turtlesoup
