// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/responder.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

struct QaTurn {
    int turn = 0; // 1-based, contiguous
    std::string question;
    ResponderReply reply;

    bool operator==(const QaTurn&) const = default;
};

struct MetacogCounters {
    int new_key_clues = 0;
    int turns_since = 0;

    bool operator==(const MetacogCounters&) const = default;
};

// Per-session notebook: the full Q/A history, the key-clue records, the
// blacklist of Unknown-answered questions and the meta-cognition checkpoint.
class SessionMemory {
public:
    // Appends the turn. Flagged replies go to the key-clue records and
    // Unknown-answered questions to the blacklist (once, verbatim).
    const QaTurn& record_turn(std::string question, ResponderReply reply);

    // Last `window` turns as "N. Q: ... / A: ..." lines; "(none)" when empty.
    std::string render_history(int window) const;
    std::string render_full_history() const;
    std::string render_key_clues() const;

    MetacogCounters metacog_counters() const;
    void mark_metacog_checkpoint();

    const std::vector<QaTurn>& history() const { return history_; }
    const std::vector<int>& key_clue_turns() const { return key_clue_turns_; }
    std::vector<QaTurn> key_clues() const;
    const std::vector<std::string>& blacklist() const { return blacklist_; }

    // Questions asked so far, deduplicated by whitespace-normalized text.
    std::vector<std::string> asked_questions() const;

    int size() const { return static_cast<int>(history_.size()); }
    bool empty() const { return history_.empty(); }

    nlohmann::json to_json() const;
    static SessionMemory from_json(const nlohmann::json& j);

private:
    std::vector<QaTurn> history_;
    std::vector<int> key_clue_turns_;
    std::vector<std::string> blacklist_;
    int last_metacog_turn_ = 0;
    int key_clues_at_last_metacog_ = 0;
};

std::string render_turn(const QaTurn& t);

nlohmann::json qa_turn_to_json(const QaTurn& t);
QaTurn qa_turn_from_json(const nlohmann::json& j);

} // namespace turtlesoup
