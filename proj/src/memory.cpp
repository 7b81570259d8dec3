// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/memory.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace turtlesoup {

using nlohmann::json;

std::string render_turn(const QaTurn& t) {
    return fmt::format("{}. Q: {} / A: {}", t.turn, t.question, t.reply.rendered);
}

json qa_turn_to_json(const QaTurn& t) {
    return json{{"turn", t.turn},
                {"question", t.question},
                {"verdict", verdict_text(t.reply.verdict)},
                {"key_clue", t.reply.is_key_clue},
                {"rendered", t.reply.rendered}};
}

QaTurn qa_turn_from_json(const json& j) {
    QaTurn t;
    t.turn = j.at("turn").get<int>();
    t.question = j.at("question").get<std::string>();
    auto reply = parse_rendered(j.at("rendered").get<std::string>());
    if (!reply) throw ValidationError(fmt::format("turn {}: malformed rendered reply", t.turn));
    t.reply = *reply;
    return t;
}

const QaTurn& SessionMemory::record_turn(std::string question, ResponderReply reply) {
    if (text::trim(question).empty()) throw ValidationError("question must be non-empty");
    QaTurn t{size() + 1, std::move(question), std::move(reply)};
    if (t.reply.is_key_clue) key_clue_turns_.push_back(t.turn);
    if (t.reply.verdict == Verdict::Unknown &&
        std::find(blacklist_.begin(), blacklist_.end(), t.question) == blacklist_.end())
        blacklist_.push_back(t.question);
    history_.push_back(std::move(t));
    return history_.back();
}

std::string SessionMemory::render_history(int window) const {
    if (history_.empty()) return "(none)";
    const auto n = static_cast<std::size_t>(std::max(window, 0));
    const std::size_t start = history_.size() > n ? history_.size() - n : 0;
    std::vector<std::string> lines;
    for (std::size_t i = start; i < history_.size(); ++i) lines.push_back(render_turn(history_[i]));
    return lines.empty() ? "(none)" : text::join(lines, "\n");
}

std::string SessionMemory::render_full_history() const { return render_history(size()); }

std::string SessionMemory::render_key_clues() const {
    std::vector<std::string> lines;
    for (int t : key_clue_turns_) lines.push_back(render_turn(history_[static_cast<std::size_t>(t - 1)]));
    return lines.empty() ? "(none)" : text::join(lines, "\n");
}

MetacogCounters SessionMemory::metacog_counters() const {
    return {static_cast<int>(key_clue_turns_.size()) - key_clues_at_last_metacog_, size() - last_metacog_turn_};
}

void SessionMemory::mark_metacog_checkpoint() {
    last_metacog_turn_ = size();
    key_clues_at_last_metacog_ = static_cast<int>(key_clue_turns_.size());
}

std::vector<QaTurn> SessionMemory::key_clues() const {
    std::vector<QaTurn> out;
    for (int t : key_clue_turns_) out.push_back(history_[static_cast<std::size_t>(t - 1)]);
    return out;
}

std::vector<std::string> SessionMemory::asked_questions() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : history_) {
        auto norm = text::collapse_whitespace(t.question);
        if (seen.insert(norm).second) out.push_back(std::move(norm));
    }
    return out;
}

json SessionMemory::to_json() const {
    json turns = json::array();
    for (const auto& t : history_) turns.push_back(qa_turn_to_json(t));
    return json{{"history", std::move(turns)},
                {"key_clue_turns", key_clue_turns_},
                {"blacklist", blacklist_},
                {"last_metacog_turn", last_metacog_turn_},
                {"key_clues_at_last_metacog", key_clues_at_last_metacog_}};
}

SessionMemory SessionMemory::from_json(const json& j) {
    SessionMemory m;
    // Replaying the turns rebuilds the derived lists, which keeps their invariants.
    for (const auto& t : j.at("history")) {
        QaTurn turn = qa_turn_from_json(t);
        if (turn.turn != m.size() + 1) throw ValidationError("memory turns are not contiguous from 1");
        m.record_turn(std::move(turn.question), std::move(turn.reply));
    }
    m.last_metacog_turn_ = j.value("last_metacog_turn", 0);
    m.key_clues_at_last_metacog_ = j.value("key_clues_at_last_metacog", 0);
    if (j.contains("blacklist") && j.at("blacklist").get<std::vector<std::string>>() != m.blacklist_)
        throw ValidationError("memory blacklist disagrees with its history");
    return m;
}

} // namespace turtlesoup
