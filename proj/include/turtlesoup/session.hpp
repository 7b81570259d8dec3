// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/config.hpp"
#include "turtlesoup/corpus.hpp"
#include "turtlesoup/gateway.hpp"
#include "turtlesoup/genre_state.hpp"
#include "turtlesoup/memory.hpp"
#include "turtlesoup/prompt_registry.hpp"
#include "turtlesoup/questioner.hpp"
#include "turtlesoup/responder.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace turtlesoup {

struct BeliefSnapshot {
    int turn = 0; // completed turns covered
    std::string phase; // "deliberation" or "final"
    BeliefState belief;
    std::vector<ApsItem> aps;
};

struct GenreTraceEntry {
    int turn = 0;
    Genre vote = Genre::Default;
    double vote_confidence = 0.0;
    double confidence = 0.0; // after the update
    bool switched = false;
    Genre genre = Genre::Default; // after the update
};

struct Transcript {
    std::string puzzle_id;
    std::string run_id;
    PlayMode mode = PlayMode::agent;
    SessionConfig config;
    std::string status = "complete"; // complete | aborted
    std::string abort_reason;
    std::vector<QaTurn> turns;
    std::vector<int> key_clue_turns;
    std::vector<std::string> blacklist;
    std::vector<BeliefSnapshot> beliefs;
    std::vector<GenreTraceEntry> genre_trace;
    std::vector<int> metacog_turns; // turns at which meta-cognition ran
    std::vector<SessionEvent> events;
    std::optional<BeliefState> final_summary;
    std::vector<Exchange> exchanges;

    // Wall clock per phase in milliseconds. Kept out of to_json() so the
    // canonical transcript stays byte-identical across runs.
    std::map<std::string, double> phase_ms;

    bool aborted() const { return status == "aborted"; }

    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json& j);
};

struct EngineContext {
    Gateway gateway;
    RoleProfiles profiles;
    const PromptRegistry* prompts = nullptr;
};

struct SessionHooks {
    // Optional early stop, checked after each turn. Off by default.
    std::function<bool(const SessionMemory&, const BeliefState&)> early_stop;
};

/// Plays one puzzle with the agent questioner.
///
/// Per turn t = 1..n_max:
///   1. local analysis of the previous turn (t > 1, deliberation on);
///   2. at t = k+1, 2k+1, ... a belief update over all completed turns,
///      followed by a fresh analysis-and-proposal set;
///   3. meta-cognition when the counters say it is due;
///   4. three candidates from the current strategy;
///   5. screening (or candidate 1 under no_pruning);
///   6. the responder answers and the turn is recorded.
/// A final belief update over the full history always runs and becomes the
/// evaluated summary. Gateway failures abort the session and return the
/// partial transcript with status "aborted".
Transcript run_session(const Puzzle& p, const SessionConfig& cfg, const EngineContext& ctx,
                       const SessionHooks& hooks = {});

/// One human question: respond + record. Throws ValidationError for an empty
/// question and BudgetExhausted once n_max turns are used.
std::pair<ResponderReply, int> step_human_turn(const Puzzle& p, SessionMemory& memory, std::string_view question,
                                               const SessionConfig& cfg, const Responder& responder);

// Free text summary -> belief. Optional "Logic:" / "Details:" / "Conclusion:"
// sections fill the lists; everything outside the list sections is the
// conclusion.
BeliefState parse_human_summary(std::string_view summary);

// Human-questioner game: one puzzle, one memory, finalized exactly once.
class HumanGame {
public:
    HumanGame(const Puzzle& p, SessionConfig cfg, Responder responder);
    HumanGame(const HumanGame&) = delete; // the responder points at log_
    HumanGame& operator=(const HumanGame&) = delete;

    std::pair<ResponderReply, int> ask(std::string_view question);

    // Throws StateError on the second call.
    const Transcript& finalize(std::string_view summary_text);

    bool finalized() const { return transcript_.has_value(); }
    const SessionMemory& memory() const { return memory_; }
    int remaining_turns() const { return cfg_.n_max - memory_.size(); }
    const SessionConfig& config() const { return cfg_; }
    const Transcript* transcript() const { return transcript_ ? &*transcript_ : nullptr; }

private:
    const Puzzle* puzzle_;
    SessionConfig cfg_;
    Responder responder_;
    SessionMemory memory_;
    ExchangeLog log_;
    std::optional<Transcript> transcript_;
};

} // namespace turtlesoup
