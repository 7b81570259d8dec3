// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/genre_state.hpp"
#include "turtlesoup/memory.hpp"
#include "turtlesoup/role_client.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

struct BeliefState {
    std::vector<std::string> logic;
    std::vector<std::string> details;
    std::string conclusion;
    int updated_at_turn = 0; // completed turns the belief covers

    bool synthesized() const { return !conclusion.empty(); }
    bool operator==(const BeliefState&) const = default;

    nlohmann::json to_json() const;
    static BeliefState from_json(const nlohmann::json& j);
};

struct ApsItem {
    std::string doubt;
    std::string analysis;
    std::string proposal;

    bool operator==(const ApsItem&) const = default;
};

struct LocalAnalysis {
    std::string new_information;
    std::string conflicts;
    std::string adjustments;

    bool empty() const { return new_information.empty() && conflicts.empty() && adjustments.empty(); }
    std::string text() const;
};

struct CandidateSet {
    std::array<std::string, 3> questions;
};

// --- pure parsing helpers -------------------------------------------------

// Splits on the three analysis headings (New Information / Knowledge Conflict /
// Understanding Adjustment). Without them the whole reply lands in
// new_information.
LocalAnalysis split_local_analysis(std::string_view raw);

// Accepts "Point of Doubt: / Analysis: / Question Suggestion:" labelled blocks
// (also "Doubt N:", "Analysis N:", "Proposal N:") and the one-line
// `"doubt" + analysis + suggestion` form.
std::vector<ApsItem> parse_aps(std::string_view raw);

std::string render_aps(std::span<const ApsItem> aps);

// Items of a "1. ... / 2. ... / 3. ..." list, in order, markers stripped.
std::vector<std::string> parse_numbered_list(std::string_view raw);

// Trims, drops surrounding brackets/quotes and makes sure the text ends in '?'.
std::string normalize_question(std::string_view q);

// |shared word tokens| / max(|tokens a|, |tokens b|)
double token_overlap(std::string_view a, std::string_view b);

inline constexpr double kSelectionOverlapFloor = 0.6;

// Index of the candidate the screening reply names: normalized exact match
// first, then the highest token overlap at or above the floor. nullopt means
// "fall back to candidate 1".
std::optional<std::size_t> match_selection(std::string_view reply, const CandidateSet& cands);

std::string_view strategy_template_id(Genre g);

// --- the agent ------------------------------------------------------------

// Deliberation, meta-cognition and action formulation. Every method is a pure
// function of its arguments and the gateway's replies; session state lives in
// the caller.
class Questioner {
public:
    explicit Questioner(RoleClient client, int max_reparse = kDefaultMaxReparse);

    LocalAnalysis analyze_last_turn(std::string_view surface, std::string_view history_text,
                                    const QaTurn& last_turn) const;

    // On JSON failure returns `prev` unchanged and records a degradation event.
    BeliefState update_belief(std::string_view surface, std::string_view key_clues_text,
                              std::string_view history_text, const BeliefState& prev, int through_turn) const;

    std::vector<ApsItem> generate_aps(const BeliefState& belief, std::string_view surface,
                                      std::string_view key_clues_text) const;

    // Three independent classifier calls. nullopt when fewer than two votes
    // parse.
    std::optional<GenreVote> classify_genre(std::string_view surface, std::string_view history_text,
                                            std::string_view key_clues_text, Genre current) const;

    std::string strategy_for(Genre g) const;

    // Re-asks once when fewer than three questions parse, then pads with the
    // last one. Throws ParseError when nothing parses.
    CandidateSet generate_candidates(std::string_view surface, std::span<const ApsItem> aps,
                                     const LocalAnalysis& local, std::string_view strategy,
                                     std::string_view history_qgen) const;

    // Always returns a member of `cands`; gateway failures degrade to
    // candidate 1.
    std::string select_question(const CandidateSet& cands, std::string_view surface, std::span<const ApsItem> aps,
                                const LocalAnalysis& local, std::string_view history_screen,
                                std::span<const std::string> asked, std::span<const std::string> blacklist) const;

    Questioner with_log(ExchangeLog* log) const { return Questioner(client_.with_log(log), max_reparse_); }

private:
    RoleClient client_;
    int max_reparse_;
};

} // namespace turtlesoup
