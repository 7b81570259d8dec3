// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/genre_state.hpp"

#include <algorithm>
#include <map>

namespace turtlesoup {

GenreUpdate update_genre_state(const GenreState& gs, Genre vote_genre, double vote_confidence) {
    const double v = std::clamp(vote_confidence, 0.0, 1.0);
    // Same value as alpha*c + (1-alpha)*v, written so that v == c leaves c bit-exact.
    const double smoothed = std::clamp(gs.confidence + (1.0 - gs.alpha) * (v - gs.confidence), 0.0, 1.0);

    GenreUpdate out{gs, false};
    out.state.confidence = smoothed;
    if (vote_genre != gs.genre && smoothed > gs.confidence + gs.switch_threshold) {
        out.state.genre = vote_genre;
        out.switched = true;
    }
    return out;
}

bool metacognition_due(const MetacogCounters& counters) {
    return counters.new_key_clues >= kMetacogClueTrigger || counters.turns_since >= kMetacogTurnTrigger;
}

std::optional<GenreVote> tally_votes(std::span<const std::optional<Genre>> votes, Genre current) {
    std::vector<Genre> valid;
    for (const auto& v : votes) {
        if (v) valid.push_back(*v);
    }
    if (valid.size() < 2) return std::nullopt;

    std::map<Genre, int> counts;
    for (Genre g : valid) ++counts[g];
    int best = 0;
    for (const auto& [g, n] : counts) best = std::max(best, n);

    auto leads = [&](Genre g) { return counts[g] == best; };
    Genre winner = valid.front();
    if (counts.contains(current) && leads(current)) {
        winner = current;
    } else {
        // First valid vote among the leaders.
        for (Genre g : valid) {
            if (leads(g)) {
                winner = g;
                break;
            }
        }
    }
    GenreVote out;
    out.genre = winner;
    out.vote_confidence = static_cast<double>(best) / 3.0;
    out.votes.assign(votes.begin(), votes.end());
    return out;
}

} // namespace turtlesoup
