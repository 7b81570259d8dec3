// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/genre.hpp"
#include "turtlesoup/memory.hpp"

#include <optional>
#include <span>
#include <vector>

namespace turtlesoup {

// Strategy genre with its smoothed confidence. Confidence is an exponential
// moving average of vote confidences; a dissenting genre only takes over when
// the smoothed value clears the previous one by more than switch_threshold.
struct GenreState {
    Genre genre = Genre::Default;
    double confidence = 0.5;
    double alpha = 0.7;
    double switch_threshold = 0.1;
};

struct GenreUpdate {
    GenreState state;
    bool switched = false;
};

// c' = alpha * c + (1 - alpha) * v_c, applied whether or not the vote agrees.
GenreUpdate update_genre_state(const GenreState& gs, Genre vote_genre, double vote_confidence);

// Three or more new key clues since the last check, or five turns without one.
inline constexpr int kMetacogClueTrigger = 3;
inline constexpr int kMetacogTurnTrigger = 5;

bool metacognition_due(const MetacogCounters& counters);

struct GenreVote {
    Genre genre = Genre::Default;
    double vote_confidence = 0.0; // votes for the winner / 3
    std::vector<std::optional<Genre>> votes;
};

// Majority over three votes. Unparseable votes (nullopt) are dropped; fewer
// than two valid votes yields nullopt. A tie goes to `current` when it got a
// vote, otherwise to the first valid vote.
std::optional<GenreVote> tally_votes(std::span<const std::optional<Genre>> votes, Genre current);

} // namespace turtlesoup
