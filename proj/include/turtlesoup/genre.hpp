// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace turtlesoup {

enum class Genre {
    CrimeThriller,
    MindGame,
    Supernatural,
    ConstantChange,
    CleverLogic,
    Original,
    // Questioner's initial strategy state only; never valid in a corpus.
    Default,
};

// Display / file names: "Crime Thriller", "Mind Game", "Supernatural",
// "Constant Change", "Clever Logic", "Original", "Default".
std::string_view genre_name(Genre g);

// Strict parse for corpus files. Accepts the canonical names and
// "Original (Expert-Authored)". "Default" and unknown strings are rejected.
std::optional<Genre> parse_corpus_genre(std::string_view name);

// Lenient parse of a classifier reply. Accepts canonical names, the strategy
// titles ("Mind Maze", "Worldly Vicissitudes", ...) and replies that mention
// exactly one genre.
std::optional<Genre> parse_genre_vote(std::string_view reply);

// The five narrative genres offered to the classifier.
inline constexpr std::array<Genre, 5> kNarrativeGenres = {
    Genre::CrimeThriller, Genre::MindGame, Genre::Supernatural, Genre::ConstantChange, Genre::CleverLogic,
};

} // namespace turtlesoup
