// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/genre.hpp"

#include "turtlesoup/text_util.hpp"

#include <cctype>
#include <string>
#include <utility>

namespace turtlesoup {

namespace {

struct Alias {
    std::string_view text;
    Genre genre;
};

// Canonical names, then the strategy titles a classifier tends to echo back.
constexpr Alias kVoteAliases[] = {
    {"crime thriller", Genre::CrimeThriller},
    {"mind game", Genre::MindGame},
    {"supernatural", Genre::Supernatural},
    {"constant change", Genre::ConstantChange},
    {"clever logic", Genre::CleverLogic},
    {"original", Genre::Original},
    {"mind maze", Genre::MindGame},
    {"supernatural fantasy", Genre::Supernatural},
    {"worldly vicissitudes", Genre::ConstantChange},
    {"logic and cleverness", Genre::CleverLogic},
    {"crimethriller", Genre::CrimeThriller},
    {"mindgame", Genre::MindGame},
    {"constantchange", Genre::ConstantChange},
    {"cleverlogic", Genre::CleverLogic},
};

std::string squash(std::string_view s) {
    std::string out;
    for (char c : text::to_lower(s)) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == ' ') out.push_back(c);
        else out.push_back(' ');
    }
    return text::collapse_whitespace(out);
}

} // namespace

std::string_view genre_name(Genre g) {
    switch (g) {
    case Genre::CrimeThriller: return "Crime Thriller";
    case Genre::MindGame: return "Mind Game";
    case Genre::Supernatural: return "Supernatural";
    case Genre::ConstantChange: return "Constant Change";
    case Genre::CleverLogic: return "Clever Logic";
    case Genre::Original: return "Original";
    case Genre::Default: return "Default";
    }
    return "Default";
}

std::optional<Genre> parse_corpus_genre(std::string_view name) {
    const std::string n = text::trim(name);
    for (Genre g : {Genre::CrimeThriller, Genre::MindGame, Genre::Supernatural, Genre::ConstantChange,
                    Genre::CleverLogic, Genre::Original}) {
        if (n == genre_name(g)) return g;
    }
    if (n == "Original (Expert-Authored)") return Genre::Original;
    return std::nullopt;
}

std::optional<Genre> parse_genre_vote(std::string_view reply) {
    const std::string s = squash(reply);
    if (s.empty()) return std::nullopt;
    for (const auto& a : kVoteAliases) {
        if (s == a.text) return a.genre;
    }
    // Otherwise the reply must mention exactly one genre.
    std::optional<Genre> found;
    const std::string padded = " " + s + " ";
    for (const auto& a : kVoteAliases) {
        if (padded.find(" " + std::string(a.text) + " ") == std::string::npos) continue;
        if (found && *found != a.genre) return std::nullopt;
        found = a.genre;
    }
    return found;
}

} // namespace turtlesoup
