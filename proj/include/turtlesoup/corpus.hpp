// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/genre.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

enum class Language { en, zh };

std::string_view language_code(Language lang);

struct Puzzle {
    std::string id;
    std::string title;
    std::string surface;
    std::string bottom; // hidden from players
    std::vector<std::string> key_clue_library;
    Genre genre = Genre::Original;
    Language language = Language::en;

    bool operator==(const Puzzle&) const = default;
};

/// Checks the per-puzzle invariants. Returns one human readable issue per
/// violated invariant; an empty list means the puzzle is valid.
/// Cross-puzzle checks (duplicate ids) belong to load_corpus.
std::vector<std::string> validate_puzzle(const Puzzle& p);

/// Reads a JSON array of puzzle records. Records come back in file order.
/// Throws CorpusError naming the first failing record and field.
std::vector<Puzzle> load_corpus(const std::filesystem::path& path);
std::vector<Puzzle> parse_corpus(const nlohmann::json& doc);

nlohmann::json puzzle_to_json(const Puzzle& p);
nlohmann::json corpus_to_json(std::span<const Puzzle> puzzles);

const Puzzle* find_puzzle(std::span<const Puzzle> puzzles, std::string_view id);

// Sizes are in Unicode characters.
struct CorpusStats {
    std::size_t puzzles = 0;
    std::map<std::string, std::size_t> per_genre;
    std::map<std::string, std::size_t> per_language;
    double mean_surface_chars = 0.0;
    double mean_bottom_chars = 0.0;
    double mean_key_clues = 0.0;
};

CorpusStats corpus_stats(std::span<const Puzzle> puzzles);

} // namespace turtlesoup
