// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/corpus.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

namespace turtlesoup {

using nlohmann::json;

std::string_view language_code(Language lang) { return lang == Language::zh ? "zh" : "en"; }

std::vector<std::string> validate_puzzle(const Puzzle& p) {
    std::vector<std::string> issues;
    if (text::trim(p.id).empty()) issues.emplace_back("id must be non-empty");
    if (text::trim(p.surface).empty()) issues.emplace_back("surface must be non-empty");
    if (text::trim(p.bottom).empty()) issues.emplace_back("bottom must be non-empty");
    if (p.key_clue_library.empty()) issues.emplace_back("key_clue_library must have at least one entry");
    if (p.genre == Genre::Default) issues.emplace_back("genre Default is not allowed in a corpus");
    return issues;
}

namespace {

std::string require_string(const json& rec, int index, const char* field) {
    auto it = rec.find(field);
    if (it == rec.end()) throw CorpusError(fmt::format("record {}: missing field '{}'", index, field), index, field);
    if (!it->is_string())
        throw CorpusError(fmt::format("record {}: field '{}' must be a string", index, field), index, field);
    return it->get<std::string>();
}

Puzzle parse_record(const json& rec, int index) {
    if (!rec.is_object()) throw CorpusError(fmt::format("record {}: not an object", index), index);
    Puzzle p;
    p.id = require_string(rec, index, "id");
    p.title = rec.contains("title") ? require_string(rec, index, "title") : p.id;
    p.surface = require_string(rec, index, "surface");
    p.bottom = require_string(rec, index, "bottom");

    const std::string lang = require_string(rec, index, "language");
    if (lang == "en") p.language = Language::en;
    else if (lang == "zh") p.language = Language::zh;
    else throw CorpusError(fmt::format("record {}: unknown language '{}'", index, lang), index, "language");

    const std::string genre = require_string(rec, index, "genre");
    auto g = parse_corpus_genre(genre);
    if (!g) throw CorpusError(fmt::format("record {}: unknown genre '{}'", index, genre), index, "genre");
    p.genre = *g;

    auto clues = rec.find("key_clues");
    if (clues == rec.end())
        throw CorpusError(fmt::format("record {}: missing field 'key_clues'", index), index, "key_clues");
    if (!clues->is_array())
        throw CorpusError(fmt::format("record {}: 'key_clues' must be an array", index), index, "key_clues");
    for (const auto& c : *clues) {
        if (!c.is_string())
            throw CorpusError(fmt::format("record {}: key clues must be strings", index), index, "key_clues");
        p.key_clue_library.push_back(c.get<std::string>());
    }

    // Map each invariant back to the field it concerns.
    if (text::trim(p.id).empty()) throw CorpusError(fmt::format("record {}: empty id", index), index, "id");
    if (text::trim(p.surface).empty())
        throw CorpusError(fmt::format("record {}: empty surface", index), index, "surface");
    if (text::trim(p.bottom).empty())
        throw CorpusError(fmt::format("record {}: empty bottom", index), index, "bottom");
    if (p.key_clue_library.empty())
        throw CorpusError(fmt::format("record {}: key_clues must not be empty", index), index, "key_clues");
    return p;
}

} // namespace

std::vector<Puzzle> parse_corpus(const json& doc) {
    if (!doc.is_array()) throw CorpusError("corpus must be a JSON array of puzzle records");
    std::vector<Puzzle> out;
    std::set<std::string> ids;
    int index = 0;
    for (const auto& rec : doc) {
        Puzzle p = parse_record(rec, index);
        if (!ids.insert(p.id).second)
            throw CorpusError(fmt::format("record {}: duplicate id '{}'", index, p.id), index, "id");
        out.push_back(std::move(p));
        ++index;
    }
    return out;
}

std::vector<Puzzle> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError(fmt::format("cannot read corpus file {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CorpusError(fmt::format("malformed JSON in {}: {}", path.string(), e.what()));
    }
    return parse_corpus(doc);
}

json puzzle_to_json(const Puzzle& p) {
    return json{{"id", p.id},
                {"title", p.title},
                {"language", language_code(p.language)},
                {"genre", genre_name(p.genre)},
                {"surface", p.surface},
                {"bottom", p.bottom},
                {"key_clues", p.key_clue_library}};
}

json corpus_to_json(std::span<const Puzzle> puzzles) {
    json arr = json::array();
    for (const auto& p : puzzles) arr.push_back(puzzle_to_json(p));
    return arr;
}

const Puzzle* find_puzzle(std::span<const Puzzle> puzzles, std::string_view id) {
    for (const auto& p : puzzles) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

CorpusStats corpus_stats(std::span<const Puzzle> puzzles) {
    CorpusStats s;
    s.puzzles = puzzles.size();
    if (puzzles.empty()) return s;
    double surf = 0, bot = 0, clues = 0;
    for (const auto& p : puzzles) {
        ++s.per_genre[std::string(genre_name(p.genre))];
        ++s.per_language[std::string(language_code(p.language))];
        surf += static_cast<double>(text::utf8_length(p.surface));
        bot += static_cast<double>(text::utf8_length(p.bottom));
        clues += static_cast<double>(p.key_clue_library.size());
    }
    const auto n = static_cast<double>(puzzles.size());
    s.mean_surface_chars = surf / n;
    s.mean_bottom_chars = bot / n;
    s.mean_key_clues = clues / n;
    return s;
}

} // namespace turtlesoup
