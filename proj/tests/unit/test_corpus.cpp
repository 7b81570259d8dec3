// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"
#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <gtest/gtest.h>

using namespace ts_test;

TEST(Corpus, SeedCorpusLoadsInFileOrder) {
    const auto& c = seed_corpus();
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[0].title, "The Slide");
    EXPECT_EQ(c[0].genre, Genre::Supernatural);
    EXPECT_EQ(c[1].genre, Genre::ConstantChange);
    EXPECT_EQ(c[2].genre, Genre::CleverLogic);
    EXPECT_EQ(c[3].genre, Genre::Original);
    EXPECT_EQ(c[0].key_clue_library.size(), 7u);
    for (const auto& p : c) EXPECT_TRUE(validate_puzzle(p).empty()) << p.id;
}

TEST(Corpus, RoundTripIsIdentity) {
    const auto& c = seed_corpus();
    EXPECT_EQ(parse_corpus(corpus_to_json(c)), c);
}

TEST(Corpus, EmptyArrayIsEmptyCorpus) { EXPECT_TRUE(parse_corpus(json::array()).empty()); }

TEST(Corpus, MissingBottomNamesRecordAndField) {
    json doc = corpus_to_json(seed_corpus());
    doc[0].erase("bottom");
    try {
        parse_corpus(doc);
        FAIL() << "expected CorpusError";
    } catch (const CorpusError& e) {
        EXPECT_EQ(e.record_index, 0);
        EXPECT_EQ(e.field, "bottom");
    }
}

TEST(Corpus, RejectsUnknownAndDefaultGenre) {
    for (const char* g : {"Default", "Horror"}) {
        json doc = corpus_to_json(seed_corpus());
        doc[2]["genre"] = g;
        try {
            parse_corpus(doc);
            FAIL() << g;
        } catch (const CorpusError& e) {
            EXPECT_EQ(e.record_index, 2);
            EXPECT_EQ(e.field, "genre");
        }
    }
}

TEST(Corpus, DuplicateIdsAreALoadError) {
    json doc = corpus_to_json(seed_corpus());
    doc[1]["id"] = doc[0]["id"];
    EXPECT_TRUE(validate_puzzle(parse_corpus(json::array({doc[1]}))[0]).empty());
    try {
        parse_corpus(doc);
        FAIL();
    } catch (const CorpusError& e) {
        EXPECT_EQ(e.record_index, 1);
        EXPECT_EQ(e.field, "id");
    }
}

TEST(Corpus, ValidateReportsEachBrokenInvariant) {
    Puzzle p = seed_corpus()[0];
    p.key_clue_library.clear();
    EXPECT_EQ(validate_puzzle(p).size(), 1u);
    p.surface = " ";
    p.genre = Genre::Default;
    EXPECT_EQ(validate_puzzle(p).size(), 3u);
}

TEST(Corpus, MalformedFileIsAnError) {
    TempDir dir("corpus");
    std::ofstream(dir.path / "bad.json") << "[{";
    EXPECT_THROW(load_corpus(dir.path / "bad.json"), CorpusError);
    EXPECT_THROW(load_corpus(dir.path / "missing.json"), CorpusError);
}

TEST(Corpus, StatsAreInCharacters) {
    const auto s = corpus_stats(seed_corpus());
    EXPECT_EQ(s.puzzles, 4u);
    EXPECT_EQ(s.per_language.at("en"), 4u);
    EXPECT_EQ(s.per_genre.size(), 4u);
    double bottom = 0;
    for (const auto& p : seed_corpus()) bottom += static_cast<double>(text::utf8_length(p.bottom));
    EXPECT_DOUBLE_EQ(s.mean_bottom_chars, bottom / 4.0);
}
