// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/genre.hpp"
#include "turtlesoup/text_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace turtlesoup;

TEST(TextUtil, TrimAndCollapse) {
    EXPECT_EQ(text::trim("  a b \n"), "a b");
    EXPECT_EQ(text::collapse_whitespace("  a \t\n b  c "), "a b c");
    EXPECT_EQ(text::collapse_whitespace(""), "");
}

TEST(TextUtil, Utf8LengthCountsCodePoints) {
    EXPECT_EQ(text::utf8_length("abc"), 3u);
    EXPECT_EQ(text::utf8_length("\xE6\xB1\xA4\xE5\xBA\x95"), 2u); // two CJK characters
    EXPECT_EQ(text::utf8_length(""), 0u);
}

TEST(TextUtil, Utf8LengthMatchesBytewiseCount) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s(rng() % 40, '\0');
        for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
        std::size_t want = 0;
        for (unsigned char c : s) want += (c & 0xC0) != 0x80;
        ASSERT_EQ(text::utf8_length(s), want);
    }
}

TEST(TextUtil, WordTokensLowercaseAndDedup) {
    const auto t = text::word_tokens("Was the man, the MAN, short?");
    EXPECT_EQ(t, (std::set<std::string>{"was", "the", "man", "short"}));
}

TEST(TextUtil, StripListMarker) {
    EXPECT_EQ(text::strip_list_marker("- item"), "item");
    EXPECT_EQ(text::strip_list_marker("  3. item"), "item");
    EXPECT_EQ(text::strip_list_marker("12) item"), "item");
    EXPECT_EQ(text::strip_list_marker("plain"), "plain");
}

TEST(TextUtil, SplitLinesKeepsEmptyAndDropsCr) {
    auto lines = text::split_lines("a\r\n\nb");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "a");
    EXPECT_EQ(lines[1], "");
    EXPECT_EQ(lines[2], "b");
}

TEST(Genre, CorpusNamesAreStrict) {
    EXPECT_EQ(parse_corpus_genre("Crime Thriller"), Genre::CrimeThriller);
    EXPECT_EQ(parse_corpus_genre("Original (Expert-Authored)"), Genre::Original);
    EXPECT_EQ(parse_corpus_genre("Original"), Genre::Original);
    EXPECT_FALSE(parse_corpus_genre("Default"));
    EXPECT_FALSE(parse_corpus_genre("crime thriller"));
    EXPECT_FALSE(parse_corpus_genre("Horror"));
}

TEST(Genre, VotesAreLenient) {
    EXPECT_EQ(parse_genre_vote("Clever Logic"), Genre::CleverLogic);
    EXPECT_EQ(parse_genre_vote("  mind game. "), Genre::MindGame);
    EXPECT_EQ(parse_genre_vote("Worldly Vicissitudes"), Genre::ConstantChange);
    EXPECT_EQ(parse_genre_vote("The story is best described as Supernatural."), Genre::Supernatural);
    EXPECT_FALSE(parse_genre_vote("Either Crime Thriller or Mind Game"));
    EXPECT_FALSE(parse_genre_vote("comedy"));
    EXPECT_FALSE(parse_genre_vote(""));
}
