// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"
#include "turtlesoup/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ts_test;

TEST(LocalAnalysis, SplitsOnHeadings) {
    const auto a = split_local_analysis(
        "### New Information Revealed\nHe is short.\nKnowledge Conflict: none\n**Understanding Adjustment:** height");
    EXPECT_EQ(a.new_information, "He is short.");
    EXPECT_EQ(a.conflicts, "none");
    EXPECT_EQ(a.adjustments, "height");
    EXPECT_EQ(split_local_analysis("just prose").new_information, "just prose");
    EXPECT_EQ(split_local_analysis("just prose").text(), "just prose");
}

TEST(Aps, LabelledBlocks) {
    const auto aps = parse_aps(
        "1. Point of Doubt: why stairs\n   Analysis: maybe height\n   Question Suggestion: Is he short?\n"
        "Doubt 2: rain\nAnalysis 2: umbrella\ncontinues here\nProposal 2: Does rain matter?");
    ASSERT_EQ(aps.size(), 2u);
    EXPECT_EQ(aps[0], (ApsItem{"why stairs", "maybe height", "Is he short?"}));
    EXPECT_EQ(aps[1].analysis, "umbrella\ncontinues here");
}

TEST(Aps, InlineForm) {
    const auto aps = parse_aps("- \"why stairs\" + he might be short + Is he short?");
    ASSERT_EQ(aps.size(), 1u);
    EXPECT_EQ(aps[0], (ApsItem{"why stairs", "he might be short", "Is he short?"}));
}

TEST(Aps, RenderParsesBack) {
    const std::vector<ApsItem> aps{{"a", "b", "c?"}, {"d", "e", "f?"}};
    EXPECT_EQ(parse_aps(render_aps(aps)), aps);
    EXPECT_EQ(render_aps({}), "(none)");
    EXPECT_TRUE(parse_aps("Point of Doubt: only a doubt").empty());
}

TEST(NumberedList, ItemsInOrder) {
    EXPECT_EQ(parse_numbered_list("Here:\n1. A?\n2) B?\n3: C?\n- D?"),
              (std::vector<std::string>{"A?", "B?", "C?"}));
}

TEST(NormalizeQuestion, Forms) {
    EXPECT_EQ(normalize_question(" [Is he short] "), "Is he short?");
    EXPECT_EQ(normalize_question("\"Is he short?\""), "Is he short?");
    EXPECT_EQ(normalize_question("Is he short."), "Is he short?");
    EXPECT_EQ(normalize_question("  "), "");
}

TEST(TokenOverlap, Ratio) {
    EXPECT_DOUBLE_EQ(token_overlap("is he short", "is he short"), 1.0);
    EXPECT_DOUBLE_EQ(token_overlap("is he short", "is he tall"), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(token_overlap("", "x"), 0.0);
}

TEST(MatchSelection, ExactThenOverlap) {
    const CandidateSet c{{"Is he short?", "Was it raining?", "Did he live alone?"}};
    EXPECT_EQ(match_selection("Was it raining?", c), 1u);
    EXPECT_EQ(match_selection("  was it   raining ", c), 1u);
    EXPECT_EQ(match_selection("I pick:\n3. Did he live alone?", c), 2u);
    EXPECT_EQ(match_selection("Did the man live alone", c), 2u);
    EXPECT_FALSE(match_selection("none of these", c));
}

TEST(Strategy, TemplateIds) {
    EXPECT_EQ(strategy_template_id(Genre::Original), "strategy.clever_logic");
    EXPECT_EQ(strategy_template_id(Genre::Default), "strategy.default");
    for (Genre g : kNarrativeGenres) EXPECT_TRUE(prompts().contains(strategy_template_id(g)));
}

TEST(Questioner, UpdateBeliefParsesJson) {
    Questioner q(client(oracle({{"questioner.belief",
                                 R"({"details":["d1"],"logic":["l1","l2"],"conclusion":" He is short. "})"}})));
    const auto b = q.update_belief("s", "(none)", "(none)", {}, 5);
    EXPECT_EQ(b.logic, (std::vector<std::string>{"l1", "l2"}));
    EXPECT_EQ(b.details, (std::vector<std::string>{"d1"}));
    EXPECT_EQ(b.conclusion, "He is short.");
    EXPECT_EQ(b.updated_at_turn, 5);
}

TEST(Questioner, UpdateBeliefKeepsPreviousOnFailure) {
    const BeliefState prev{{"l"}, {"d"}, "c", 5};
    ExchangeLog log;
    Questioner q(client(oracle({{"questioner.belief", "no"}, {"questioner.belief", "still no"},
                                {"questioner.belief", "nope"}}),
                        "questioner", &log));
    EXPECT_EQ(q.update_belief("s", "", "", prev, 10), prev);
    EXPECT_EQ(log.events.size(), 1u);

    Questioner q2(client(oracle({{"questioner.belief", R"({"details":[],"logic":[],"conclusion":""})"}})));
    EXPECT_EQ(q2.update_belief("s", "", "", prev, 10), prev);
}

TEST(Questioner, PreviousSummaryIsPassedAsJson) {
    ExchangeLog log;
    Questioner q(client(oracle({{"questioner.belief", R"({"details":[],"logic":[],"conclusion":"x"})"}}),
                        "questioner", &log));
    q.update_belief("s", "", "", BeliefState{{"L"}, {"D"}, "C", 5}, 10);
    EXPECT_NE(log.exchanges[0].messages[0].content.find(R"("conclusion":"C")"), std::string::npos);
}

TEST(Questioner, ClassifyMakesThreeIdenticalCalls) {
    ExchangeLog log;
    Questioner q(client(oracle({{"metacog.classify", "Mind Game"}, {"metacog.classify", "Mind Game"},
                                {"metacog.classify", "Supernatural"}}),
                        "questioner", &log));
    const auto v = q.classify_genre("s", "h", "c", Genre::Default);
    ASSERT_TRUE(v);
    EXPECT_EQ(v->genre, Genre::MindGame);
    EXPECT_DOUBLE_EQ(v->vote_confidence, 2.0 / 3.0);
    ASSERT_EQ(log.exchanges.size(), 3u);
    EXPECT_EQ(log.exchanges[0].messages, log.exchanges[2].messages);
    EXPECT_NE(log.exchanges[0].messages[0].content.find(
                  "Crime Thriller, Mind Game, Supernatural, Constant Change, Clever Logic"),
              std::string::npos);
}

TEST(Questioner, CandidatesReaskThenPad) {
    Questioner q(client(oracle({{"action.candidates", "1. Is he short?"}, {"action.candidates", "1. Is he tall?\n2. Is it raining"}})));
    const auto c = q.generate_candidates("s", {}, {}, "strategy", "(none)");
    EXPECT_EQ(c.questions, (std::array<std::string, 3>{"Is he tall?", "Is it raining?", "Is it raining?"}));

    Questioner none(client(oracle({{"action.candidates", "no list"}, {"action.candidates", "still none"}})));
    EXPECT_THROW(none.generate_candidates("s", {}, {}, "strategy", "(none)"), ParseError);
}

TEST(Questioner, SelectAlwaysReturnsACandidate) {
    const CandidateSet c{{"Is he short?", "Was it raining?", "Did he live alone?"}};
    std::mt19937 rng(3);
    const std::vector<std::string> replies{"Was it raining?", "nonsense", "", "3", "Is he tall?",
                                           "Did he live alone? Also Is he short?"};
    std::vector<ScriptEntry> script;
    for (int i = 0; i < 60; ++i) script.push_back({"action.select", replies[rng() % replies.size()]});
    Questioner q(client(oracle(script)));
    for (int i = 0; i < 60; ++i) {
        const auto s = q.select_question(c, "s", {}, {}, "(none)", {}, {});
        EXPECT_NE(std::find(c.questions.begin(), c.questions.end(), s), c.questions.end()) << s;
    }
}

TEST(Questioner, SelectFallsBackOnGatewayFailure) {
    const CandidateSet c{{"A?", "B?", "C?"}};
    ExchangeLog log;
    Questioner q(client(oracle({}), "questioner", &log));
    EXPECT_EQ(q.select_question(c, "s", {}, {}, "(none)", {}, {}), "A?");
    EXPECT_FALSE(log.events.empty());
}

TEST(Questioner, SelectPromptListsBlacklist) {
    const CandidateSet c{{"A?", "B?", "C?"}};
    ExchangeLog log;
    const std::vector<std::string> black{"Did he like stairs?"};
    Questioner q(client(oracle({{"action.select", "B?"}}), "questioner", &log));
    EXPECT_EQ(q.select_question(c, "s", {}, {}, "(none)", {}, black), "B?");
    EXPECT_NE(log.exchanges[0].messages[0].content.find("Did he like stairs?"), std::string::npos);
}
