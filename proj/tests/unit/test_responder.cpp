// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"
#include "turtlesoup/errors.hpp"

#include <gtest/gtest.h>

using namespace ts_test;

TEST(ParseVerdict, FirstWordIsStrict) {
    EXPECT_EQ(parse_verdict("Yes"), Verdict::Yes);
    EXPECT_EQ(parse_verdict("  no."), Verdict::No);
    EXPECT_EQ(parse_verdict("UNKNOWN"), Verdict::Unknown);
    EXPECT_EQ(parse_verdict("\"Yes\", because the man is short"), Verdict::Yes);
    EXPECT_THROW(parse_verdict("Probably yes"), ParseError);
    EXPECT_THROW(parse_verdict("Irrelevant"), ParseError);
    EXPECT_THROW(parse_verdict(""), ParseError);
    EXPECT_THROW(parse_verdict("Yesterday"), ParseError);
}

TEST(ResponderReply, RenderedForms) {
    EXPECT_EQ(ResponderReply::make(Verdict::Yes, true).rendered, "Yes<Key Clue>");
    EXPECT_EQ(ResponderReply::make(Verdict::No, false).rendered, "No");
    EXPECT_EQ(ResponderReply::make(Verdict::Unknown, true).rendered, "Unknown<Key Clue>");
}

TEST(ResponderReply, RenderedRoundTripsForAllSixCombinations) {
    for (Verdict v : {Verdict::Yes, Verdict::No, Verdict::Unknown}) {
        for (bool flag : {false, true}) {
            const auto r = ResponderReply::make(v, flag);
            EXPECT_EQ(r.rendered.ends_with(kKeyClueMarker), flag);
            EXPECT_EQ(parse_rendered(r.rendered), r);
        }
    }
    EXPECT_FALSE(parse_rendered("Maybe"));
    EXPECT_FALSE(parse_rendered("<Key Clue>"));
}

TEST(Responder, ShortManKeyClue) {
    Responder r(client(oracle({{"responder.answer", "Yes"}, {"responder.key_clue", "Yes"}})));
    EXPECT_EQ(r.respond(short_man(), "Was the man short?", true).rendered, "Yes<Key Clue>");
}

TEST(Responder, KeyClueDisabledMakesNoJudgeCall) {
    auto o = oracle({{"responder.answer", "Yes"}});
    Responder r(client(o));
    const auto reply = r.respond(short_man(), "Was the man short?", false);
    EXPECT_EQ(reply.rendered, "Yes");
    EXPECT_EQ(o->calls(), 1u);
}

TEST(Responder, AnswerPromptCarriesPuzzleAndQuestion) {
    ExchangeLog log;
    Responder r(client(oracle({{"responder.answer", "No"}}), "responder", &log));
    EXPECT_EQ(r.answer_question(short_man(), "Did he take the stairs?"), Verdict::No);
    ASSERT_EQ(log.exchanges.size(), 1u);
    const auto& msgs = log.exchanges[0].messages;
    ASSERT_EQ(msgs.size(), 2u);
    EXPECT_NE(msgs[0].content.find(short_man().bottom), std::string::npos);
    EXPECT_EQ(msgs[1].content, "Did he take the stairs?");
}

TEST(Responder, KeyCluePromptNumbersTheLibrary) {
    ExchangeLog log;
    Responder r(client(oracle({{"responder.key_clue", "No"}}), "responder", &log));
    EXPECT_FALSE(r.identify_key_clue(short_man(), "Was it raining?"));
    const auto& body = log.exchanges.at(0).messages.at(0).content;
    EXPECT_NE(body.find("1. The man's height is a critical factor."), std::string::npos);
    EXPECT_NE(body.find("2. The umbrella lets him reach higher buttons."), std::string::npos);
}

TEST(Responder, UnparseableVerdictReasksThenDefaults) {
    ExchangeLog log;
    Responder r(client(oracle({{"responder.answer", "Hmm"}, {"responder.answer", "No."}}), "responder", &log));
    EXPECT_EQ(r.answer_question(short_man(), "q?"), Verdict::No);
    EXPECT_TRUE(log.events.empty());

    ExchangeLog log2;
    Responder r2(client(oracle({{"responder.answer", "Hmm"}, {"responder.answer", "Perhaps"}}), "responder", &log2));
    EXPECT_EQ(r2.answer_question(short_man(), "q?"), Verdict::Unknown);
    ASSERT_EQ(log2.events.size(), 1u);
    EXPECT_EQ(log2.events[0].kind, "degradation");
}

TEST(Responder, KeyClueFlagFallsBackToLastWord) {
    Responder r(client(oracle({{"responder.key_clue", "Reasoning: the question targets height. Final answer: Yes"}})));
    EXPECT_TRUE(r.identify_key_clue(short_man(), "Was the man short?"));

    ExchangeLog log;
    Responder r2(client(oracle({{"responder.key_clue", "unclear"}, {"responder.key_clue", "still unclear"}}),
                        "responder", &log));
    EXPECT_FALSE(r2.identify_key_clue(short_man(), "q?"));
    EXPECT_EQ(log.events.size(), 1u);
}

TEST(Responder, EmptyQuestionIsRejected) {
    Responder r(client(oracle({})));
    EXPECT_THROW(r.answer_question(short_man(), "  "), ValidationError);
}
