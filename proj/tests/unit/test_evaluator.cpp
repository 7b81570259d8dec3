// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"
#include "turtlesoup/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ts_test;

namespace {

std::string match_reply(std::optional<int> idx, double score) {
    return json{{"best_match_index", idx ? json(*idx) : json()}, {"best_match_score", score}}.dump();
}

// Reference calibration, written from the three cases.
double calibrate_oracle(double raw, bool matched) {
    if (!matched) return 0.0;
    if (raw < 0.5) return 0.0;
    if (raw >= 0.8) return 1.0;
    return raw;
}

} // namespace

TEST(PointPlan, Examples) {
    EXPECT_EQ(plan_point_counts(std::string(150, 'x')), (PointPlan{2, 3}));
    EXPECT_EQ(plan_point_counts(std::string(600, 'x')), (PointPlan{5, 8}));
    EXPECT_EQ(plan_point_counts(std::string(179, 'x')).n_logic, 2);
    EXPECT_EQ(plan_point_counts(std::string(180, 'x')).n_logic, 3);
    EXPECT_EQ(plan_point_counts(std::string(320, 'x')).n_logic, 4);
    EXPECT_EQ(plan_point_counts(std::string(500, 'x')).n_logic, 5);
    EXPECT_EQ(plan_point_counts(std::string(350, 'x')).m_details, 5);
}

TEST(PointPlan, CountsCharactersNotBytes) {
    std::string s;
    for (int i = 0; i < 200; ++i) s += "\xE6\xB1\xA4";
    EXPECT_EQ(plan_point_counts(s), (PointPlan{3, 3}));
}

TEST(PointPlan, SweepStaysInRangeAndIsMonotone) {
    PointPlan prev{2, 3};
    for (std::size_t len = 0; len <= 2000; ++len) {
        const auto p = plan_point_counts(std::string(len, 'a'));
        ASSERT_GE(p.n_logic, 2);
        ASSERT_LE(p.n_logic, 5);
        ASSERT_GE(p.m_details, 3);
        ASSERT_LE(p.m_details, 8);
        ASSERT_GE(p.n_logic, prev.n_logic);
        ASSERT_GE(p.m_details, prev.m_details);
        prev = p;
    }
}

TEST(Calibrate, Examples) {
    EXPECT_EQ(calibrate(0.85, true), 1.0);
    EXPECT_EQ(calibrate(0.65, true), 0.65);
    EXPECT_EQ(calibrate(0.3, true), 0.0);
    EXPECT_EQ(calibrate(0.8, true), 1.0);
    EXPECT_EQ(calibrate(0.5, true), 0.5);
    EXPECT_EQ(calibrate(0.95, false), 0.0);
}

TEST(Calibrate, SweepMatchesOracle) {
    for (int i = 0; i <= 10000; ++i) {
        const double raw = i / 10000.0;
        for (bool m : {false, true}) ASSERT_EQ(calibrate(raw, m), calibrate_oracle(raw, m)) << raw;
    }
}

TEST(WeightedOverall, Identity) { EXPECT_NEAR(weighted_overall(54.72, 56.68, 59.45), 57.14, 0.1); }

TEST(EvalPoints, ParsesSections) {
    const auto pts = parse_eval_points(
        "Here you go.\n[Logical Relationships]\n- Logic 1: A\n- Logic 2: B\n\n**[Detailed Information]**\n- Detail 1: C\n* D\n");
    EXPECT_EQ(pts.logic_true, (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(pts.details_true, (std::vector<std::string>{"C", "D"}));
}

TEST(Evaluator, ExtractReasksThenFails) {
    Evaluator ok(client(oracle({{"eval.extract", "nothing"},
                                {"eval.extract", "[Logical Relationships]\n- a\n[Detailed Information]\n- b"}})));
    EXPECT_EQ(ok.extract_points("bottom", {}).details_true, (std::vector<std::string>{"b"}));
    Evaluator bad(client(oracle({{"eval.extract", "nothing"}, {"eval.extract", "[Logical Relationships]\n- a"}})));
    EXPECT_THROW(bad.extract_points("bottom", {}), EvaluationError);
}

TEST(Evaluator, MatchSchemas) {
    const std::vector<std::string> pred{"p1", "p2"};
    auto run = [&](const std::string& reply) {
        return Evaluator(client(oracle({{"eval.match", reply}}))).match_point("gt", pred);
    };
    auto a = run(match_reply(2, 0.85));
    EXPECT_EQ(a.best_match_index, 2);
    EXPECT_EQ(a.calibrated, 1.0);

    auto b = run(match_reply(std::nullopt, 0.3));
    EXPECT_FALSE(b.best_match_index);
    EXPECT_EQ(b.raw_score, 0.3);
    EXPECT_EQ(b.calibrated, 0.0);

    auto low = run(match_reply(1, 0.3));
    EXPECT_FALSE(low.best_match_index);
    EXPECT_EQ(low.calibrated, 0.0);

    ExchangeLog log;
    Evaluator e(client(oracle({{"eval.match", match_reply(std::nullopt, 0.7)}, {"eval.match", match_reply(3, 0.9)}}),
                       "judge", &log));
    EXPECT_EQ(e.match_point("gt", pred).raw_score, 0.0);
    EXPECT_EQ(e.match_point("gt", pred).calibrated, 0.0);
    EXPECT_EQ(log.events.size(), 2u);
}

TEST(Evaluator, EmptyPredictionsSkipTheJudge) {
    auto o = oracle({});
    Evaluator e(client(o));
    EXPECT_EQ(e.score_dimension(std::vector<std::string>{"a", "b"}, {}), 0.0);
    EXPECT_EQ(e.score_conclusion("  ", "bottom"), 0.0);
    EXPECT_EQ(o->calls(), 0u);
}

TEST(Evaluator, ConclusionIsUncalibrated) {
    Evaluator e(client(oracle({{"eval.match", match_reply(1, 0.65)}, {"eval.match", match_reply(std::nullopt, 0.3)}})));
    EXPECT_DOUBLE_EQ(e.score_conclusion("c", "bottom"), 65.0);
    EXPECT_DOUBLE_EQ(e.score_conclusion("c", "bottom"), 30.0);
}

TEST(Evaluator, OnePredictionMayServeSeveralPoints) {
    Evaluator e(client(oracle({{"eval.match", match_reply(1, 0.9)}, {"eval.match", match_reply(1, 0.6)}})));
    std::vector<PointMatch> ms;
    const double s = e.score_dimension(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"p"}, &ms, "logic");
    EXPECT_DOUBLE_EQ(s, 100.0 * (1.0 + 0.6) / 2.0);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_EQ(ms[1].dimension, "logic");
    EXPECT_EQ(ms[1].ground_truth, "b");
}

TEST(Evaluator, ScoreCardMatchesRecomputation) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Puzzle& p = seed_corpus()[static_cast<std::size_t>(trial) % 4];
        std::vector<ScriptEntry> script{{"eval.extract",
                                         "[Logical Relationships]\n- L1\n- L2\n- L3\n[Detailed Information]\n- D1\n- D2\n- D3\n- D4"}};
        std::vector<std::pair<bool, double>> judged;
        for (int i = 0; i < 8; ++i) {
            const bool matched = u01(rng) < 0.7;
            const double raw = std::round(u01(rng) * 1000) / 1000;
            judged.emplace_back(matched, raw);
            script.push_back({"eval.match", match_reply(matched ? std::optional<int>(1) : std::nullopt,
                                                        matched ? raw : std::min(raw, 0.49))});
        }
        Evaluator e(client(oracle(script)));
        const BeliefState summary{{"pl"}, {"pd1", "pd2"}, "pc", 30};
        const auto card = e.evaluate(summary, p);

        double sl = 0, sd = 0;
        for (int i = 0; i < 3; ++i) sl += calibrate_oracle(judged[i].second, judged[i].first);
        for (int i = 3; i < 7; ++i) sd += calibrate_oracle(judged[i].second, judged[i].first);
        const double sc = judged[7].first ? judged[7].second : std::min(judged[7].second, 0.49);
        EXPECT_NEAR(card.s_logic, 100 * sl / 3, 1e-9);
        EXPECT_NEAR(card.s_details, 100 * sd / 4, 1e-9);
        EXPECT_NEAR(card.s_conclusion, 100 * sc, 1e-9);
        EXPECT_NEAR(card.s_overall, 0.3 * card.s_logic + 0.3 * card.s_details + 0.4 * card.s_conclusion, 1e-9);
        EXPECT_EQ(card.matches.size(), 8u);
        EXPECT_EQ(card.matches.back().ground_truth, p.bottom);
        EXPECT_EQ(card.plan, plan_point_counts(p.bottom));
    }
}

TEST(ScoreCard, JsonRoundTrip) {
    ScoreCard c;
    c.puzzle_id = "x";
    c.s_logic = 1.0 / 3.0;
    c.s_details = 50;
    c.s_conclusion = 65;
    c.s_overall = weighted_overall(c.s_logic, c.s_details, c.s_conclusion);
    c.plan = {4, 6};
    c.matches.push_back({"logic", "gt", MatchResult{2, 0.7, 0.7}});
    const auto j = c.to_json();
    EXPECT_EQ(j["plan"], (json{{"n", 4}, {"m", 6}}));
    EXPECT_EQ(ScoreCard::from_json(j).to_json(), j);
}

TEST(Evaluator, TranscriptWithoutSummaryFails) {
    Transcript t;
    t.puzzle_id = "x";
    EXPECT_THROW(Evaluator(client(oracle({}))).evaluate(t, short_man()), EvaluationError);
}
