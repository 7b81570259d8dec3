// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/corpus.hpp"
#include "turtlesoup/questioner.hpp"
#include "turtlesoup/role_client.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

struct Transcript;

struct PointPlan {
    int n_logic = 2;   // [2, 5]
    int m_details = 3; // [3, 8]

    bool operator==(const PointPlan&) const = default;
};

// Logic points by length band: <180 -> 2, <320 -> 3, <500 -> 4, else 5.
// Detail points: floor(len / 70) clipped to [3, 8]. Length is in characters.
PointPlan plan_point_counts(std::string_view bottom);

struct EvalPoints {
    std::vector<std::string> logic_true;
    std::vector<std::string> details_true;
};

// Bullets under "[Logical Relationships]" and "[Detailed Information]";
// "Logic N:" / "Detail N:" labels are stripped.
EvalPoints parse_eval_points(std::string_view raw);

inline constexpr double kValidityThreshold = 0.5;
inline constexpr double kHighConfidenceThreshold = 0.8;

// 0 when unmatched or below 0.5, 1.0 at or above 0.8, raw otherwise.
double calibrate(double raw, bool matched);

struct MatchResult {
    std::optional<int> best_match_index; // 1-based into the predicted list
    double raw_score = 0.0;
    double calibrated = 0.0;
};

struct ScoreWeights {
    double logic = 0.3;
    double details = 0.3;
    double conclusion = 0.4;
};

double weighted_overall(double s_logic, double s_details, double s_conclusion, ScoreWeights w = {});

struct PointMatch {
    std::string dimension; // logic | details | conclusion
    std::string ground_truth;
    MatchResult result;
};

// All four scores are percentages kept at full precision; rounding to two
// decimals happens only when reports are printed.
struct ScoreCard {
    std::string puzzle_id;
    double s_logic = 0.0;
    double s_details = 0.0;
    double s_conclusion = 0.0;
    double s_overall = 0.0;
    ScoreWeights weights;
    PointPlan plan;
    std::vector<PointMatch> matches;

    nlohmann::json to_json() const;
    static ScoreCard from_json(const nlohmann::json& j);
};

double round2(double v);

class Evaluator {
public:
    explicit Evaluator(RoleClient judge, int max_reparse = kDefaultMaxReparse);

    // Re-asks once if either section comes back empty; throws EvaluationError
    // if still empty.
    EvalPoints extract_points(std::string_view bottom, const PointPlan& plan) const;

    // Empty `predicted` short-circuits to no-match without a judge call.
    MatchResult match_point(std::string_view ground_truth, std::span<const std::string> predicted) const;

    // 100 * mean calibrated score over ground-truth points, each matched
    // independently (one predicted point may serve several).
    double score_dimension(std::span<const std::string> gt_points, std::span<const std::string> predicted,
                           std::vector<PointMatch>* matches = nullptr, std::string_view dimension = {}) const;

    // 100 * raw judge score against the full bottom, uncalibrated.
    double score_conclusion(std::string_view c_pred, std::string_view bottom, MatchResult* out = nullptr) const;

    ScoreCard evaluate(const BeliefState& summary, const Puzzle& p) const;
    // Throws EvaluationError when the transcript has no final summary.
    ScoreCard evaluate(const Transcript& transcript, const Puzzle& p) const;

    Evaluator with_log(ExchangeLog* log) const { return Evaluator(judge_.with_log(log), max_reparse_); }

private:
    RoleClient judge_;
    int max_reparse_;
};

} // namespace turtlesoup
