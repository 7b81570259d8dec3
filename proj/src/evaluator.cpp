// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/evaluator.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/session.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace turtlesoup {

using nlohmann::json;

namespace {

constexpr std::string_view kExtractCorrection =
    "Both sections are required. Output the [Logical Relationships] and [Detailed Information] sections, "
    "each with at least one bullet, in the requested format.";

// "Logic 2: text" -> "text"
std::string strip_point_label(std::string s, std::string_view label) {
    if (s.size() < label.size() || !text::iequals(std::string_view(s).substr(0, label.size()), label)) return s;
    std::size_t i = label.size();
    while (i < s.size() && (s[i] == ' ' || std::isdigit(static_cast<unsigned char>(s[i])))) ++i;
    if (i < s.size() && s[i] == ':') return text::trim(std::string_view(s).substr(i + 1));
    return s;
}

std::string numbered(std::span<const std::string> items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += fmt::format("{}{}. {}", i ? "\n" : "", i + 1, items[i]);
    return out;
}

} // namespace

PointPlan plan_point_counts(std::string_view bottom) {
    const auto len = text::utf8_length(bottom);
    PointPlan plan;
    if (len < 180) plan.n_logic = 2;
    else if (len < 320) plan.n_logic = 3;
    else if (len < 500) plan.n_logic = 4;
    else plan.n_logic = 5;
    plan.m_details = static_cast<int>(std::clamp<std::size_t>(len / 70, 3, 8));
    return plan;
}

EvalPoints parse_eval_points(std::string_view raw) {
    enum Section { None, Logic, Details };
    EvalPoints out;
    Section sec = None;
    for (const auto& line : text::split_lines(raw)) {
        const std::string t = text::trim(line);
        if (t.empty()) continue;
        const std::string lower = text::to_lower(t);
        if (lower.find("logical relationships") != std::string::npos && lower.size() < 40) {
            sec = Logic;
            continue;
        }
        if (lower.find("detailed information") != std::string::npos && lower.size() < 40) {
            sec = Details;
            continue;
        }
        if (sec == None) continue;
        std::string item = text::strip_list_marker(t);
        item = strip_point_label(std::move(item), sec == Logic ? "logic" : "detail");
        if (item.empty() || item == "..." || item == "…") continue;
        (sec == Logic ? out.logic_true : out.details_true).push_back(std::move(item));
    }
    return out;
}

double calibrate(double raw, bool matched) {
    if (!matched || !(raw >= kValidityThreshold)) return 0.0;
    if (raw >= kHighConfidenceThreshold) return 1.0;
    return raw;
}

double weighted_overall(double s_logic, double s_details, double s_conclusion, ScoreWeights w) {
    return w.logic * s_logic + w.details * s_details + w.conclusion * s_conclusion;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

json ScoreCard::to_json() const {
    json ms = json::array();
    for (const auto& m : matches) {
        ms.push_back({{"dimension", m.dimension},
                      {"ground_truth", m.ground_truth},
                      {"best_match_index", m.result.best_match_index ? json(*m.result.best_match_index) : json()},
                      {"raw_score", m.result.raw_score},
                      {"calibrated", m.result.calibrated}});
    }
    return json{{"puzzle_id", puzzle_id},
                {"s_logic", s_logic},
                {"s_details", s_details},
                {"s_conclusion", s_conclusion},
                {"s_overall", s_overall},
                {"weights", {{"logic", weights.logic}, {"details", weights.details}, {"conclusion", weights.conclusion}}},
                {"plan", {{"n", plan.n_logic}, {"m", plan.m_details}}},
                {"matches", std::move(ms)}};
}

ScoreCard ScoreCard::from_json(const json& j) {
    ScoreCard c;
    c.puzzle_id = j.at("puzzle_id").get<std::string>();
    c.s_logic = j.at("s_logic").get<double>();
    c.s_details = j.at("s_details").get<double>();
    c.s_conclusion = j.at("s_conclusion").get<double>();
    c.s_overall = j.at("s_overall").get<double>();
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        c.weights = {w.at("logic").get<double>(), w.at("details").get<double>(), w.at("conclusion").get<double>()};
    }
    if (j.contains("plan")) c.plan = {j.at("plan").at("n").get<int>(), j.at("plan").at("m").get<int>()};
    for (const auto& m : j.value("matches", json::array())) {
        PointMatch pm;
        pm.dimension = m.at("dimension").get<std::string>();
        pm.ground_truth = m.at("ground_truth").get<std::string>();
        if (!m.at("best_match_index").is_null()) pm.result.best_match_index = m.at("best_match_index").get<int>();
        pm.result.raw_score = m.at("raw_score").get<double>();
        pm.result.calibrated = m.at("calibrated").get<double>();
        c.matches.push_back(std::move(pm));
    }
    return c;
}

Evaluator::Evaluator(RoleClient judge, int max_reparse) : judge_(std::move(judge)), max_reparse_(max_reparse) {}

EvalPoints Evaluator::extract_points(std::string_view bottom, const PointPlan& plan) const {
    auto req = judge_.request("eval.extract", {{"N_LOGIC_POINTS", std::to_string(plan.n_logic)},
                                               {"M_DETAIL_POINTS", std::to_string(plan.m_details)},
                                               {"bottom", std::string(bottom)}});
    auto pts = parse_eval_points(judge_.send(req));
    if (!pts.logic_true.empty() && !pts.details_true.empty()) return pts;
    req.messages.push_back({MessageRole::user, std::string(kExtractCorrection)});
    pts = parse_eval_points(judge_.send(req));
    if (pts.logic_true.empty() || pts.details_true.empty())
        throw EvaluationError("point extraction returned an empty section twice");
    return pts;
}

MatchResult Evaluator::match_point(std::string_view ground_truth, std::span<const std::string> predicted) const {
    if (predicted.empty()) return {};
    auto req = judge_.request("eval.match", {{"ground_truth", std::string(ground_truth)},
                                             {"predicted_list", numbered(predicted)}},
                              ResponseFormat::json);
    json j;
    try {
        j = judge_.send_json(std::move(req), max_reparse_);
    } catch (const JsonReplyError& e) {
        judge_.event("degradation", fmt::format("match judgment unparseable, scored as no match: {}", e.what()));
        return {};
    }
    if (!j.is_object() || !j.contains("best_match_score") || !j.at("best_match_score").is_number()) {
        judge_.event("degradation", "match judgment has no numeric best_match_score, scored as no match");
        return {};
    }
    const double raw = std::clamp(j.at("best_match_score").get<double>(), 0.0, 1.0);
    const json idx = j.value("best_match_index", json());

    MatchResult r;
    if (idx.is_null()) {
        if (raw >= kValidityThreshold) {
            judge_.event("degradation", "schema B reply with a valid-range score, scored as no match");
            return {};
        }
        r.raw_score = raw;
        return r;
    }
    if (!idx.is_number_integer() || idx.get<long long>() < 1 ||
        idx.get<long long>() > static_cast<long long>(predicted.size())) {
        judge_.event("degradation", fmt::format("best_match_index {} out of range, scored as no match", idx.dump()));
        return {};
    }
    r.raw_score = raw;
    if (raw >= kValidityThreshold) r.best_match_index = idx.get<int>();
    r.calibrated = calibrate(raw, r.best_match_index.has_value());
    return r;
}

double Evaluator::score_dimension(std::span<const std::string> gt_points, std::span<const std::string> predicted,
                                  std::vector<PointMatch>* matches, std::string_view dimension) const {
    if (gt_points.empty()) throw EvaluationError("no ground-truth points to score against");
    double sum = 0.0;
    for (const auto& gt : gt_points) {
        const auto r = match_point(gt, predicted);
        sum += r.calibrated;
        if (matches) matches->push_back({std::string(dimension), gt, r});
    }
    return 100.0 * sum / static_cast<double>(gt_points.size());
}

double Evaluator::score_conclusion(std::string_view c_pred, std::string_view bottom, MatchResult* out) const {
    const std::string pred = text::trim(c_pred);
    if (pred.empty()) {
        if (out) *out = {};
        return 0.0;
    }
    const std::vector<std::string> one{pred};
    const auto r = match_point(bottom, one);
    if (out) *out = r;
    return 100.0 * r.raw_score;
}

ScoreCard Evaluator::evaluate(const BeliefState& summary, const Puzzle& p) const {
    ScoreCard card;
    card.puzzle_id = p.id;
    card.plan = plan_point_counts(p.bottom);
    const auto pts = extract_points(p.bottom, card.plan);
    card.s_logic = score_dimension(pts.logic_true, summary.logic, &card.matches, "logic");
    card.s_details = score_dimension(pts.details_true, summary.details, &card.matches, "details");
    MatchResult conclusion;
    card.s_conclusion = score_conclusion(summary.conclusion, p.bottom, &conclusion);
    card.matches.push_back({"conclusion", p.bottom, conclusion});
    card.s_overall = weighted_overall(card.s_logic, card.s_details, card.s_conclusion, card.weights);
    return card;
}

ScoreCard Evaluator::evaluate(const Transcript& transcript, const Puzzle& p) const {
    if (!transcript.final_summary) throw EvaluationError(fmt::format("{}: transcript has no final summary", p.id));
    auto card = evaluate(*transcript.final_summary, p);
    card.puzzle_id = transcript.puzzle_id;
    return card;
}

} // namespace turtlesoup
