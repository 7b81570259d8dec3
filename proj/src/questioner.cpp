// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/questioner.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

namespace turtlesoup {

using nlohmann::json;

namespace {

constexpr std::string_view kCandidateCorrection =
    "Return exactly three different Yes/No questions as a numbered list (1., 2., 3.), one per line, "
    "with no other text.";

std::string strip_decoration(std::string_view s) {
    std::string out = text::strip_list_marker(s);
    std::size_t b = 0;
    while (b < out.size() && (out[b] == '#' || out[b] == '*' || out[b] == ' ')) ++b;
    out.erase(0, b);
    return out;
}

// "<label>[ N]:" at the start of `line` (case-insensitive). Returns the text
// after the colon, or nullopt.
std::optional<std::string> after_label(std::string_view line, std::string_view label) {
    const std::string s = strip_decoration(line);
    if (s.size() < label.size() || !text::iequals(std::string_view(s).substr(0, label.size()), label))
        return std::nullopt;
    std::size_t i = label.size();
    while (i < s.size() && (s[i] == ' ' || s[i] == '*' || std::isdigit(static_cast<unsigned char>(s[i])))) ++i;
    if (i >= s.size() || s[i] != ':') return std::nullopt;
    std::string rest = s.substr(i + 1);
    // "**Label:** text"
    std::size_t b = 0;
    while (b < rest.size() && (rest[b] == '*' || rest[b] == ' ')) ++b;
    return text::trim(std::string_view(rest).substr(b));
}

// Heading line that starts a section without a colon, e.g. "### New Information Revealed".
bool starts_heading(std::string_view line, std::string_view label) {
    const std::string s = strip_decoration(line);
    return s.size() >= label.size() && text::iequals(std::string_view(s).substr(0, label.size()), label);
}

std::string append_text(std::string a, std::string_view b) {
    if (b.empty()) return a;
    if (!a.empty()) a += "\n";
    a += b;
    return a;
}

std::string bullet_list(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::vector<std::string> lines;
    for (const auto& i : items) lines.push_back("- " + i);
    return text::join(lines, "\n");
}

std::string numbered_list(std::span<const std::string> items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += fmt::format("{}{}. {}", i ? "\n" : "", i + 1, items[i]);
    return out;
}

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    if (!j.is_array()) throw JsonReplyError("expected a list", j.dump());
    for (const auto& e : j) {
        std::string s = e.is_string() ? e.get<std::string>() : e.dump();
        s = text::trim(s);
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> parse_questions(std::string_view raw) {
    std::vector<std::string> out;
    for (const auto& item : parse_numbered_list(raw)) {
        auto q = normalize_question(item);
        if (!q.empty()) out.push_back(std::move(q));
    }
    return out;
}

} // namespace

json BeliefState::to_json() const {
    return json{{"logic", logic}, {"details", details}, {"conclusion", conclusion}, {"updated_at_turn", updated_at_turn}};
}

BeliefState BeliefState::from_json(const json& j) {
    BeliefState b;
    b.logic = j.value("logic", std::vector<std::string>{});
    b.details = j.value("details", std::vector<std::string>{});
    b.conclusion = j.value("conclusion", std::string{});
    b.updated_at_turn = j.value("updated_at_turn", 0);
    return b;
}

std::string LocalAnalysis::text() const {
    if (conflicts.empty() && adjustments.empty()) return new_information;
    std::vector<std::string> parts;
    if (!new_information.empty()) parts.push_back("New Information: " + new_information);
    if (!conflicts.empty()) parts.push_back("Knowledge Conflict: " + conflicts);
    if (!adjustments.empty()) parts.push_back("Understanding Adjustment: " + adjustments);
    return text::join(parts, "\n");
}

LocalAnalysis split_local_analysis(std::string_view raw) {
    struct Heading {
        std::string_view label;
        int field;
    };
    static constexpr Heading kHeadings[] = {
        {"new information", 0}, {"knowledge conflict", 1}, {"conflict", 1},
        {"understanding adjustment", 2}, {"adjustment", 2},
    };
    std::string fields[3];
    int current = -1;
    bool any = false;
    for (const auto& line : text::split_lines(raw)) {
        int hit = -1;
        std::string rest;
        for (const auto& h : kHeadings) {
            if (!starts_heading(line, h.label)) continue;
            hit = h.field;
            const std::string s = strip_decoration(line);
            auto colon = s.find(':');
            rest = colon == std::string::npos ? std::string{} : text::trim(std::string_view(s).substr(colon + 1));
            while (!rest.empty() && rest.front() == '*') rest.erase(0, 1);
            rest = text::trim(rest);
            break;
        }
        if (hit >= 0) {
            current = hit;
            any = true;
            fields[current] = append_text(fields[current], rest);
        } else if (current >= 0) {
            auto t = text::trim(line);
            if (!t.empty()) fields[current] = append_text(fields[current], t);
        }
    }
    if (!any) return LocalAnalysis{text::trim(raw), {}, {}};
    return LocalAnalysis{fields[0], fields[1], fields[2]};
}

std::vector<ApsItem> parse_aps(std::string_view raw) {
    enum Field { None, Doubt, Analysis, Proposal };
    struct Label {
        std::string_view text;
        Field field;
    };
    static constexpr Label kLabels[] = {
        {"point of doubt", Doubt},          {"doubt", Doubt},
        {"analysis and exploration paths", Analysis}, {"analysis and exploration path", Analysis},
        {"analysis", Analysis},              {"question suggestion", Proposal},
        {"suggestion", Proposal},            {"proposal", Proposal},
    };

    std::vector<ApsItem> items;
    ApsItem cur;
    Field field = None;
    auto flush = [&] {
        cur.doubt = text::trim(cur.doubt);
        cur.analysis = text::trim(cur.analysis);
        cur.proposal = text::trim(cur.proposal);
        if (!cur.doubt.empty() && !cur.analysis.empty() && !cur.proposal.empty()) items.push_back(cur);
        cur = {};
        field = None;
    };

    for (const auto& line : text::split_lines(raw)) {
        if (text::trim(line).empty()) continue;

        // Inline form: "Point of Doubt" + analysis + question suggestion
        const std::string body = strip_decoration(line);
        if (auto plus = body.find(" + "); plus != std::string::npos) {
            std::vector<std::string> parts;
            std::size_t start = 0;
            while (true) {
                auto p = body.find(" + ", start);
                parts.push_back(text::trim(std::string_view(body).substr(start, p - start)));
                if (p == std::string::npos) break;
                start = p + 3;
            }
            if (parts.size() >= 3) {
                flush();
                auto unquote = [](std::string s) {
                    auto strip = [](std::string& x) {
                        while (!x.empty() && (x.front() == '"' || x.front() == '\'')) x.erase(0, 1);
                        while (!x.empty() && (x.back() == '"' || x.back() == '\'')) x.pop_back();
                    };
                    strip(s);
                    return text::trim(s);
                };
                cur.doubt = unquote(parts.front());
                if (auto d = after_label(cur.doubt, "point of doubt")) cur.doubt = *d;
                std::vector<std::string> mid(parts.begin() + 1, parts.end() - 1);
                cur.analysis = text::join(mid, " ");
                if (auto a = after_label(cur.analysis, "analysis")) cur.analysis = *a;
                cur.proposal = parts.back();
                for (auto lbl : {"question suggestion", "suggestion", "proposal"}) {
                    if (auto p = after_label(cur.proposal, lbl)) {
                        cur.proposal = *p;
                        break;
                    }
                }
                flush();
                continue;
            }
        }

        bool labelled = false;
        for (const auto& l : kLabels) {
            auto rest = after_label(line, l.text);
            if (!rest) continue;
            if (l.field == Doubt) flush();
            field = l.field;
            std::string& target = field == Doubt ? cur.doubt : field == Analysis ? cur.analysis : cur.proposal;
            target = append_text(target, *rest);
            labelled = true;
            break;
        }
        if (labelled) continue;
        if (field != None) {
            std::string& target = field == Doubt ? cur.doubt : field == Analysis ? cur.analysis : cur.proposal;
            target = append_text(target, text::trim(line));
        }
    }
    flush();
    return items;
}

std::string render_aps(std::span<const ApsItem> aps) {
    if (aps.empty()) return "(none)";
    std::vector<std::string> blocks;
    for (std::size_t i = 0; i < aps.size(); ++i) {
        blocks.push_back(fmt::format("{}. Point of Doubt: {}\n   Analysis: {}\n   Question Suggestion: {}", i + 1,
                                     aps[i].doubt, aps[i].analysis, aps[i].proposal));
    }
    return text::join(blocks, "\n");
}

std::vector<std::string> parse_numbered_list(std::string_view raw) {
    std::vector<std::string> out;
    for (const auto& line : text::split_lines(raw)) {
        std::string t = text::trim(line);
        while (!t.empty() && t.front() == '*') t.erase(0, 1);
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
        if (i == 0 || i >= t.size() || (t[i] != '.' && t[i] != ')' && t[i] != ':')) continue;
        std::string item = text::trim(std::string_view(t).substr(i + 1));
        if (!item.empty()) out.push_back(std::move(item));
    }
    return out;
}

std::string normalize_question(std::string_view q) {
    static constexpr std::string_view kFullWidthQ = "\xEF\xBC\x9F";
    std::string s = text::trim(q);
    auto strip_ends = [&] {
        bool changed = true;
        while (changed && !s.empty()) {
            changed = false;
            if (s.ends_with(kFullWidthQ)) {
                s.resize(s.size() - kFullWidthQ.size());
                changed = true;
            }
            if (!s.empty() && (s.back() == '?' || s.back() == ']' || s.back() == '"' || s.back() == '\'' ||
                               s.back() == '*' || s.back() == '.' || s.back() == ' ')) {
                s.pop_back();
                changed = true;
            }
            if (!s.empty() && (s.front() == '[' || s.front() == '"' || s.front() == '\'' || s.front() == '*' ||
                               s.front() == ' ')) {
                s.erase(0, 1);
                changed = true;
            }
        }
    };
    strip_ends();
    if (s.empty()) return {};
    return s + "?";
}

double token_overlap(std::string_view a, std::string_view b) {
    const auto ta = text::word_tokens(a);
    const auto tb = text::word_tokens(b);
    if (ta.empty() || tb.empty()) return 0.0;
    std::size_t shared = 0;
    for (const auto& t : ta) shared += tb.count(t);
    return static_cast<double>(shared) / static_cast<double>(std::max(ta.size(), tb.size()));
}

std::optional<std::size_t> match_selection(std::string_view reply, const CandidateSet& cands) {
    auto key = [](std::string_view s) { return text::to_lower(text::collapse_whitespace(normalize_question(s))); };

    std::vector<std::string> options{std::string(reply)};
    for (const auto& line : text::split_lines(reply)) {
        auto t = text::strip_list_marker(line);
        if (!t.empty()) options.push_back(std::move(t));
    }
    for (const auto& opt : options) {
        const auto k = key(opt);
        if (k.empty()) continue;
        for (std::size_t i = 0; i < cands.questions.size(); ++i) {
            if (k == key(cands.questions[i])) return i;
        }
    }

    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t i = 0; i < cands.questions.size(); ++i) {
        const double s = token_overlap(reply, cands.questions[i]);
        if (s >= kSelectionOverlapFloor && s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

std::string_view strategy_template_id(Genre g) {
    switch (g) {
    case Genre::CrimeThriller: return "strategy.crime_thriller";
    case Genre::MindGame: return "strategy.mind_game";
    case Genre::Supernatural: return "strategy.supernatural";
    case Genre::ConstantChange: return "strategy.constant_change";
    case Genre::CleverLogic:
    case Genre::Original: return "strategy.clever_logic";
    case Genre::Default: return "strategy.default";
    }
    return "strategy.default";
}

Questioner::Questioner(RoleClient client, int max_reparse) : client_(std::move(client)), max_reparse_(max_reparse) {}

LocalAnalysis Questioner::analyze_last_turn(std::string_view surface, std::string_view history_text,
                                            const QaTurn& last_turn) const {
    const auto answer = fmt::format("Q: {}\nA: {}", last_turn.question, last_turn.reply.rendered);
    auto req = client_.request("questioner.local_analysis", {{"answer", answer},
                                                             {"history_str", std::string(history_text)},
                                                             {"setup", std::string(surface)}});
    return split_local_analysis(client_.send(req));
}

BeliefState Questioner::update_belief(std::string_view surface, std::string_view key_clues_text,
                                      std::string_view history_text, const BeliefState& prev,
                                      int through_turn) const {
    const std::string last = prev.synthesized() ? json{{"details", prev.details},
                                                       {"logic", prev.logic},
                                                       {"conclusion", prev.conclusion}}
                                                      .dump()
                                                : std::string("(none)");
    auto req = client_.request("questioner.belief", {{"surface", std::string(surface)},
                                                     {"tips", std::string(key_clues_text)},
                                                     {"history", std::string(history_text)},
                                                     {"last_summary", last}},
                               ResponseFormat::json);
    try {
        const json j = client_.send_json(std::move(req), max_reparse_);
        if (!j.is_object()) throw JsonReplyError("belief reply is not an object", j.dump());
        BeliefState b;
        b.details = string_list(j.value("details", json::array()));
        b.logic = string_list(j.value("logic", json::array()));
        const auto& c = j.contains("conclusion") ? j.at("conclusion") : json();
        b.conclusion = text::trim(c.is_string() ? c.get<std::string>() : std::string{});
        if (b.conclusion.empty()) throw JsonReplyError("belief reply has no conclusion", j.dump());
        b.updated_at_turn = through_turn;
        return b;
    } catch (const JsonReplyError& e) {
        client_.event("degradation", fmt::format("belief update kept the previous belief: {}", e.what()));
        return prev;
    }
}

std::vector<ApsItem> Questioner::generate_aps(const BeliefState& belief, std::string_view surface,
                                              std::string_view key_clues_text) const {
    auto req = client_.request("questioner.aps", {{"setup", std::string(surface)},
                                                  {"clues", std::string(key_clues_text)},
                                                  {"logic", bullet_list(belief.logic)},
                                                  {"details", bullet_list(belief.details)},
                                                  {"conclusion", belief.conclusion.empty() ? "(none)" : belief.conclusion}});
    auto items = parse_aps(client_.send(req));
    if (items.empty()) client_.event("warning", "no analysis-and-proposal items parsed");
    return items;
}

std::optional<GenreVote> Questioner::classify_genre(std::string_view surface, std::string_view history_text,
                                                    std::string_view key_clues_text, Genre current) const {
    std::vector<std::string> names;
    for (Genre g : kNarrativeGenres) names.emplace_back(genre_name(g));
    const auto req = client_.request("metacog.classify", {{"setup", std::string(surface)},
                                                          {"history_str", std::string(history_text)},
                                                          {"clues_str", std::string(key_clues_text)},
                                                          {"available_types", text::join(names, ", ")}});
    std::vector<std::optional<Genre>> votes;
    for (int i = 0; i < 3; ++i) votes.push_back(parse_genre_vote(client_.send(req)));
    return tally_votes(votes, current);
}

std::string Questioner::strategy_for(Genre g) const { return client_.render(strategy_template_id(g)); }

CandidateSet Questioner::generate_candidates(std::string_view surface, std::span<const ApsItem> aps,
                                             const LocalAnalysis& local, std::string_view strategy,
                                             std::string_view history_qgen) const {
    auto req = client_.request("action.candidates", {{"surface", std::string(surface)},
                                                     {"advice", render_aps(aps)},
                                                     {"answer_analysis", local.empty() ? "(none)" : local.text()},
                                                     {"type_instruction", std::string(strategy)},
                                                     {"history", std::string(history_qgen)}});
    auto qs = parse_questions(client_.send(req));
    if (qs.size() < 3) {
        req.messages.push_back({MessageRole::user, std::string(kCandidateCorrection)});
        auto again = parse_questions(client_.send(req));
        if (!again.empty()) qs = std::move(again);
        if (qs.empty()) throw ParseError("no candidate questions could be parsed");
        if (qs.size() < 3) client_.event("degradation", fmt::format("only {} candidate(s); padded", qs.size()));
    }
    CandidateSet out;
    for (std::size_t i = 0; i < 3; ++i) out.questions[i] = qs[std::min(i, qs.size() - 1)];
    return out;
}

std::string Questioner::select_question(const CandidateSet& cands, std::string_view surface,
                                        std::span<const ApsItem> aps, const LocalAnalysis& local,
                                        std::string_view history_screen, std::span<const std::string> asked,
                                        std::span<const std::string> blacklist) const {
    std::string reply;
    try {
        auto req = client_.request("action.select", {{"surface", std::string(surface)},
                                                     {"advice", render_aps(aps)},
                                                     {"answer_analysis", local.empty() ? "(none)" : local.text()},
                                                     {"history", std::string(history_screen)},
                                                     {"history_questions", numbered_list(asked)},
                                                     {"question1", cands.questions[0]},
                                                     {"question2", cands.questions[1]},
                                                     {"question3", cands.questions[2]},
                                                     {"blacklist", numbered_list(blacklist)}});
        reply = client_.send(req);
    } catch (const GatewayError& e) {
        client_.event("degradation", fmt::format("screening failed, using candidate 1: {}", e.what()));
        return cands.questions[0];
    }
    if (auto idx = match_selection(reply, cands)) return cands.questions[*idx];
    client_.event("warning", "screening reply matched no candidate; using candidate 1");
    return cands.questions[0];
}

} // namespace turtlesoup
