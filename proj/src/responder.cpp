// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/responder.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <cctype>

namespace turtlesoup {

namespace {

constexpr std::string_view kVerdictCorrection = "Answer with exactly one word: Yes, No, or Unknown.";
constexpr std::string_view kFlagCorrection = "Give only the final single-word answer: Yes or No.";

bool is_word(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) != 0;
}

std::string_view strip_non_word(std::string_view s) {
    while (!s.empty() && !is_word(s.front())) s.remove_prefix(1);
    while (!s.empty() && !is_word(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<Verdict> verdict_of(std::string_view token) {
    if (text::iequals(token, "yes")) return Verdict::Yes;
    if (text::iequals(token, "no")) return Verdict::No;
    if (text::iequals(token, "unknown")) return Verdict::Unknown;
    return std::nullopt;
}

// Yes/No from the first word, falling back to the last word ("... Final answer: Yes").
std::optional<bool> parse_flag(std::string_view raw) {
    std::string_view s = strip_non_word(raw);
    std::size_t end = 0;
    while (end < s.size() && is_word(s[end])) ++end;
    auto first = verdict_of(s.substr(0, end));
    if (first == Verdict::Yes) return true;
    if (first == Verdict::No) return false;
    std::size_t begin = s.size();
    while (begin > 0 && is_word(s[begin - 1])) --begin;
    auto last = verdict_of(s.substr(begin));
    if (last == Verdict::Yes) return true;
    if (last == Verdict::No) return false;
    return std::nullopt;
}

std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += fmt::format("{}{}. {}", i ? "\n" : "", i + 1, items[i]);
    return out;
}

} // namespace

std::string_view verdict_text(Verdict v) {
    switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

ResponderReply ResponderReply::make(Verdict verdict, bool is_key_clue) {
    std::string rendered(verdict_text(verdict));
    if (is_key_clue) rendered += kKeyClueMarker;
    return {verdict, is_key_clue, std::move(rendered)};
}

Verdict parse_verdict(std::string_view raw) {
    std::string_view s = strip_non_word(raw);
    std::size_t end = 0;
    while (end < s.size() && is_word(s[end])) ++end;
    if (auto v = verdict_of(s.substr(0, end))) return *v;
    throw ParseError(fmt::format("not a verdict: '{}'", text::trim(raw).substr(0, 80)));
}

std::optional<ResponderReply> parse_rendered(std::string_view rendered) {
    bool flag = false;
    if (rendered.ends_with(kKeyClueMarker)) {
        flag = true;
        rendered.remove_suffix(kKeyClueMarker.size());
    }
    for (Verdict v : {Verdict::Yes, Verdict::No, Verdict::Unknown}) {
        if (rendered == verdict_text(v)) return ResponderReply::make(v, flag);
    }
    return std::nullopt;
}

Responder::Responder(RoleClient client) : client_(std::move(client)) {}

Verdict Responder::answer_question(const Puzzle& p, std::string_view question) const {
    if (text::trim(question).empty()) throw ValidationError("question must be non-empty");
    ChatRequest req = client_.request("responder.answer", {{"surface", p.surface}, {"bottom", p.bottom}},
                                      ResponseFormat::text, std::string(question));
    try {
        return parse_verdict(client_.send(req));
    } catch (const ParseError&) {
    }
    req.messages.push_back({MessageRole::user, std::string(kVerdictCorrection)});
    try {
        return parse_verdict(client_.send(req));
    } catch (const ParseError& e) {
        client_.event("degradation", fmt::format("unparseable verdict after re-ask, using Unknown ({})", e.what()));
        return Verdict::Unknown;
    }
}

bool Responder::identify_key_clue(const Puzzle& p, std::string_view question) const {
    if (text::trim(question).empty()) throw ValidationError("question must be non-empty");
    ChatRequest req = client_.request("responder.key_clue", {{"surface", p.surface},
                                                             {"bottom", p.bottom},
                                                             {"tips", numbered(p.key_clue_library)},
                                                             {"question", std::string(question)}});
    if (auto f = parse_flag(client_.send(req))) return *f;
    req.messages.push_back({MessageRole::user, std::string(kFlagCorrection)});
    if (auto f = parse_flag(client_.send(req))) return *f;
    client_.event("degradation", "unparseable key-clue judgment after re-ask, using No");
    return false;
}

ResponderReply Responder::respond(const Puzzle& p, std::string_view question, bool key_clue_enabled) const {
    const Verdict v = answer_question(p, question);
    const bool flag = key_clue_enabled && identify_key_clue(p, question);
    return ResponderReply::make(v, flag);
}

} // namespace turtlesoup
