// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/corpus.hpp"
#include "turtlesoup/role_client.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace turtlesoup {

// "Irrelevant" is folded into Unknown; there is no fourth verdict.
enum class Verdict { Yes, No, Unknown };

std::string_view verdict_text(Verdict v);

inline constexpr std::string_view kKeyClueMarker = "<Key Clue>";

struct ResponderReply {
    Verdict verdict = Verdict::Unknown;
    bool is_key_clue = false;
    std::string rendered; // verdict text, plus kKeyClueMarker iff is_key_clue

    static ResponderReply make(Verdict verdict, bool is_key_clue);

    bool operator==(const ResponderReply&) const = default;
};

// First-token strict: trims whitespace and punctuation, then the first word
// must be yes / no / unknown (any case). Throws ParseError otherwise, so a
// hedged "Probably yes" does not count.
Verdict parse_verdict(std::string_view raw);

// Inverse of ResponderReply::make.
std::optional<ResponderReply> parse_rendered(std::string_view rendered);

// The game master. Answers and key-clue judgments are separate calls so the
// key-clue ablation can switch off the flag alone.
class Responder {
public:
    explicit Responder(RoleClient client);

    // An unparseable reply is re-asked once, then defaults to Unknown with a
    // degradation event.
    Verdict answer_question(const Puzzle& p, std::string_view question) const;

    // Unparseable after one re-ask -> false.
    bool identify_key_clue(const Puzzle& p, std::string_view question) const;

    ResponderReply respond(const Puzzle& p, std::string_view question, bool key_clue_enabled) const;

    Responder with_log(ExchangeLog* log) const { return Responder(client_.with_log(log)); }

private:
    RoleClient client_;
};

} // namespace turtlesoup
