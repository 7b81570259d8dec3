// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/session.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <chrono>

namespace turtlesoup {

using nlohmann::json;

namespace {

std::optional<Genre> genre_from_name(std::string_view name) {
    for (Genre g : {Genre::CrimeThriller, Genre::MindGame, Genre::Supernatural, Genre::ConstantChange,
                    Genre::CleverLogic, Genre::Original, Genre::Default}) {
        if (genre_name(g) == name) return g;
    }
    return std::nullopt;
}

json aps_to_json(const std::vector<ApsItem>& aps) {
    json arr = json::array();
    for (const auto& a : aps) arr.push_back({{"doubt", a.doubt}, {"analysis", a.analysis}, {"proposal", a.proposal}});
    return arr;
}

std::string_view role_name(MessageRole r) { return r == MessageRole::system ? "system" : "user"; }

json exchange_to_json(const Exchange& e) {
    json msgs = json::array();
    for (const auto& m : e.messages) msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    json j{{"turn", e.turn},
           {"phase", e.phase},
           {"role", e.role},
           {"tag", e.tag},
           {"messages", std::move(msgs)},
           {"reply", e.reply}};
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

Exchange exchange_from_json(const json& j) {
    Exchange e;
    e.turn = j.at("turn").get<int>();
    e.phase = j.value("phase", std::string{});
    e.role = j.value("role", std::string{});
    e.tag = j.value("tag", std::string{});
    for (const auto& m : j.value("messages", json::array())) {
        e.messages.push_back({m.at("role").get<std::string>() == "system" ? MessageRole::system : MessageRole::user,
                              m.at("content").get<std::string>()});
    }
    e.reply = j.value("reply", std::string{});
    e.error = j.value("error", std::string{});
    return e;
}

// Accumulates wall-clock time for one phase into the transcript.
class PhaseTimer {
public:
    PhaseTimer(Transcript& tr, ExchangeLog& log, std::string phase)
        : tr_(tr), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {
        log.phase = phase_;
    }
    ~PhaseTimer() {
        const auto d = std::chrono::steady_clock::now() - start_;
        tr_.phase_ms[phase_] += std::chrono::duration<double, std::milli>(d).count();
    }
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    Transcript& tr_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

void copy_memory(Transcript& tr, const SessionMemory& mem) {
    tr.turns = mem.history();
    tr.key_clue_turns = mem.key_clue_turns();
    tr.blacklist = mem.blacklist();
}

} // namespace

json Transcript::to_json() const {
    json turns_j = json::array();
    for (const auto& t : turns) turns_j.push_back(qa_turn_to_json(t));
    json beliefs_j = json::array();
    for (const auto& b : beliefs)
        beliefs_j.push_back({{"turn", b.turn}, {"phase", b.phase}, {"belief", b.belief.to_json()}, {"aps", aps_to_json(b.aps)}});
    json trace_j = json::array();
    for (const auto& g : genre_trace) {
        trace_j.push_back({{"turn", g.turn},
                           {"vote", genre_name(g.vote)},
                           {"vote_confidence", g.vote_confidence},
                           {"confidence", g.confidence},
                           {"switched", g.switched},
                           {"genre", genre_name(g.genre)}});
    }
    json events_j = json::array();
    for (const auto& e : events) events_j.push_back({{"turn", e.turn}, {"kind", e.kind}, {"message", e.message}});
    json ex_j = json::array();
    for (const auto& e : exchanges) ex_j.push_back(exchange_to_json(e));

    return json{{"puzzle_id", puzzle_id},
                {"run_id", run_id},
                {"mode", mode == PlayMode::agent ? "agent" : "human"},
                {"status", status},
                {"abort_reason", abort_reason},
                {"config", config.to_json()},
                {"turns", std::move(turns_j)},
                {"key_clue_turns", key_clue_turns},
                {"blacklist", blacklist},
                {"beliefs", std::move(beliefs_j)},
                {"genre_trace", std::move(trace_j)},
                {"metacog_turns", metacog_turns},
                {"events", std::move(events_j)},
                {"final_summary", final_summary ? final_summary->to_json() : json()},
                {"exchanges", std::move(ex_j)}};
}

Transcript Transcript::from_json(const json& j) {
    Transcript t;
    t.puzzle_id = j.at("puzzle_id").get<std::string>();
    t.run_id = j.value("run_id", std::string{});
    t.mode = j.value("mode", std::string("agent")) == "human" ? PlayMode::human : PlayMode::agent;
    t.status = j.value("status", std::string("complete"));
    t.abort_reason = j.value("abort_reason", std::string{});
    t.config = SessionConfig::from_json(j.at("config"));
    for (const auto& q : j.at("turns")) t.turns.push_back(qa_turn_from_json(q));
    t.key_clue_turns = j.value("key_clue_turns", std::vector<int>{});
    t.blacklist = j.value("blacklist", std::vector<std::string>{});
    for (const auto& b : j.value("beliefs", json::array())) {
        BeliefSnapshot s;
        s.turn = b.at("turn").get<int>();
        s.phase = b.value("phase", std::string{});
        s.belief = BeliefState::from_json(b.at("belief"));
        for (const auto& a : b.value("aps", json::array()))
            s.aps.push_back({a.at("doubt").get<std::string>(), a.at("analysis").get<std::string>(),
                             a.at("proposal").get<std::string>()});
        t.beliefs.push_back(std::move(s));
    }
    for (const auto& g : j.value("genre_trace", json::array())) {
        GenreTraceEntry e;
        e.turn = g.at("turn").get<int>();
        e.vote = genre_from_name(g.at("vote").get<std::string>()).value_or(Genre::Default);
        e.vote_confidence = g.at("vote_confidence").get<double>();
        e.confidence = g.at("confidence").get<double>();
        e.switched = g.at("switched").get<bool>();
        e.genre = genre_from_name(g.at("genre").get<std::string>()).value_or(Genre::Default);
        t.genre_trace.push_back(e);
    }
    t.metacog_turns = j.value("metacog_turns", std::vector<int>{});
    for (const auto& e : j.value("events", json::array()))
        t.events.push_back({e.at("turn").get<int>(), e.at("kind").get<std::string>(), e.at("message").get<std::string>()});
    if (j.contains("final_summary") && !j.at("final_summary").is_null())
        t.final_summary = BeliefState::from_json(j.at("final_summary"));
    for (const auto& e : j.value("exchanges", json::array())) t.exchanges.push_back(exchange_from_json(e));
    return t;
}

Transcript run_session(const Puzzle& p, const SessionConfig& cfg, const EngineContext& ctx, const SessionHooks& hooks) {
    cfg.validate();
    if (cfg.mode != PlayMode::agent) throw ConfigError("run_session needs an agent-mode config");
    if (!ctx.prompts) throw ConfigError("engine context has no prompt registry");

    const AblationFlags& ab = cfg.ablation;
    Transcript tr;
    tr.puzzle_id = p.id;
    tr.mode = PlayMode::agent;
    tr.config = cfg;

    ExchangeLog log;
    const Questioner questioner(RoleClient(ctx.gateway, ctx.profiles.questioner, *ctx.prompts, "questioner", &log),
                                cfg.max_reparse);
    const Responder responder(RoleClient(ctx.gateway, ctx.profiles.responder, *ctx.prompts, "responder", &log));

    SessionMemory mem;
    BeliefState belief;
    std::vector<ApsItem> aps;
    LocalAnalysis local;
    GenreState gs{Genre::Default, 0.5, cfg.alpha, cfg.switch_threshold};

    try {
        for (int t = 1; t <= cfg.n_max; ++t) {
            log.turn = t;
            if (t > 1 && !ab.no_deliberation) {
                PhaseTimer timer(tr, log, "local_analysis");
                local = questioner.analyze_last_turn(p.surface, mem.render_full_history(), mem.history().back());
            }
            if (t > 1 && !ab.no_deliberation && (t - 1) % cfg.k == 0) {
                PhaseTimer timer(tr, log, "deliberation");
                const auto clues = mem.render_key_clues();
                belief = questioner.update_belief(p.surface, clues, mem.render_full_history(), belief, t - 1);
                aps = questioner.generate_aps(belief, p.surface, clues);
                tr.beliefs.push_back({t - 1, "deliberation", belief, aps});
            }
            if (!ab.no_metacognition && metacognition_due(mem.metacog_counters())) {
                PhaseTimer timer(tr, log, "metacognition");
                auto vote = questioner.classify_genre(p.surface, mem.render_full_history(), mem.render_key_clues(),
                                                      gs.genre);
                if (vote) {
                    auto upd = update_genre_state(gs, vote->genre, vote->vote_confidence);
                    gs = upd.state;
                    tr.genre_trace.push_back(
                        {t, vote->genre, vote->vote_confidence, gs.confidence, upd.switched, gs.genre});
                } else {
                    log.event("degradation", "genre classification produced fewer than two valid votes");
                }
                mem.mark_metacog_checkpoint();
                tr.metacog_turns.push_back(t);
            }

            std::string question;
            {
                PhaseTimer timer(tr, log, "action");
                const std::string strategy = questioner.strategy_for(ab.no_metacognition ? Genre::Default : gs.genre);
                const std::vector<ApsItem> no_aps;
                const auto cands = questioner.generate_candidates(
                    p.surface, ab.no_deliberation ? std::span<const ApsItem>(no_aps) : std::span<const ApsItem>(aps),
                    ab.no_deliberation ? LocalAnalysis{} : local, strategy, mem.render_history(cfg.window_qgen));
                if (ab.no_pruning) {
                    question = cands.questions[0];
                } else {
                    const auto asked = mem.asked_questions();
                    question = questioner.select_question(
                        cands, p.surface, ab.no_deliberation ? std::span<const ApsItem>(no_aps) : std::span<const ApsItem>(aps),
                        ab.no_deliberation ? LocalAnalysis{} : local, mem.render_history(cfg.window_screen), asked,
                        mem.blacklist());
                }
            }
            {
                PhaseTimer timer(tr, log, "response");
                mem.record_turn(question, responder.respond(p, question, !ab.no_key_clue));
            }
            if (hooks.early_stop && hooks.early_stop(mem, belief)) break;
        }

        log.turn = mem.size();
        PhaseTimer timer(tr, log, "final");
        BeliefState final_belief =
            questioner.update_belief(p.surface, mem.render_key_clues(), mem.render_full_history(), belief, mem.size());
        final_belief.updated_at_turn = mem.size();
        tr.beliefs.push_back({mem.size(), "final", final_belief, {}});
        tr.final_summary = std::move(final_belief);
    } catch (const GatewayError& e) {
        tr.status = "aborted";
        tr.abort_reason = e.what();
    } catch (const ParseError& e) {
        tr.status = "aborted";
        tr.abort_reason = e.what();
    }

    copy_memory(tr, mem);
    tr.events = std::move(log.events);
    tr.exchanges = std::move(log.exchanges);
    return tr;
}

std::pair<ResponderReply, int> step_human_turn(const Puzzle& p, SessionMemory& memory, std::string_view question,
                                               const SessionConfig& cfg, const Responder& responder) {
    const std::string q = text::trim(question);
    if (q.empty()) throw ValidationError("question must be non-empty");
    if (memory.size() >= cfg.n_max)
        throw BudgetExhausted(fmt::format("turn budget of {} questions is used up", cfg.n_max), cfg.n_max);
    auto reply = responder.respond(p, q, !cfg.ablation.no_key_clue);
    const auto& t = memory.record_turn(q, reply);
    return {reply, t.turn};
}

BeliefState parse_human_summary(std::string_view summary) {
    enum Section { Free, Logic, Details, Conclusion };
    auto heading = [](std::string_view line) -> std::optional<std::pair<Section, std::string>> {
        std::string s = text::trim(line);
        while (!s.empty() && (s.front() == '#' || s.front() == '*')) s.erase(0, 1);
        s = text::trim(s);
        struct L {
            std::string_view name;
            Section sec;
        };
        for (const L& l : {L{"logic", Logic}, L{"details", Details}, L{"detail", Details}, L{"conclusion", Conclusion}}) {
            if (s.size() <= l.name.size() || !text::iequals(std::string_view(s).substr(0, l.name.size()), l.name))
                continue;
            std::string rest = s.substr(l.name.size());
            while (!rest.empty() && rest.front() == '*') rest.erase(0, 1);
            if (rest.empty() || rest.front() != ':') continue;
            rest.erase(0, 1);
            while (!rest.empty() && rest.front() == '*') rest.erase(0, 1);
            return std::make_pair(l.sec, text::trim(rest));
        }
        return std::nullopt;
    };

    BeliefState b;
    std::vector<std::string> free_lines, conclusion_lines;
    bool saw_conclusion = false;
    Section sec = Free;
    for (const auto& line : text::split_lines(summary)) {
        if (auto h = heading(line)) {
            sec = h->first;
            if (sec == Conclusion) saw_conclusion = true;
            if (!h->second.empty()) {
                if (sec == Logic) b.logic.push_back(h->second);
                else if (sec == Details) b.details.push_back(h->second);
                else conclusion_lines.push_back(h->second);
            }
            continue;
        }
        const std::string t = text::trim(line);
        if (sec == Logic || sec == Details) {
            const auto item = text::strip_list_marker(t);
            if (!item.empty()) (sec == Logic ? b.logic : b.details).push_back(item);
        } else if (sec == Conclusion) {
            conclusion_lines.push_back(t);
        } else {
            free_lines.push_back(t);
        }
    }
    std::string conclusion = text::trim(text::join(saw_conclusion ? conclusion_lines : free_lines, "\n"));
    if (conclusion.empty()) conclusion = text::trim(summary);
    b.conclusion = std::move(conclusion);
    return b;
}

HumanGame::HumanGame(const Puzzle& p, SessionConfig cfg, Responder responder)
    : puzzle_(&p), cfg_(std::move(cfg)), responder_(responder.with_log(&log_)) {
    cfg_.mode = PlayMode::human;
    cfg_.validate();
}

std::pair<ResponderReply, int> HumanGame::ask(std::string_view question) {
    if (transcript_) throw StateError("game already finalized");
    log_.turn = memory_.size() + 1;
    log_.phase = "response";
    return step_human_turn(*puzzle_, memory_, question, cfg_, responder_);
}

const Transcript& HumanGame::finalize(std::string_view summary_text) {
    if (transcript_) throw StateError("game already finalized");
    if (text::trim(summary_text).empty()) throw ValidationError("summary must be non-empty");
    Transcript tr;
    tr.puzzle_id = puzzle_->id;
    tr.mode = PlayMode::human;
    tr.config = cfg_;
    copy_memory(tr, memory_);
    BeliefState b = parse_human_summary(summary_text);
    b.updated_at_turn = memory_.size();
    tr.beliefs.push_back({memory_.size(), "final", b, {}});
    tr.final_summary = std::move(b);
    tr.events = log_.events;
    tr.exchanges = log_.exchanges;
    transcript_ = std::move(tr);
    return *transcript_;
}

} // namespace turtlesoup
