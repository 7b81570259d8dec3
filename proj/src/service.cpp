// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/service.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <ctime>
#include <fstream>
#include <random>

namespace turtlesoup {

using nlohmann::json;

namespace {

struct NotFound : Error {
    using Error::Error;
};

struct MethodNotAllowed : Error {
    using Error::Error;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string random_id() {
    static std::mutex mu;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu);
    return fmt::format("{:016x}{:016x}", rng(), rng());
}

json puzzle_projection(const Puzzle& p, bool with_genre) {
    json j{{"id", p.id}, {"title", p.title}, {"language", language_code(p.language)}, {"surface", p.surface}};
    if (with_genre) j["genre"] = genre_name(p.genre);
    return j;
}

json turn_json(const QaTurn& t) {
    return json{{"turn", t.turn},
                {"question", t.question},
                {"reply", t.reply.rendered},
                {"verdict", verdict_text(t.reply.verdict)},
                {"key_clue", t.reply.is_key_clue}};
}

ApiResponse error_response(int status, std::string_view code, std::string_view message, json extra = json::object()) {
    json body{{"error", code}, {"message", message}};
    for (auto& [k, v] : extra.items()) body[k] = v;
    return {status, std::move(body)};
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string_view::npos) slash = path.size();
        if (slash > start) out.push_back(path.substr(start, slash - start));
        start = slash + 1;
    }
    return out;
}

json parse_body(std::string_view body) {
    if (text::trim(body).empty()) return json::object();
    json j = json::parse(body); // parse_error -> 400
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
}

std::string string_field(const json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end() || !it->is_string()) throw ValidationError(fmt::format("'{}' must be a string", name));
    return it->get<std::string>();
}

} // namespace

std::string_view live_state_name(LiveState s) {
    switch (s) {
    case LiveState::open: return "open";
    case LiveState::summarizing: return "summarizing";
    case LiveState::scored: return "scored";
    case LiveState::abandoned: return "abandoned";
    }
    return "open";
}

bool live_transition_allowed(LiveState from, LiveState to) {
    switch (from) {
    case LiveState::open: return to == LiveState::summarizing || to == LiveState::abandoned;
    case LiveState::summarizing:
        return to == LiveState::summarizing || to == LiveState::scored || to == LiveState::abandoned;
    case LiveState::scored:
    case LiveState::abandoned: return false;
    }
    return false;
}

PlayService::PlayService(std::vector<Puzzle> corpus, Responder responder, Evaluator evaluator, PlayServiceOptions opts)
    : corpus_(std::move(corpus)), responder_(std::move(responder)), evaluator_(std::move(evaluator)),
      opts_(std::move(opts)) {
    opts_.session.mode = PlayMode::human;
    opts_.session.validate();
    if (opts_.snapshot_dir) std::filesystem::create_directories(*opts_.snapshot_dir);
}

void PlayService::transition(LiveSession& s, LiveState to) {
    if (!live_transition_allowed(s.state, to))
        throw StateError(fmt::format("session is {}; cannot move to {}", live_state_name(s.state), live_state_name(to)));
    s.state = to;
}

std::shared_ptr<PlayService::LiveSession> PlayService::find(std::string_view session_id) const {
    std::shared_lock lock(table_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFound(fmt::format("no session '{}'", session_id));
    return it->second;
}

json PlayService::list_puzzles() const {
    json arr = json::array();
    for (const auto& p : corpus_) arr.push_back(puzzle_projection(p, true));
    return arr;
}

std::string PlayService::create_session(std::string_view puzzle_id) {
    const Puzzle* p = find_puzzle(corpus_, puzzle_id);
    if (!p) throw NotFound(fmt::format("no puzzle '{}'", puzzle_id));
    auto s = std::make_shared<LiveSession>();
    s->puzzle = p;
    s->created_at = utc_now();
    s->game = std::make_unique<HumanGame>(*p, opts_.session, responder_);
    std::unique_lock lock(table_mutex_);
    do {
        s->session_id = random_id();
    } while (sessions_.contains(s->session_id));
    sessions_.emplace(s->session_id, s);
    std::lock_guard slock(s->mutex);
    snapshot_locked(*s);
    return s->session_id;
}

json PlayService::view_locked(const LiveSession& s) const {
    json turns = json::array();
    for (const auto& t : s.game->memory().history()) turns.push_back(turn_json(t));
    json j{{"session_id", s.session_id},
           {"state", live_state_name(s.state)},
           {"created_at", s.created_at},
           {"puzzle", puzzle_projection(*s.puzzle, false)},
           {"turns", std::move(turns)},
           {"n_max", s.game->config().n_max},
           {"remaining_turns", s.game->remaining_turns()}};
    if (s.state == LiveState::scored && s.score) {
        j["scorecard"] = s.score->to_json();
        j["bottom"] = s.puzzle->bottom;
        if (const auto* tr = s.game->transcript(); tr && tr->final_summary) j["summary"] = tr->final_summary->to_json();
    }
    return j;
}

void PlayService::snapshot_locked(const LiveSession& s) const {
    if (!opts_.snapshot_dir) return;
    json j = view_locked(s);
    j["memory"] = s.game->memory().to_json();
    if (const auto* tr = s.game->transcript()) j["transcript"] = tr->to_json();
    const auto path = *opts_.snapshot_dir / (s.session_id + ".session.json");
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

json PlayService::ask(std::string_view session_id, std::string_view question) {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    if (s->state != LiveState::open)
        throw StateError(fmt::format("session is {}; questions are closed", live_state_name(s->state)));
    auto [reply, turn] = s->game->ask(question);
    snapshot_locked(*s);
    return json{{"turn", turn},
                {"reply", reply.rendered},
                {"verdict", verdict_text(reply.verdict)},
                {"key_clue", reply.is_key_clue},
                {"remaining_turns", s->game->remaining_turns()},
                {"state", live_state_name(s->state)}};
}

json PlayService::submit_summary(std::string_view session_id, std::string_view summary) {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    if (s->state != LiveState::open && s->state != LiveState::summarizing)
        throw StateError(fmt::format("session is {}; a summary can no longer be submitted", live_state_name(s->state)));
    if (text::trim(summary).empty()) throw ValidationError("summary must be non-empty");
    transition(*s, LiveState::summarizing);
    // A retry after a failed evaluation re-scores the summary submitted first.
    if (!s->game->finalized()) s->game->finalize(summary);
    snapshot_locked(*s);

    ExchangeLog judge_log;
    s->score = evaluator_.with_log(&judge_log).evaluate(*s->game->transcript(), *s->puzzle);
    transition(*s, LiveState::scored);
    snapshot_locked(*s);
    return view_locked(*s);
}

json PlayService::session_view(std::string_view session_id) const {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    return view_locked(*s);
}

json PlayService::abandon(std::string_view session_id) {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    transition(*s, LiveState::abandoned);
    snapshot_locked(*s);
    return view_locked(*s);
}

ApiResponse PlayService::handle(std::string_view method, std::string_view path, std::string_view body) {
    if (method == "OPTIONS") return {204, json()};
    if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    const auto seg = split_path(path);
    try {
        if (seg.size() < 2 || seg[0] != "api") throw NotFound(fmt::format("no route {}", path));
        if (seg[1] == "puzzles" && seg.size() == 2) {
            if (method != "GET") throw MethodNotAllowed("use GET");
            return {200, json{{"puzzles", list_puzzles()}}};
        }
        if (seg[1] != "sessions") throw NotFound(fmt::format("no route {}", path));
        if (seg.size() == 2) {
            if (method != "POST") throw MethodNotAllowed("use POST");
            const auto id = create_session(string_field(parse_body(body), "puzzle_id"));
            return {201, session_view(id)};
        }
        const std::string id(seg[2]);
        if (seg.size() == 3) {
            if (method != "GET") throw MethodNotAllowed("use GET");
            return {200, session_view(id)};
        }
        if (seg.size() == 4) {
            if (method != "POST") throw MethodNotAllowed("use POST");
            if (seg[3] == "ask") return {200, ask(id, string_field(parse_body(body), "question"))};
            if (seg[3] == "summary") return {200, submit_summary(id, string_field(parse_body(body), "text"))};
            if (seg[3] == "abandon") return {200, abandon(id)};
        }
        throw NotFound(fmt::format("no route {}", path));
    } catch (const NotFound& e) {
        return error_response(404, "not_found", e.what());
    } catch (const MethodNotAllowed& e) {
        return error_response(405, "method_not_allowed", e.what());
    } catch (const json::parse_error&) {
        return error_response(400, "bad_request", "request body is not valid JSON");
    } catch (const ValidationError& e) {
        return error_response(400, "validation", e.what());
    } catch (const BudgetExhausted& e) {
        return error_response(409, "budget_exhausted", e.what(), json{{"remaining_turns", 0}, {"n_max", e.n_max}});
    } catch (const StateError& e) {
        return error_response(409, "invalid_state", e.what());
    } catch (const EvaluationError& e) {
        return error_response(502, "evaluation_failed", e.what(), json{{"state", "summarizing"}});
    } catch (const GatewayError& e) {
        return error_response(502, "upstream_failed", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

void serve_http(PlayService& service, const std::string& host, int port,
                const std::optional<std::filesystem::path>& static_dir, ListeningCallback on_listening) {
    httplib::Server svr;
    const std::string origin = service.options().cors_origin;
    svr.set_default_headers({{"Access-Control-Allow-Origin", origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    if (static_dir && !svr.set_mount_point("/", static_dir->string()))
        throw ConfigError(fmt::format("cannot serve static directory {}", static_dir->string()));

    auto route = [&service](const httplib::Request& req, httplib::Response& res) {
        const ApiResponse r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        if (!r.body.is_null()) res.set_content(r.body.dump(), "application/json");
    };
    svr.Get(R"(/api/.*)", route);
    svr.Post(R"(/api/.*)", route);
    svr.Options(R"(/api/.*)", route);

    int bound = port;
    if (port == 0) bound = svr.bind_to_any_port(host);
    else if (!svr.bind_to_port(host, port)) bound = -1;
    if (bound < 0) throw ConfigError(fmt::format("cannot bind {}:{}", host, port));
    if (on_listening) on_listening(bound, [&svr] { svr.stop(); });
    svr.listen_after_bind();
}

} // namespace turtlesoup
