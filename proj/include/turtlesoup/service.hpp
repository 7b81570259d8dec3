// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/config.hpp"
#include "turtlesoup/corpus.hpp"
#include "turtlesoup/evaluator.hpp"
#include "turtlesoup/responder.hpp"
#include "turtlesoup/session.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup {

enum class LiveState { open, summarizing, scored, abandoned };

std::string_view live_state_name(LiveState s);

// open -> summarizing -> scored; any non-terminal state -> abandoned.
// summarizing -> summarizing is the retry after a failed evaluation.
bool live_transition_allowed(LiveState from, LiveState to);

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

struct PlayServiceOptions {
    SessionConfig session;                        // n_max etc. for human games
    std::optional<std::filesystem::path> snapshot_dir;
    std::string cors_origin = "*";
};

// Backend of the human play console. Transport-free: handle() maps a method,
// path and JSON body onto a response, so it can be tested without sockets.
// While a session is not scored no response carries the puzzle's bottom.
class PlayService {
public:
    PlayService(std::vector<Puzzle> corpus, Responder responder, Evaluator evaluator, PlayServiceOptions opts = {});

    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

    // Typed operations behind the routes.
    nlohmann::json list_puzzles() const;
    std::string create_session(std::string_view puzzle_id);
    nlohmann::json ask(std::string_view session_id, std::string_view question);
    nlohmann::json submit_summary(std::string_view session_id, std::string_view summary);
    nlohmann::json session_view(std::string_view session_id) const;
    nlohmann::json abandon(std::string_view session_id);

    const PlayServiceOptions& options() const { return opts_; }

private:
    struct LiveSession {
        std::string session_id;
        const Puzzle* puzzle = nullptr;
        LiveState state = LiveState::open;
        std::string created_at;
        std::unique_ptr<HumanGame> game;
        std::optional<ScoreCard> score;
        mutable std::mutex mutex; // one in-flight request per session
    };

    std::shared_ptr<LiveSession> find(std::string_view session_id) const;
    nlohmann::json view_locked(const LiveSession& s) const;
    void snapshot_locked(const LiveSession& s) const;
    static void transition(LiveSession& s, LiveState to);

    std::vector<Puzzle> corpus_;
    Responder responder_;
    Evaluator evaluator_;
    PlayServiceOptions opts_;

    mutable std::shared_mutex table_mutex_;
    std::map<std::string, std::shared_ptr<LiveSession>, std::less<>> sessions_;
};

// Called once the socket is bound: the actual port (useful with port 0) and a
// callable that stops the server from another thread.
using ListeningCallback = std::function<void(int port, std::function<void()> stop)>;

// Serves PlayService over HTTP, blocking until stopped. Mounts static_dir at
// "/" when given, so the console can be served from the same origin.
void serve_http(PlayService& service, const std::string& host, int port,
                const std::optional<std::filesystem::path>& static_dir = std::nullopt,
                ListeningCallback on_listening = {});

} // namespace turtlesoup
