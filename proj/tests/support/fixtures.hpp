// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the unit and acceptance tests.
#pragma once

#include "turtlesoup/batch.hpp"
#include "turtlesoup/corpus.hpp"
#include "turtlesoup/evaluator.hpp"
#include "turtlesoup/gateway.hpp"
#include "turtlesoup/prompt_registry.hpp"
#include "turtlesoup/questioner.hpp"
#include "turtlesoup/responder.hpp"
#include "turtlesoup/scripted_oracle.hpp"
#include "turtlesoup/session.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

namespace ts_test {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace turtlesoup;

inline fs::path source_dir() { return fs::path(TURTLESOUP_SOURCE_DIR); }

inline const PromptRegistry& prompts() {
    static const PromptRegistry reg = PromptRegistry::load(source_dir() / "prompts");
    return reg;
}

inline const std::vector<Puzzle>& seed_corpus() {
    static const std::vector<Puzzle> c = load_corpus(source_dir() / "corpus" / "seed.json");
    return c;
}

inline const Puzzle& short_man() {
    static const std::vector<Puzzle> c = load_corpus(source_dir() / "tests" / "fixtures" / "short_man.json");
    return c.front();
}

inline json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProviderProfile scripted_profile() { return ProviderProfile{"scripted", "", "scripted", "", true}; }

inline Gateway instant_gateway(std::shared_ptr<ChatBackend> backend) {
    return Gateway(std::move(backend), RetryPolicy{}, [](std::chrono::milliseconds) {});
}

inline std::shared_ptr<ScriptedOracle> oracle(std::vector<ScriptEntry> entries, bool cycle = false) {
    return std::make_shared<ScriptedOracle>(std::move(entries), cycle);
}

inline RoleClient client(std::shared_ptr<ChatBackend> backend, std::string role = "test", ExchangeLog* log = nullptr) {
    return RoleClient(instant_gateway(std::move(backend)), scripted_profile(), prompts(), std::move(role), log);
}

inline EngineContext context(std::shared_ptr<ChatBackend> backend) {
    const auto prof = scripted_profile();
    return EngineContext{instant_gateway(std::move(backend)), RoleProfiles{prof, prof, prof}, &prompts()};
}

// The oracle script shipped for offline runs.
inline json offline_script() { return read_json_file(source_dir() / "config" / "scripted_oracle.json"); }

// Environment whose sessions each get a fresh copy of `script`.
inline RunEnvironment scripted_env(const json& script, SessionConfig session = {}) {
    RunEnvironment env;
    env.config.session = session;
    env.config.oracle_script = fs::path("inline");
    env.prompts = prompts();
    auto proto = std::make_shared<const ScriptedOracle>(ScriptedOracle::from_json(script));
    env.backend_factory = [proto] { return std::make_shared<ScriptedOracle>(*proto); };
    env.retry = RetryPolicy{3, std::chrono::milliseconds{0}, 1.0};
    return env;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("turtlesoup-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

} // namespace ts_test
