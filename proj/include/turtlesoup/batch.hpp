// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "turtlesoup/config.hpp"
#include "turtlesoup/corpus.hpp"
#include "turtlesoup/evaluator.hpp"
#include "turtlesoup/gateway.hpp"
#include "turtlesoup/prompt_registry.hpp"
#include "turtlesoup/session.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace turtlesoup {

// Produces the backend for one puzzle. Scripted runs hand every session a
// fresh oracle so results do not depend on scheduling.
using BackendFactory = std::function<std::shared_ptr<ChatBackend>()>;

struct RunEnvironment {
    EngineConfig config;
    PromptRegistry prompts;
    BackendFactory backend_factory;
    RetryPolicy retry;

    // OpenAI backend shared across sessions, or a per-session copy of the
    // configured oracle script.
    static RunEnvironment from_config(EngineConfig config);

    EngineContext context_for_session() const;
};

enum class PuzzleStatus { ok, aborted, unevaluated };

std::string_view status_name(PuzzleStatus s);
PuzzleStatus parse_status(std::string_view s);

struct RunManifest {
    std::string run_id;
    std::string label;
    std::string corpus_path;
    SessionConfig session;
    std::map<std::string, std::string> role_providers;
    std::string started_at;
    std::string finished_at;
    struct Entry {
        PuzzleStatus status = PuzzleStatus::unevaluated;
        std::string genre;
        std::string language;
        std::string reason; // set for aborted / unevaluated
    };
    std::map<std::string, Entry> puzzles; // by puzzle id
    int sessions_executed = 0;            // sessions played by the latest invocation

    bool all_ok() const;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    static RunManifest load(const std::filesystem::path& run_dir);
};

struct RunOptions {
    std::filesystem::path out_dir;   // the run directory
    std::string run_id;              // defaults to out_dir's name
    std::string label;               // config label used in reports
    std::filesystem::path corpus_path;
    int concurrency_limit = 4;
};

std::filesystem::path transcript_path(const std::filesystem::path& dir, std::string_view puzzle_id,
                                      std::string_view run_id);
std::filesystem::path scorecard_path(const std::filesystem::path& dir, std::string_view puzzle_id,
                                     std::string_view run_id);

/// Plays and scores every puzzle with at most concurrency_limit sessions in
/// flight. Puzzles that already have a scorecard under the same run id are
/// skipped, so an interrupted run resumes where it stopped.
RunManifest run_batch(std::span<const Puzzle> corpus, const SessionConfig& cfg, const RunEnvironment& env,
                      const RunOptions& opts);

/// Re-scores the transcripts of an existing run directory.
RunManifest evaluate_run(const std::filesystem::path& run_dir, std::span<const Puzzle> corpus,
                         const RunEnvironment& env);

struct BaselineRow {
    std::string genre;
    std::string language;
    double s_overall = 0.0;
};

// CSV with header genre,language,s_overall.
struct Baseline {
    std::string name;
    std::vector<BaselineRow> rows;

    static Baseline load(const std::filesystem::path& csv, std::string name);

    struct Hit {
        double s_overall;
        bool same_language;
        std::string language;
    };
    // Exact (genre, language) row first, then any row for the genre.
    std::optional<Hit> lookup(std::string_view genre, std::string_view language) const;
    std::string coverage() const; // languages present, e.g. "zh"
};

std::filesystem::path default_baselines_dir();

// baselines/<name>.csv; ConfigError when it does not exist.
Baseline load_named_baseline(std::string_view name, const std::filesystem::path& dir = default_baselines_dir());

struct ReportRow {
    std::string config_label;
    std::string genre;    // "*" when not grouped by genre
    std::string language; // "*" when not grouped by language
    std::size_t count = 0;
    double s_logic = 0.0;
    double s_details = 0.0;
    double s_conclusion = 0.0;
    double s_overall = 0.0;
    std::optional<double> delta;  // s_overall - baseline
    std::string delta_note;       // set when the baseline row is from another language
};

enum class Grouping { genre_language, config };

struct AggregateReport {
    Grouping grouping = Grouping::genre_language;
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    std::optional<std::string> baseline_name;
    std::string baseline_coverage;

    std::string to_csv() const;
    std::string to_text() const;
};

/// Means of the persisted scorecards per (config, genre, language), or per
/// config. Groups with no evaluated puzzle are omitted with a warning.
AggregateReport aggregate(std::span<const std::filesystem::path> run_dirs, const Baseline* baseline = nullptr,
                          Grouping grouping = Grouping::genre_language);

// full, no_deliberation, no_metacognition, no_pruning, no_key_clue, all_off
std::vector<AblationFlags> ablation_grid();

/// Runs the six ablation configurations into out_dir/<label>/ and returns one
/// row per configuration.
AggregateReport run_ablation(std::span<const Puzzle> corpus, const SessionConfig& base_cfg, const RunEnvironment& env,
                             const std::filesystem::path& out_dir, std::filesystem::path corpus_path = {},
                             int concurrency_limit = 4);

} // namespace turtlesoup
