// SPDX-License-Identifier: Apache-2.0
// soupctl: run, score and report situation-puzzle sessions; serve the play API.

#include "turtlesoup/batch.hpp"
#include "turtlesoup/errors.hpp"
#include "turtlesoup/service.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

#ifndef TURTLESOUP_SOURCE_DIR
#define TURTLESOUP_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;
using namespace turtlesoup;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

fs::path source_path(const char* rel) { return fs::path(TURTLESOUP_SOURCE_DIR) / rel; }

void print_manifest(const RunManifest& m) {
    for (const auto& [id, e] : m.puzzles) {
        fmt::print("{:<24} {:<12}{}\n", id, status_name(e.status), e.reason.empty() ? "" : "  " + e.reason);
    }
    fmt::print("run {}: {} puzzle(s), {} session(s) executed\n", m.run_id, m.puzzles.size(), m.sessions_executed);
}

int run_cmd(const fs::path& corpus_path, const fs::path& config_path, const fs::path& out, int limit,
            const std::string& run_id, const std::string& label) {
    const auto corpus = load_corpus(corpus_path);
    auto env = RunEnvironment::from_config(EngineConfig::load(config_path));
    RunOptions opts{out, run_id, label, corpus_path, limit};
    const auto m = run_batch(corpus, env.config.session, env, opts);
    print_manifest(m);
    return m.all_ok() ? kExitOk : kExitPartial;
}

int eval_cmd(const fs::path& run_dir, const std::optional<fs::path>& config_path,
             const std::optional<fs::path>& corpus_path) {
    std::ifstream in(run_dir / "run_config.json");
    if (!in) throw ConfigError(fmt::format("{} has no run_config.json", run_dir.string()));
    const auto run_config = nlohmann::json::parse(in);
    EngineConfig cfg = config_path ? EngineConfig::load(*config_path) : EngineConfig::from_json(run_config.at("engine"));
    const fs::path cpath = corpus_path ? *corpus_path : fs::path(run_config.value("corpus_path", std::string{}));
    if (cpath.empty()) throw ConfigError("no corpus recorded for this run; pass --corpus");
    const auto corpus = load_corpus(cpath);
    auto env = RunEnvironment::from_config(std::move(cfg));
    const auto m = evaluate_run(run_dir, corpus, env);
    print_manifest(m);
    return m.all_ok() ? kExitOk : kExitPartial;
}

int report_cmd(const std::vector<fs::path>& runs, const std::string& baseline_name, const fs::path& baselines_dir,
               bool by_config, const std::optional<fs::path>& csv_out) {
    std::optional<Baseline> baseline;
    if (!baseline_name.empty()) baseline = load_named_baseline(baseline_name, baselines_dir);
    const auto report = aggregate(runs, baseline ? &*baseline : nullptr,
                                  by_config ? Grouping::config : Grouping::genre_language);
    fmt::print("{}", report.to_text());
    if (csv_out) {
        std::ofstream out(*csv_out);
        if (!out) throw ConfigError(fmt::format("cannot write {}", csv_out->string()));
        out << report.to_csv();
    }
    return report.warnings.empty() ? kExitOk : kExitPartial;
}

int ablate_cmd(const fs::path& corpus_path, const fs::path& config_path, const fs::path& out, int limit) {
    const auto corpus = load_corpus(corpus_path);
    auto env = RunEnvironment::from_config(EngineConfig::load(config_path));
    const auto report = run_ablation(corpus, env.config.session, env, out, corpus_path, limit);
    fmt::print("{}", report.to_text());
    return report.warnings.empty() && report.rows.size() == ablation_grid().size() ? kExitOk : kExitPartial;
}

int serve_cmd(const fs::path& corpus_path, const fs::path& config_path, const std::string& host, int port,
              const std::optional<fs::path>& static_dir, const std::optional<fs::path>& snapshots) {
    auto corpus = load_corpus(corpus_path);
    auto env = RunEnvironment::from_config(EngineConfig::load(config_path));
    const EngineContext ctx = env.context_for_session();
    Responder responder(RoleClient(ctx.gateway, ctx.profiles.responder, env.prompts, "responder"));
    Evaluator evaluator(RoleClient(ctx.gateway, ctx.profiles.judge, env.prompts, "judge"), env.config.session.max_reparse);
    PlayServiceOptions opts;
    opts.session = env.config.session;
    opts.snapshot_dir = snapshots;
    PlayService service(std::move(corpus), std::move(responder), std::move(evaluator), opts);
    serve_http(service, host, port, static_dir, [&](int bound, std::function<void()>) {
        fmt::print("listening on http://{}:{}\n", host, bound);
        std::fflush(stdout);
    });
    return kExitOk;
}

int stats_cmd(const fs::path& corpus_path) {
    const auto corpus = load_corpus(corpus_path);
    const auto s = corpus_stats(corpus);
    fmt::print("puzzles: {}\n", s.puzzles);
    for (const auto& [g, n] : s.per_genre) fmt::print("  genre {:<16} {}\n", g, n);
    for (const auto& [l, n] : s.per_language) fmt::print("  language {:<13} {}\n", l, n);
    fmt::print("mean surface chars: {:.1f}\nmean bottom chars: {:.1f}\nmean key clues: {:.2f}\n",
               s.mean_surface_chars, s.mean_bottom_chars, s.mean_key_clues);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"soupctl: situation-puzzle engine"};
    app.require_subcommand(1);

    fs::path corpus, config, out;
    int limit = 4;
    std::string run_id, label;
    auto* run = app.add_subcommand("run", "play and score a corpus");
    run->add_option("--corpus", corpus, "puzzle corpus (JSON array)")->required();
    run->add_option("--config", config, "engine config")->required();
    run->add_option("--out", out, "run directory")->required();
    run->add_option("--limit", limit, "max concurrent sessions")->check(CLI::PositiveNumber);
    run->add_option("--run-id", run_id, "run id (default: directory name)");
    run->add_option("--label", label, "config label used in reports");

    fs::path run_dir;
    std::optional<fs::path> eval_config, eval_corpus;
    auto* eval = app.add_subcommand("eval", "re-score the transcripts of a run");
    eval->add_option("--run", run_dir, "run directory")->required();
    eval->add_option("--config", eval_config, "engine config (default: the one recorded with the run)");
    eval->add_option("--corpus", eval_corpus, "corpus (default: the one recorded with the run)");

    std::vector<fs::path> runs;
    std::string baseline;
    fs::path baselines_dir = default_baselines_dir();
    bool by_config = false;
    std::optional<fs::path> csv_out;
    auto* report = app.add_subcommand("report", "aggregate scorecards");
    report->add_option("--runs", runs, "run directories")->required()->expected(1, -1);
    report->add_option("--baseline", baseline, "baseline name, e.g. human");
    report->add_option("--baselines-dir", baselines_dir, "directory of baseline CSV files");
    report->add_flag("--by-config", by_config, "one row per configuration");
    report->add_option("--csv", csv_out, "also write the report as CSV");

    fs::path ablate_config = source_path("config/offline.json");
    auto* ablate = app.add_subcommand("ablate", "run the six ablation configurations");
    ablate->add_option("--corpus", corpus, "puzzle corpus")->required();
    ablate->add_option("--out", out, "output directory")->required();
    ablate->add_option("--config", ablate_config, "engine config (default: offline scripted oracle)");
    ablate->add_option("--limit", limit, "max concurrent sessions")->check(CLI::PositiveNumber);

    int port = 8080;
    std::string host = "127.0.0.1";
    fs::path serve_corpus = source_path("corpus/seed.json");
    fs::path serve_config = source_path("config/offline.json");
    std::optional<fs::path> static_dir, snapshots;
    auto* serve = app.add_subcommand("serve", "serve the human play API");
    serve->add_option("--port", port, "port (0 picks a free one)");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--corpus", serve_corpus, "puzzle corpus");
    serve->add_option("--config", serve_config, "engine config");
    serve->add_option("--static", static_dir, "directory served at /");
    serve->add_option("--snapshots", snapshots, "directory for session snapshots");

    fs::path stats_corpus;
    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("--corpus", stats_corpus, "puzzle corpus")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return run_cmd(corpus, config, out, limit, run_id, label);
        if (*eval) return eval_cmd(run_dir, eval_config, eval_corpus);
        if (*report) return report_cmd(runs, baseline, baselines_dir, by_config, csv_out);
        if (*ablate) return ablate_cmd(corpus, ablate_config, out, limit);
        if (*serve) return serve_cmd(serve_corpus, serve_config, host, port, static_dir, snapshots);
        if (*stats) return stats_cmd(stats_corpus);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const CorpusError& e) {
        fmt::print(stderr, "corpus error: {}\n", e.what());
        return kExitConfig;
    } catch (const PromptError& e) {
        fmt::print(stderr, "prompt error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitPartial;
    }
    return kExitOk;
}
