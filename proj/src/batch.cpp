// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/batch.hpp"

#include "turtlesoup/errors.hpp"
#include "turtlesoup/openai_backend.hpp"
#include "turtlesoup/scripted_oracle.hpp"
#include "turtlesoup/text_util.hpp"

#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef TURTLESOUP_SOURCE_DIR
#define TURTLESOUP_SOURCE_DIR "."
#endif

namespace turtlesoup {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Write-then-rename so a crash never leaves a half-written file behind.
void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
        out << content;
        if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    }
    fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot read {}", path.string()));
    return json::parse(in);
}

fs::path normalized_dir(const fs::path& p) {
    fs::path n = p.lexically_normal();
    if (n.filename().empty()) n = n.parent_path();
    return n;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json timings_json(const Transcript& tr) {
    json j = json::object();
    for (const auto& [phase, ms] : tr.phase_ms) j[phase] = ms;
    return j;
}

struct SessionOutcome {
    PuzzleStatus status;
    std::string reason;
};

SessionOutcome score_and_persist(const Transcript& tr, const Puzzle& p, const Evaluator& evaluator,
                                 const fs::path& dir, const std::string& run_id, const std::string& label) {
    if (tr.aborted()) return {PuzzleStatus::aborted, tr.abort_reason};
    try {
        const ScoreCard card = evaluator.evaluate(tr, p);
        json j = card.to_json();
        j["run_id"] = run_id;
        j["config_label"] = label;
        j["genre"] = genre_name(p.genre);
        j["language"] = language_code(p.language);
        write_atomic(scorecard_path(dir, p.id, run_id), dump(j));
        return {PuzzleStatus::ok, {}};
    } catch (const EvaluationError& e) {
        return {PuzzleStatus::unevaluated, e.what()};
    } catch (const GatewayError& e) {
        return {PuzzleStatus::unevaluated, e.what()};
    }
}

} // namespace

std::string_view status_name(PuzzleStatus s) {
    switch (s) {
    case PuzzleStatus::ok: return "ok";
    case PuzzleStatus::aborted: return "aborted";
    case PuzzleStatus::unevaluated: return "unevaluated";
    }
    return "unevaluated";
}

PuzzleStatus parse_status(std::string_view s) {
    if (s == "ok") return PuzzleStatus::ok;
    if (s == "aborted") return PuzzleStatus::aborted;
    if (s == "unevaluated") return PuzzleStatus::unevaluated;
    throw ValidationError(fmt::format("unknown puzzle status '{}'", s));
}

RunEnvironment RunEnvironment::from_config(EngineConfig config) {
    RunEnvironment env;
    env.prompts = PromptRegistry::load(config.prompts_dir.value_or(PromptRegistry::default_dir()));
    if (config.oracle_script) {
        auto proto = std::make_shared<const ScriptedOracle>(ScriptedOracle::load(*config.oracle_script));
        env.backend_factory = [proto] { return std::make_shared<ScriptedOracle>(*proto); };
    } else {
        auto shared = std::make_shared<OpenAiBackend>();
        env.backend_factory = [shared] { return shared; };
    }
    env.config = std::move(config);
    return env;
}

EngineContext RunEnvironment::context_for_session() const {
    if (!backend_factory) throw ConfigError("run environment has no backend");
    return EngineContext{Gateway(backend_factory(), retry), config.role_profiles(), &prompts};
}

bool RunManifest::all_ok() const {
    for (const auto& [_, e] : puzzles) {
        if (e.status != PuzzleStatus::ok) return false;
    }
    return true;
}

json RunManifest::to_json() const {
    json ps = json::object();
    for (const auto& [id, e] : puzzles) {
        json entry{{"status", status_name(e.status)}, {"genre", e.genre}, {"language", e.language}};
        if (!e.reason.empty()) entry["reason"] = e.reason;
        ps[id] = std::move(entry);
    }
    return json{{"run_id", run_id},
                {"label", label},
                {"corpus_path", corpus_path},
                {"session", session.to_json()},
                {"role_providers", role_providers},
                {"started_at", started_at},
                {"finished_at", finished_at},
                {"sessions_executed", sessions_executed},
                {"puzzles", std::move(ps)}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.label = j.value("label", std::string{});
    m.corpus_path = j.value("corpus_path", std::string{});
    m.session = SessionConfig::from_json(j.at("session"));
    m.role_providers = j.value("role_providers", std::map<std::string, std::string>{});
    m.started_at = j.value("started_at", std::string{});
    m.finished_at = j.value("finished_at", std::string{});
    m.sessions_executed = j.value("sessions_executed", 0);
    const json puzzles = j.value("puzzles", json::object());
    for (const auto& [id, e] : puzzles.items()) {
        m.puzzles[id] = {parse_status(e.at("status").get<std::string>()), e.value("genre", std::string{}),
                         e.value("language", std::string{}), e.value("reason", std::string{})};
    }
    return m;
}

RunManifest RunManifest::load(const fs::path& run_dir) {
    const auto path = run_dir / "manifest.json";
    if (!fs::exists(path)) throw ConfigError(fmt::format("{} is not a run directory (no manifest.json)", run_dir.string()));
    try {
        return from_json(read_json(path));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("malformed manifest in {}: {}", run_dir.string(), e.what()));
    }
}

fs::path transcript_path(const fs::path& dir, std::string_view puzzle_id, std::string_view run_id) {
    return dir / fmt::format("{}.{}.transcript.json", puzzle_id, run_id);
}

fs::path scorecard_path(const fs::path& dir, std::string_view puzzle_id, std::string_view run_id) {
    return dir / fmt::format("{}.{}.scorecard.json", puzzle_id, run_id);
}

RunManifest run_batch(std::span<const Puzzle> corpus, const SessionConfig& cfg, const RunEnvironment& env,
                      const RunOptions& opts) {
    cfg.validate();
    if (opts.concurrency_limit < 1) throw ConfigError("concurrency limit must be >= 1");
    const fs::path dir = normalized_dir(opts.out_dir);
    try {
        fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        throw Error(fmt::format("cannot create output directory {}: {}", dir.string(), e.what()));
    }
    const std::string run_id = opts.run_id.empty() ? dir.filename().string() : opts.run_id;
    if (run_id.empty()) throw ConfigError("run id must be non-empty");
    const RoleProfiles profiles = env.config.role_profiles();

    RunManifest manifest;
    if (fs::exists(dir / "manifest.json")) {
        manifest = RunManifest::load(dir);
        if (manifest.run_id != run_id)
            throw ConfigError(fmt::format("{} already holds run '{}'", dir.string(), manifest.run_id));
        if (!(manifest.session == cfg))
            throw ConfigError(fmt::format("run '{}' was started with a different session config", run_id));
    } else {
        manifest.run_id = run_id;
        manifest.started_at = utc_now();
    }
    manifest.label = opts.label.empty() ? cfg.ablation.label() : opts.label;
    manifest.corpus_path = opts.corpus_path.empty() ? manifest.corpus_path : fs::absolute(opts.corpus_path).string();
    manifest.session = cfg;
    manifest.role_providers = {{"questioner", profiles.questioner.name},
                               {"responder", profiles.responder.name},
                               {"judge", profiles.judge.name}};
    manifest.sessions_executed = 0;
    manifest.finished_at.clear();

    json run_config{{"run_id", run_id},
                    {"label", manifest.label},
                    {"corpus_path", manifest.corpus_path},
                    {"session", cfg.to_json()},
                    {"engine", env.config.to_json()}};
    write_atomic(dir / "run_config.json", dump(run_config));

    std::vector<const Puzzle*> pending;
    for (const auto& p : corpus) {
        auto& entry = manifest.puzzles[p.id];
        entry.genre = genre_name(p.genre);
        entry.language = language_code(p.language);
        if (fs::exists(scorecard_path(dir, p.id, run_id))) {
            entry.status = PuzzleStatus::ok;
            entry.reason.clear();
        } else {
            pending.push_back(&p);
        }
    }
    write_atomic(dir / "manifest.json", dump(manifest.to_json()));

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pending.size(); i = next++) {
            const Puzzle& p = *pending[i];
            SessionOutcome outcome{PuzzleStatus::aborted, {}};
            try {
                const EngineContext ctx = env.context_for_session();
                Transcript tr = run_session(p, cfg, ctx);
                tr.run_id = run_id;
                write_atomic(transcript_path(dir, p.id, run_id), dump(tr.to_json()));
                write_atomic(dir / fmt::format("{}.{}.timings.json", p.id, run_id), dump(timings_json(tr)));
                ExchangeLog judge_log;
                const Evaluator evaluator(RoleClient(ctx.gateway, ctx.profiles.judge, *ctx.prompts, "judge", &judge_log),
                                          cfg.max_reparse);
                outcome = score_and_persist(tr, p, evaluator, dir, run_id, manifest.label);
            } catch (const std::exception& e) {
                outcome = {PuzzleStatus::aborted, e.what()};
            }
            std::lock_guard lock(mu);
            auto& entry = manifest.puzzles[p.id];
            entry.status = outcome.status;
            entry.reason = outcome.reason;
            ++manifest.sessions_executed;
            write_atomic(dir / "manifest.json", dump(manifest.to_json()));
        }
    };

    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(opts.concurrency_limit), pending.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    pool.clear(); // joins

    manifest.finished_at = utc_now();
    write_atomic(dir / "manifest.json", dump(manifest.to_json()));
    return manifest;
}

RunManifest evaluate_run(const fs::path& run_dir, std::span<const Puzzle> corpus, const RunEnvironment& env) {
    const fs::path dir = normalized_dir(run_dir);
    RunManifest manifest = RunManifest::load(dir);
    for (auto& [id, entry] : manifest.puzzles) {
        const auto tpath = transcript_path(dir, id, manifest.run_id);
        if (!fs::exists(tpath)) continue;
        const Puzzle* p = find_puzzle(corpus, id);
        if (!p) {
            entry.status = PuzzleStatus::unevaluated;
            entry.reason = "puzzle not found in corpus";
            continue;
        }
        try {
            const Transcript tr = Transcript::from_json(read_json(tpath));
            const EngineContext ctx = env.context_for_session();
            ExchangeLog judge_log;
            const Evaluator evaluator(RoleClient(ctx.gateway, ctx.profiles.judge, *ctx.prompts, "judge", &judge_log),
                                      manifest.session.max_reparse);
            const auto outcome = score_and_persist(tr, *p, evaluator, dir, manifest.run_id, manifest.label);
            entry.status = outcome.status;
            entry.reason = outcome.reason;
        } catch (const std::exception& e) {
            entry.status = PuzzleStatus::unevaluated;
            entry.reason = e.what();
        }
    }
    manifest.sessions_executed = 0;
    write_atomic(dir / "manifest.json", dump(manifest.to_json()));
    return manifest;
}

Baseline Baseline::load(const fs::path& csv, std::string name) {
    std::ifstream in(csv);
    if (!in) throw ConfigError(fmt::format("cannot read baseline {}", csv.string()));
    Baseline b;
    b.name = std::move(name);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = text::trim(line);
        if (t.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(t);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(text::trim(c));
        if (lineno == 1) {
            if (cols != std::vector<std::string>{"genre", "language", "s_overall"})
                throw ConfigError(fmt::format("{}: header must be genre,language,s_overall", csv.string()));
            continue;
        }
        if (cols.size() != 3) throw ConfigError(fmt::format("{}:{}: expected 3 columns", csv.string(), lineno));
        try {
            b.rows.push_back({cols[0], cols[1], std::stod(cols[2])});
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("{}:{}: bad score '{}'", csv.string(), lineno, cols[2]));
        }
    }
    return b;
}

std::optional<Baseline::Hit> Baseline::lookup(std::string_view genre, std::string_view language) const {
    for (const auto& r : rows) {
        if (r.genre == genre && r.language == language) return Hit{r.s_overall, true, r.language};
    }
    for (const auto& r : rows) {
        if (r.genre == genre) return Hit{r.s_overall, false, r.language};
    }
    return std::nullopt;
}

std::string Baseline::coverage() const {
    std::vector<std::string> langs;
    for (const auto& r : rows) {
        if (std::find(langs.begin(), langs.end(), r.language) == langs.end()) langs.push_back(r.language);
    }
    return text::join(langs, ",");
}

fs::path default_baselines_dir() {
    if (const char* env = std::getenv("TURTLESOUP_BASELINES"); env && *env) return env;
    return fs::path(TURTLESOUP_SOURCE_DIR) / "baselines";
}

Baseline load_named_baseline(std::string_view name, const fs::path& dir) {
    const auto path = dir / (std::string(name) + ".csv");
    if (!fs::exists(path)) throw ConfigError(fmt::format("missing baseline '{}' (looked for {})", name, path.string()));
    return Baseline::load(path, std::string(name));
}

AggregateReport aggregate(std::span<const fs::path> run_dirs, const Baseline* baseline, Grouping grouping) {
    struct Acc {
        ReportRow row;
        double l = 0, d = 0, c = 0, o = 0;
    };
    AggregateReport report;
    report.grouping = grouping;
    if (baseline) {
        report.baseline_name = baseline->name;
        report.baseline_coverage = baseline->coverage();
    }
    std::vector<Acc> groups;
    auto group_for = [&](const std::string& label, const std::string& genre, const std::string& lang) -> Acc& {
        const std::string g = grouping == Grouping::config ? "*" : genre;
        const std::string l = grouping == Grouping::config ? "*" : lang;
        for (auto& a : groups) {
            if (a.row.config_label == label && a.row.genre == g && a.row.language == l) return a;
        }
        Acc a;
        a.row.config_label = label;
        a.row.genre = g;
        a.row.language = l;
        groups.push_back(std::move(a));
        return groups.back();
    };

    for (const auto& raw_dir : run_dirs) {
        const fs::path dir = normalized_dir(raw_dir);
        const RunManifest m = RunManifest::load(dir);
        const std::string label = m.label.empty() ? m.run_id : m.label;
        for (const auto& [id, entry] : m.puzzles) {
            Acc& acc = group_for(label, entry.genre, entry.language);
            const auto spath = scorecard_path(dir, id, m.run_id);
            if (entry.status != PuzzleStatus::ok || !fs::exists(spath)) {
                report.warnings.push_back(
                    fmt::format("{}: {} has no scorecard ({})", label, id, status_name(entry.status)));
                continue;
            }
            const ScoreCard card = ScoreCard::from_json(read_json(spath));
            acc.l += card.s_logic;
            acc.d += card.s_details;
            acc.c += card.s_conclusion;
            acc.o += card.s_overall;
            ++acc.row.count;
        }
    }

    for (auto& a : groups) {
        if (a.row.count == 0) {
            report.warnings.push_back(fmt::format("group ({}, {}, {}) has no evaluated puzzle; omitted",
                                                  a.row.config_label, a.row.genre, a.row.language));
            continue;
        }
        const auto n = static_cast<double>(a.row.count);
        a.row.s_logic = a.l / n;
        a.row.s_details = a.d / n;
        a.row.s_conclusion = a.c / n;
        a.row.s_overall = a.o / n;
        if (baseline && grouping == Grouping::genre_language) {
            if (auto hit = baseline->lookup(a.row.genre, a.row.language)) {
                a.row.delta = a.row.s_overall - hit->s_overall;
                if (!hit->same_language) a.row.delta_note = fmt::format("cross-language (baseline: {})", hit->language);
            } else {
                report.warnings.push_back(
                    fmt::format("baseline '{}' has no row for genre {}", baseline->name, a.row.genre));
            }
        }
        report.rows.push_back(a.row);
    }
    return report;
}

std::string AggregateReport::to_csv() const {
    std::string out = "config,genre,language,count,s_logic,s_details,s_conclusion,s_overall";
    if (baseline_name) out += ",delta,delta_note";
    out += "\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{:.2f},{:.2f},{:.2f},{:.2f}", r.config_label, r.genre, r.language, r.count,
                           r.s_logic, r.s_details, r.s_conclusion, r.s_overall);
        if (baseline_name) out += r.delta ? fmt::format(",{:.2f},{}", *r.delta, r.delta_note) : std::string(",,");
        out += "\n";
    }
    return out;
}

std::string AggregateReport::to_text() const {
    std::string out;
    const bool by_config = grouping == Grouping::config;
    if (by_config) {
        out += fmt::format("{:<18} {:>5} {:>8} {:>8} {:>10} {:>8}\n", "config", "n", "logic", "details", "conclusion",
                           "overall");
    } else {
        out += fmt::format("{:<18} {:<16} {:<4} {:>5} {:>8} {:>8} {:>10} {:>8}", "config", "genre", "lang", "n",
                           "logic", "details", "conclusion", "overall");
        if (baseline_name) out += fmt::format(" {:>8}", "delta");
        out += "\n";
    }
    for (const auto& r : rows) {
        if (by_config) {
            out += fmt::format("{:<18} {:>5} {:>8.2f} {:>8.2f} {:>10.2f} {:>8.2f}\n", r.config_label, r.count,
                               r.s_logic, r.s_details, r.s_conclusion, r.s_overall);
            continue;
        }
        out += fmt::format("{:<18} {:<16} {:<4} {:>5} {:>8.2f} {:>8.2f} {:>10.2f} {:>8.2f}", r.config_label, r.genre,
                           r.language, r.count, r.s_logic, r.s_details, r.s_conclusion, r.s_overall);
        if (baseline_name) {
            out += r.delta ? fmt::format(" {:>+8.2f}", *r.delta) : fmt::format(" {:>8}", "-");
            if (!r.delta_note.empty()) out += "  " + r.delta_note;
        }
        out += "\n";
    }
    if (baseline_name) out += fmt::format("baseline: {} (languages: {})\n", *baseline_name, baseline_coverage);
    for (const auto& w : warnings) out += "warning: " + w + "\n";
    return out;
}

std::vector<AblationFlags> ablation_grid() {
    return {
        AblationFlags{},
        AblationFlags{true, false, false, false},
        AblationFlags{false, true, false, false},
        AblationFlags{false, false, true, false},
        AblationFlags{false, false, false, true},
        AblationFlags::all_off(),
    };
}

AggregateReport run_ablation(std::span<const Puzzle> corpus, const SessionConfig& base_cfg, const RunEnvironment& env,
                             const fs::path& out_dir, fs::path corpus_path, int concurrency_limit) {
    std::vector<fs::path> dirs;
    for (const auto& flags : ablation_grid()) {
        SessionConfig cfg = base_cfg;
        cfg.ablation = flags;
        RunOptions opts;
        opts.out_dir = out_dir / flags.label();
        opts.run_id = flags.label();
        opts.label = flags.label();
        opts.corpus_path = corpus_path;
        opts.concurrency_limit = concurrency_limit;
        run_batch(corpus, cfg, env, opts);
        dirs.push_back(opts.out_dir);
    }
    AggregateReport report = aggregate(dirs, nullptr, Grouping::config);
    write_atomic(out_dir / "ablation.csv", report.to_csv());
    write_atomic(out_dir / "ablation.txt", report.to_text());
    return report;
}

} // namespace turtlesoup
