// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include "actor/agents.hpp"
#include "actor/coverage.hpp"
#include "actor/eval.hpp"
#include "actor/harness.hpp"
#include "actor/safety.hpp"

namespace actor {

// The adversarial loop: a translator agent produces a Rust candidate, a
// discriminator agent grows the test suite with inputs that break it, and
// the translator repairs against the grown suite; iterate until the
// discriminator can no longer find a counterexample or the iteration budget
// runs out. Strategies ablate the discriminator:
//   naive:    one-shot translation against the seed suite, no adversary
//   coverage: the adversary only chases line coverage of the C source
//   nofuzz:   full adversary, but without the fuzzing tool
//   full:     full adversary with fuzzing available

enum class Strategy { naive, coverage, nofuzz, full };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::naive: return "naive";
        case Strategy::coverage: return "coverage";
        case Strategy::nofuzz: return "nofuzz";
        case Strategy::full: return "full";
    }
    return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "naive") return Strategy::naive;
    if (s == "coverage") return Strategy::coverage;
    if (s == "nofuzz") return Strategy::nofuzz;
    if (s == "full") return Strategy::full;
    throw SpecError("unknown strategy: " + s);
}

struct RunConfig {
    Strategy strategy = Strategy::full;
    std::string run_id = "run";
    fs::path c_root;
    fs::path seed_suite;
    fs::path out_root;
    fs::path assets_dir;
    int max_iterations = 10;
    int batch_size = 3;
    int seed_count = 15;  // 0 = accept whatever the seed dir holds
    ExecLimits limits;
    AgentBudget budget;
    bool enforce_safety_each_iter = true;
    Pricing pricing;
    fs::path scratch_root = detail::default_scratch_root();
    unsigned jobs = 1;

    // the suite can only reach this size when every iteration lands a full batch
    int max_final_suite_size() const { return seed_count + max_iterations * batch_size; }

    void validate() const {
        if (!is_safe_id(run_id)) throw SpecError("bad run id: " + run_id);
        if (max_iterations < 0) throw SpecError("max_iterations must be >= 0");
        if (batch_size < 1) throw SpecError("batch_size must be >= 1");
        if (seed_count < 0) throw SpecError("seed_count must be >= 0");
        if (c_root.empty() || seed_suite.empty() || out_root.empty() || assets_dir.empty())
            throw SpecError("c_root, seed_suite, out_root and assets_dir are required");
    }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
    return {{"strategy", to_string(c.strategy)},
            {"run_id", c.run_id},
            {"c_root", c.c_root.string()},
            {"seed_suite", c.seed_suite.string()},
            {"out_root", c.out_root.string()},
            {"assets_dir", c.assets_dir.string()},
            {"max_iterations", c.max_iterations},
            {"batch_size", c.batch_size},
            {"seed_count", c.seed_count},
            {"wall_timeout_s", c.limits.wall_timeout_s},
            {"max_turns", c.budget.max_turns},
            {"max_retries", c.budget.max_retries},
            {"enforce_safety_each_iter", c.enforce_safety_each_iter},
            {"pricing",
             {{"input_per_token", c.pricing.input_per_token},
              {"output_per_token", c.pricing.output_per_token},
              {"cached_per_token", c.pricing.cached_per_token}}},
            {"jobs", c.jobs}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("strategy")) c.strategy = strategy_from_string(j["strategy"]);
    c.run_id = j.value("run_id", c.run_id);
    if (j.contains("c_root")) c.c_root = j["c_root"].get<std::string>();
    if (j.contains("seed_suite")) c.seed_suite = j["seed_suite"].get<std::string>();
    if (j.contains("out_root")) c.out_root = j["out_root"].get<std::string>();
    if (j.contains("assets_dir")) c.assets_dir = j["assets_dir"].get<std::string>();
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed_count = j.value("seed_count", c.seed_count);
    c.limits.wall_timeout_s = j.value("wall_timeout_s", c.limits.wall_timeout_s);
    c.budget.max_turns = j.value("max_turns", c.budget.max_turns);
    c.budget.max_retries = j.value("max_retries", c.budget.max_retries);
    c.enforce_safety_each_iter =
        j.value("enforce_safety_each_iter", c.enforce_safety_each_iter);
    if (j.contains("pricing")) {
        c.pricing.input_per_token = j["pricing"].value("input_per_token", 0.0);
        c.pricing.output_per_token = j["pricing"].value("output_per_token", 0.0);
        c.pricing.cached_per_token = j["pricing"].value("cached_per_token", 0.0);
    }
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

struct IterationReport {
    int iteration = 0;
    bool batch_accepted = false;
    int batch_tests = 0;
    int adversary_attempts = 0;
    std::size_t suite_size = 0;
    std::size_t passed_after_fix = 0;
    double coverage_fraction = 0.0;  // coverage strategy only
    std::string note;
};

inline nlohmann::json iteration_to_json(const IterationReport& r) {
    return {{"iteration", r.iteration},
            {"batch_accepted", r.batch_accepted},
            {"batch_tests", r.batch_tests},
            {"adversary_attempts", r.adversary_attempts},
            {"suite_size", r.suite_size},
            {"passed_after_fix", r.passed_after_fix},
            {"coverage_fraction", r.coverage_fraction},
            {"note", r.note}};
}

struct RunArtifacts {
    fs::path run_dir;
    fs::path suite_dir;        // <run_dir>/suite
    fs::path translation_dir;  // <run_dir>/workspace/translation
    std::vector<IterationReport> iterations;
    CostLedger ledger;
    std::string stop_reason;  // converged | iteration_budget | naive |
                              // translator_failed | resumed
    PassRate final_rate;
    std::size_t final_suite_size = 0;
    bool safety_clean = false;
};

// --- Internal loop state ---------------------------------------------------

namespace loopdetail {

struct LoopContext {
    RunConfig config;
    AgentBackend* backend = nullptr;
    fs::path ws;  // workspace root: c/ translation/ suite/ batch/
    SubjectProgram c_ref;
    TestSuite suite;
    CostLedger ledger;
};

inline BuildOptions build_opts(const LoopContext& ctx) {
    BuildOptions o;
    o.scratch_root = ctx.config.scratch_root;
    // unsafe candidates must still build so their behavior can be measured;
    // the scanner-based safety gate decides whether they may survive
    o.deny_unsafe = false;
    return o;
}

inline void sync_suite(LoopContext& ctx) { save_suite(ctx.suite, ctx.ws / "suite"); }

/// Pass rate of the workspace translation; build failure scores 0.
inline PassRate rate_translation(const LoopContext& ctx) {
    PassRate r = evaluate_translation(ctx.ws / "translation", ctx.suite, ctx.config.limits,
                                      build_opts(ctx), ctx.config.jobs);
    return r;
}

inline void record(LoopContext& ctx, const AgentOutcome& outcome, const char* role,
                   int iteration) {
    ctx.ledger = record_usage(outcome, std::move(ctx.ledger), ctx.config.pricing, role, iteration);
}

struct TranslatorResult {
    bool produced_build = false;
    PassRate rate;
    int attempts = 0;
};

/// Asks the translator for a candidate, retrying on regressions; the best
/// candidate seen (most suite passes) is what stays in the workspace. If
/// the current translation already passes everything, the agent is not
/// consulted at all.
inline TranslatorResult translator_round(LoopContext& ctx, const std::string& status,
                                         int iteration) {
    TranslatorResult result;
    fs::path rust_dir = ctx.ws / "translation";

    if (fs::exists(rust_dir) && !fs::is_empty(rust_dir)) {
        PassRate current = rate_translation(ctx);
        if (!current.build_failed && current.passed == current.total) {
            result.produced_build = true;
            result.rate = current;
            return result;
        }
    }

    AgentTask task;
    task.role = AgentRole::translator;
    task.workspace = ctx.ws;
    task.allowed_writes = {"translation/**"};
    task.budget = ctx.config.budget;
    task.prompt = render_prompt(ctx.config.assets_dir, "translator",
                                {{"c_source_dir", "c"},
                                 {"rust_dir", "translation"},
                                 {"suite_dir", "suite"},
                                 {"status", status}});

    std::map<std::string, Bytes> best_tree = snapshot_tree(rust_dir);
    std::size_t best_passed = 0;
    bool have_best = false;
    if (!best_tree.empty()) {
        PassRate current = rate_translation(ctx);
        if (!current.build_failed) {
            best_passed = current.passed;
            have_best = true;
        }
    }

    for (int attempt = 0; attempt <= ctx.config.budget.max_retries; ++attempt) {
        ++result.attempts;
        AgentOutcome outcome = run_agent(task, *ctx.backend);
        record(ctx, outcome, "translator", iteration);
        if (outcome.status == AgentStatus::backend_error) continue;
        if (outcome.status == AgentStatus::gave_up && attempt == ctx.config.budget.max_retries)
            break;
        PassRate r = rate_translation(ctx);
        if (!r.build_failed && (!have_best || r.passed > best_passed)) {
            best_tree = snapshot_tree(rust_dir);
            best_passed = r.passed;
            have_best = true;
        }
        if (!r.build_failed && r.passed == r.total) {
            result.produced_build = true;
            result.rate = r;
            return result;
        }
    }

    if (have_best) {
        fs::remove_all(rust_dir);
        materialize_tree(rust_dir, best_tree);
        result.produced_build = true;
        result.rate = rate_translation(ctx);
    }
    return result;
}

struct AdversaryResult {
    bool accepted = false;
    std::vector<TestCase> batch;  // expectations already captured
    int attempts = 0;
    double coverage_fraction = 0.0;
};

inline void clear_batch_dir(const fs::path& batch_dir) {
    std::error_code ec;
    fs::remove_all(batch_dir, ec);
    fs::create_directories(batch_dir);
}

/// Reads the proposed batch back from the workspace; empty optional means
/// the batch is structurally unusable for this attempt.
inline std::optional<std::vector<TestCase>> collect_batch(LoopContext& ctx, int iteration,
                                                          bool adversarial) {
    fs::path batch_dir = ctx.ws / "batch";
    std::vector<fs::path> dirs;
    if (fs::exists(batch_dir))
        for (const auto& e : fs::directory_iterator(batch_dir))
            if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty() || dirs.size() > static_cast<std::size_t>(ctx.config.batch_size)) return {};

    std::vector<TestCase> batch;
    std::set<std::string> batch_ids;
    for (const auto& d : dirs) {
        TestCase tc;
        try {
            tc = parse_test_case(d);
        } catch (const Error&) {
            return {};
        }
        if (ctx.suite.has_id(tc.id) || !batch_ids.insert(tc.id).second) return {};
        tc.iteration = iteration;
        tc.provenance = adversarial ? Provenance::adversarial : Provenance::coverage;
        try {
            tc = capture_expected(ctx.c_ref, tc, ctx.config.limits, ctx.config.scratch_root);
        } catch (const SanityFailure&) {
            return {};
        }
        batch.push_back(std::move(tc));
    }
    return batch;
}

/// Discriminator: the batch is accepted only when every test is sane on the
/// C reference and at least one of them breaks the current translation.
/// `prebuilt` skips rebuilding an unchanged candidate; an empty binary means
/// the candidate does not build (and any sane batch exposes it).
inline AdversaryResult discriminator_round(LoopContext& ctx, int iteration, bool allow_fuzz,
                                           const SubjectProgram* prebuilt = nullptr) {
    AdversaryResult result;
    AgentTask task;
    task.role = AgentRole::discriminator;
    task.workspace = ctx.ws;
    task.allowed_writes = {"batch/**"};
    task.budget = ctx.config.budget;
    task.prompt = render_prompt(ctx.config.assets_dir, "discriminator",
                                {{"c_source_dir", "c"},
                                 {"rust_dir", "translation"},
                                 {"suite_dir", "suite"},
                                 {"batch_dir", "batch"},
                                 {"batch_size", std::to_string(ctx.config.batch_size)},
                                 {"allow_fuzz", allow_fuzz ? "true" : "false"},
                                 {"fuzz_tool", "actor fuzz"}});

    SubjectProgram candidate;
    if (prebuilt) {
        candidate = *prebuilt;
    } else {
        try {
            candidate = build_subject(ctx.ws / "translation", SubjectKind::rust_candidate,
                                      build_opts(ctx));
        } catch (const BuildFailure&) {
            // an unbuildable candidate disagrees everywhere; any sane batch wins
        }
    }

    for (int attempt = 0; attempt <= ctx.config.budget.max_retries; ++attempt) {
        ++result.attempts;
        clear_batch_dir(ctx.ws / "batch");
        AgentOutcome outcome = run_agent(task, *ctx.backend);
        record(ctx, outcome, "discriminator", iteration);
        if (outcome.status == AgentStatus::gave_up) break;
        if (outcome.status == AgentStatus::backend_error) continue;
        auto batch = collect_batch(ctx, iteration, /*adversarial=*/true);
        if (!batch) continue;
        bool exposes = candidate.binary.empty();
        for (const auto& tc : *batch) {
            if (exposes) break;
            BehaviorRecord actual =
                execute(candidate, tc, ctx.config.limits, ctx.config.scratch_root);
            if (compare(*tc.expected, actual).status != VerdictStatus::match) exposes = true;
        }
        if (!exposes) continue;
        result.accepted = true;
        result.batch = std::move(*batch);
        break;
    }
    clear_batch_dir(ctx.ws / "batch");
    return result;
}

/// Coverage adversary: the batch is accepted only when it strictly increases
/// line coverage of the C source over the existing suite.
inline AdversaryResult coverage_round(LoopContext& ctx, int iteration) {
    AdversaryResult result;
    CoverageReport base =
        measure_coverage(ctx.ws / "c", ctx.suite, ctx.config.limits, ctx.config.scratch_root);
    result.coverage_fraction = base.percent();

    AgentTask task;
    task.role = AgentRole::discriminator;
    task.workspace = ctx.ws;
    task.allowed_writes = {"batch/**"};
    task.budget = ctx.config.budget;
    task.prompt = render_prompt(ctx.config.assets_dir, "coverage_gen",
                                {{"c_source_dir", "c"},
                                 {"suite_dir", "suite"},
                                 {"batch_dir", "batch"},
                                 {"batch_size", std::to_string(ctx.config.batch_size)}});

    for (int attempt = 0; attempt <= ctx.config.budget.max_retries; ++attempt) {
        ++result.attempts;
        clear_batch_dir(ctx.ws / "batch");
        AgentOutcome outcome = run_agent(task, *ctx.backend);
        record(ctx, outcome, "coverage", iteration);
        if (outcome.status == AgentStatus::gave_up) break;
        if (outcome.status == AgentStatus::backend_error) continue;
        auto batch = collect_batch(ctx, iteration, /*adversarial=*/false);
        if (!batch) continue;
        TestSuite grown = append_tests(ctx.suite, *batch, iteration);
        CoverageReport with_batch =
            measure_coverage(ctx.ws / "c", grown, ctx.config.limits, ctx.config.scratch_root);
        if (!(with_batch.percent() > base.percent())) continue;
        result.accepted = true;
        result.batch = std::move(*batch);
        result.coverage_fraction = with_batch.percent();
        break;
    }
    clear_batch_dir(ctx.ws / "batch");
    return result;
}

/// Scans the candidate for unsafe constructs and, when findings exist, gives
/// the safety fixer a bounded number of chances to clear them without
/// regressing the suite.
inline bool safety_round(LoopContext& ctx, int iteration) {
    fs::path rust_dir = ctx.ws / "translation";
    SafetyReport report = scan_sources(rust_dir);
    if (report.safe()) return true;

    std::string findings;
    for (const auto& f : report.findings)
        findings += f.file + ":" + std::to_string(f.line) + ": " + to_string(f.kind) + ": " +
                    f.excerpt + "\n";

    AgentTask task;
    task.role = AgentRole::safety_fixer;
    task.workspace = ctx.ws;
    task.allowed_writes = {"translation/**"};
    task.budget = ctx.config.budget;
    task.prompt = render_prompt(ctx.config.assets_dir, "safety_fix",
                                {{"rust_dir", "translation"},
                                 {"suite_dir", "suite"},
                                 {"findings", findings}});

    for (int attempt = 0; attempt <= ctx.config.budget.max_retries; ++attempt) {
        AgentOutcome outcome = run_agent(task, *ctx.backend);
        record(ctx, outcome, "safety_fixer", iteration);
        if (outcome.status == AgentStatus::backend_error) continue;
        PassRate r = rate_translation(ctx);
        if (scan_sources(rust_dir).safe() && !r.build_failed && r.passed == r.total) return true;
        if (outcome.status == AgentStatus::gave_up) break;
    }
    return false;
}

inline void copy_dir(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

}  // namespace loopdetail

// --- Bootstrap -------------------------------------------------------------

/// Stages the workspace and captures expected behavior for every seed. Any
/// seed the C reference cannot run deterministically is a corpus defect, not
/// a translation bug, so it aborts the run up front.
inline loopdetail::LoopContext bootstrap(const RunConfig& config, AgentBackend& backend,
                                         const fs::path& run_dir) {
    config.validate();
    loopdetail::LoopContext ctx;
    ctx.config = config;
    ctx.backend = &backend;
    ctx.ws = run_dir / "workspace";
    fs::create_directories(ctx.ws / "translation");
    fs::create_directories(ctx.ws / "batch");
    loopdetail::copy_dir(config.c_root, ctx.ws / "c");

    try {
        ctx.c_ref = build_subject(ctx.ws / "c", SubjectKind::c_reference,
                                  loopdetail::build_opts(ctx));
    } catch (const BuildFailure& e) {
        throw BootstrapFailure(std::string("C reference does not build: ") + e.what());
    }

    TestSuite seeds;
    try {
        seeds = load_suite(config.seed_suite);
    } catch (const Error& e) {
        throw BootstrapFailure(std::string("seed suite unreadable: ") + e.what());
    }
    if (seeds.cases.empty()) throw BootstrapFailure("seed suite is empty");
    if (config.seed_count > 0 &&
        seeds.cases.size() != static_cast<std::size_t>(config.seed_count))
        throw BootstrapFailure("expected " + std::to_string(config.seed_count) + " seeds, found " +
                               std::to_string(seeds.cases.size()));

    for (auto& tc : seeds.cases) {
        tc.iteration = 0;
        tc.provenance = Provenance::seed;
        try {
            tc = capture_expected(ctx.c_ref, tc, config.limits, config.scratch_root);
        } catch (const SanityFailure& e) {
            throw BootstrapFailure("seed '" + tc.id + "' fails sanity: " + e.reason);
        }
    }
    ctx.suite = std::move(seeds);
    loopdetail::sync_suite(ctx);
    return ctx;
}

// --- The loop ---------------------------------------------------------------

inline RunArtifacts run_loop(const RunConfig& config, AgentBackend& backend) {
    config.validate();
    fs::path run_dir = config.out_root / config.run_id;
    RunArtifacts art;
    art.run_dir = run_dir;
    art.suite_dir = run_dir / "suite";
    art.translation_dir = run_dir / "workspace" / "translation";

    if (fs::exists(run_dir / "artifacts.json")) {
        // completed run: report it as-is instead of redoing the work
        nlohmann::json j = nlohmann::json::parse(read_file_bytes(run_dir / "artifacts.json"));
        art.stop_reason = "resumed";
        art.final_rate.passed = j["final"]["passed"].get<std::size_t>();
        art.final_rate.total = j["final"]["total"].get<std::size_t>();
        art.final_suite_size = j["final"]["suite_size"].get<std::size_t>();
        art.safety_clean = j["final"]["safety_clean"].get<bool>();
        return art;
    }

    loopdetail::LoopContext ctx = bootstrap(config, backend, run_dir);

    auto initial = loopdetail::translator_round(ctx, "initial translation", 0);
    if (!initial.produced_build) {
        art.stop_reason = "translator_failed";
    } else if (config.strategy == Strategy::naive) {
        art.stop_reason = "naive";
    } else {
        for (int iter = 1; iter <= config.max_iterations; ++iter) {
            IterationReport rep;
            rep.iteration = iter;
            loopdetail::AdversaryResult adv =
                config.strategy == Strategy::coverage
                    ? loopdetail::coverage_round(ctx, iter)
                    : loopdetail::discriminator_round(ctx, iter,
                                                      config.strategy == Strategy::full);
            rep.adversary_attempts = adv.attempts;
            rep.coverage_fraction = adv.coverage_fraction;
            if (!adv.accepted) {
                rep.note = "adversary found nothing; converged";
                rep.suite_size = ctx.suite.cases.size();
                art.iterations.push_back(rep);
                art.stop_reason = "converged";
                break;
            }
            rep.batch_accepted = true;
            rep.batch_tests = static_cast<int>(adv.batch.size());
            ctx.suite = append_tests(std::move(ctx.suite), adv.batch, iter);
            loopdetail::sync_suite(ctx);
            rep.suite_size = ctx.suite.cases.size();

            auto pre_fix = snapshot_tree(ctx.ws / "translation");
            auto fix = loopdetail::translator_round(
                ctx, "repair: the suite gained tests your translation fails", iter);
            rep.passed_after_fix = fix.rate.passed;
            if (config.enforce_safety_each_iter && !loopdetail::safety_round(ctx, iter)) {
                // an unsafe candidate with no safe equivalent is rejected
                // outright; the previous iteration's candidate survives
                fs::remove_all(ctx.ws / "translation");
                fs::create_directories(ctx.ws / "translation");
                materialize_tree(ctx.ws / "translation", pre_fix);
                rep.note = "safety gate failed; unsafe candidate rejected";
            }

            fs::path iter_dir = run_dir / ("iter-" + std::to_string(iter));
            loopdetail::copy_dir(ctx.ws / "translation", iter_dir / "translation");
            write_file_bytes(iter_dir / "report.json", iteration_to_json(rep).dump(2) + "\n");
            art.iterations.push_back(rep);
            if (iter == config.max_iterations) art.stop_reason = "iteration_budget";
        }
    }

    // final accounting against the finished suite
    art.final_rate = loopdetail::rate_translation(ctx);
    art.final_suite_size = ctx.suite.cases.size();
    art.safety_clean = scan_sources(ctx.ws / "translation").safe();
    save_suite(ctx.suite, art.suite_dir);
    art.ledger = std::move(ctx.ledger);

    nlohmann::json iters = nlohmann::json::array();
    for (const auto& r : art.iterations) iters.push_back(iteration_to_json(r));
    nlohmann::json j = {{"strategy", to_string(config.strategy)},
                        {"run_id", config.run_id},
                        {"stop_reason", art.stop_reason},
                        {"iterations", iters},
                        {"final",
                         {{"passed", art.final_rate.passed},
                          {"total", art.final_rate.total},
                          {"suite_size", art.final_suite_size},
                          {"safety_clean", art.safety_clean},
                          {"build_failed", art.final_rate.build_failed}}}};
    write_file_bytes(run_dir / "artifacts.json", j.dump(2) + "\n");
    write_file_bytes(run_dir / "ledger.json", ledger_to_json(art.ledger).dump(2) + "\n");
    return art;
}

}  // namespace actor
