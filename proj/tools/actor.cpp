// SPDX-License-Identifier: Apache-2.0
//
// actor — adversarial C-to-Rust translation toolkit.
//
// Exit codes:
//   0  success / nothing found
//   1  operational error (bad arguments, I/O, build or tool failure)
//   2  semantic finding (mismatch, unsafe code, imperfect translation)
//   3  bootstrap failure (the inputs could not support a run at all)

#include <CLI11.hpp>

#include <iostream>

#include "actor/eval.hpp"
#include "actor/fixtures.hpp"
#include "actor/fuzz.hpp"
#include "actor/http_backend.hpp"
#include "actor/loop.hpp"

using namespace actor;

namespace {

constexpr int kOk = 0;
constexpr int kOperational = 1;
constexpr int kFinding = 2;
constexpr int kBootstrap = 3;

struct CommonFlags {
    bool json = false;
    unsigned jobs = 1;
    std::string scratch;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_flag("--json", flags.json, "emit machine-readable JSON on stdout");
    cmd->add_option("--jobs", flags.jobs, "parallel test executions")->check(CLI::Range(1u, 64u));
    cmd->add_option("--scratch", flags.scratch, "scratch directory for builds and sandboxes");
}

BuildOptions build_opts(const CommonFlags& flags, bool deny_unsafe = true) {
    BuildOptions o;
    if (!flags.scratch.empty()) o.scratch_root = flags.scratch;
    o.deny_unsafe = deny_unsafe;
    return o;
}

TestSuite load_suite_with_expectations(const fs::path& suite_dir, const std::string& c_root,
                                       const ExecLimits& limits, const BuildOptions& opts) {
    TestSuite suite = load_suite(suite_dir);
    bool missing = false;
    for (const auto& tc : suite.cases)
        if (!tc.expected) missing = true;
    if (!missing) return suite;
    if (c_root.empty())
        throw SpecError("suite lacks expected behavior; pass --c to capture it");
    SubjectProgram c_ref = build_subject(c_root, SubjectKind::c_reference, opts);
    for (auto& tc : suite.cases)
        if (!tc.expected) tc = capture_expected(c_ref, tc, limits, opts.scratch_root);
    return suite;
}

// ---- translate -------------------------------------------------------------

int cmd_translate(const RunConfig& config, const std::string& playbooks,
                  const std::string& backend_kind, const CommonFlags& flags) {
    std::unique_ptr<AgentBackend> backend;
    if (backend_kind == "scripted") {
        if (playbooks.empty()) throw SpecError("scripted backend needs --playbooks");
        auto scripted = std::make_unique<ScriptedBackend>();
        load_playbook_dir(*scripted, playbooks);
        backend = std::move(scripted);
    } else if (backend_kind == "http") {
        backend = std::make_unique<HttpBackend>(HttpBackendConfig::from_env());
    } else {
        throw SpecError("unknown backend: " + backend_kind);
    }

    RunArtifacts art = run_loop(config, *backend);
    bool perfect = !art.final_rate.build_failed &&
                   art.final_rate.passed == art.final_rate.total && art.safety_clean;
    if (flags.json) {
        nlohmann::json j = {{"run_dir", art.run_dir.string()},
                            {"stop_reason", art.stop_reason},
                            {"iterations", art.iterations.size()},
                            {"suite_size", art.final_suite_size},
                            {"passed", art.final_rate.passed},
                            {"total", art.final_rate.total},
                            {"safety_clean", art.safety_clean},
                            {"cost_usd", art.ledger.total_cost()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "run " << config.run_id << ": " << art.stop_reason << ", suite "
                  << art.final_suite_size << ", pass " << art.final_rate.passed << "/"
                  << art.final_rate.total << (art.safety_clean ? ", safe" : ", UNSAFE") << "\n";
    }
    return perfect ? kOk : kFinding;
}

// ---- test ------------------------------------------------------------------

int cmd_test(const std::string& rust, const std::string& suite_dir, const std::string& c_root,
             double timeout_s, const CommonFlags& flags) {
    BuildOptions opts = build_opts(flags);
    ExecLimits limits;
    limits.wall_timeout_s = timeout_s;
    TestSuite suite = load_suite_with_expectations(suite_dir, c_root, limits, opts);
    SubjectProgram subject = build_subject(rust, SubjectKind::rust_candidate, opts);
    SuiteReport report = run_suite(subject, suite, limits, flags.jobs, opts.scratch_root);
    PassRate rate = pass_rate(report);

    if (flags.json) {
        nlohmann::json fails = nlohmann::json::array();
        for (std::size_t i = 0; i < report.verdicts.size(); ++i)
            if (report.verdicts[i].status != VerdictStatus::match) {
                nlohmann::json diffs = nlohmann::json::array();
                for (const auto& d : report.verdicts[i].diffs)
                    diffs.push_back({{"channel", to_string(d.channel)},
                                     {"expected", hex_escape(d.expected_excerpt)},
                                     {"actual", hex_escape(d.actual_excerpt)}});
                fails.push_back({{"id", suite.cases[i].id}, {"diffs", diffs}});
            }
        std::cout << nlohmann::json{{"passed", rate.passed},
                                    {"total", rate.total},
                                    {"failures", fails}}
                         .dump(2)
                  << "\n";
    } else {
        for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
            const auto& v = report.verdicts[i];
            if (v.status == VerdictStatus::match) continue;
            std::cout << "FAIL " << suite.cases[i].id << "\n";
            for (const auto& d : v.diffs)
                std::cout << "  " << to_string(d.channel) << ": expected ["
                          << hex_escape(d.expected_excerpt) << "] actual ["
                          << hex_escape(d.actual_excerpt) << "]\n";
        }
        std::cout << rate.passed << "/" << rate.total << " passed\n";
    }
    return rate.passed == rate.total ? kOk : kFinding;
}

// ---- fuzz ------------------------------------------------------------------

int cmd_fuzz(const std::string& c_root, const std::string& rust, const std::string& spec_file,
             std::uint64_t seed, std::uint64_t count, bool shrink, const std::string& out_dir,
             double timeout_s, const CommonFlags& flags) {
    BuildOptions opts = build_opts(flags);
    ExecLimits limits;
    limits.wall_timeout_s = timeout_s;
    InputSpec spec = load_input_spec(spec_file);
    SubjectProgram c_ref = build_subject(c_root, SubjectKind::c_reference, opts);
    SubjectProgram candidate = build_subject(rust, SubjectKind::rust_candidate, opts);

    std::vector<MismatchWitness> witnesses =
        fuzz_campaign(c_ref, candidate, spec, seed, count, limits, opts.scratch_root);
    for (auto& w : witnesses) {
        if (shrink) w = shrink_witness(w, c_ref, candidate, limits, opts.scratch_root);
        if (!out_dir.empty()) write_test_case(w.test, fs::path(out_dir) / w.test.id);
    }

    if (flags.json) {
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : witnesses) {
            nlohmann::json argv = nlohmann::json::array();
            for (const auto& a : w.test.argv) argv.push_back(hex_escape(a));
            ws.push_back({{"id", w.test.id},
                          {"index", w.index},
                          {"argv", argv},
                          {"stdin", hex_escape(w.test.stdin_bytes)}});
        }
        std::cout << nlohmann::json{{"seed", seed},
                                    {"budget", count},
                                    {"witnesses", ws}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "budget " << count << ", witnesses " << witnesses.size() << "\n";
        for (const auto& w : witnesses) {
            std::cout << "  " << w.test.id << " argv=[";
            for (std::size_t i = 0; i < w.test.argv.size(); ++i)
                std::cout << (i ? " " : "") << hex_escape(w.test.argv[i]);
            std::cout << "] stdin=[" << hex_escape(w.test.stdin_bytes) << "]\n";
        }
    }
    return witnesses.empty() ? kOk : kFinding;
}

// ---- coverage --------------------------------------------------------------

int cmd_coverage(const std::string& c_root, const std::string& suite_dir, double timeout_s,
                 const CommonFlags& flags) {
    BuildOptions opts = build_opts(flags);
    ExecLimits limits;
    limits.wall_timeout_s = timeout_s;
    TestSuite suite = load_suite(suite_dir);
    CoverageReport report = measure_coverage(c_root, suite, limits, opts.scratch_root);
    if (flags.json) {
        std::cout << coverage_to_json(report).dump(2) << "\n";
    } else {
        std::size_t lines = 0, hit = 0;
        for (const auto& [file, cov] : report.per_file) {
            lines += cov.executable_lines.size();
            hit += cov.executed_lines.size();
            std::cout << file << ": " << cov.executed_lines.size() << "/"
                      << cov.executable_lines.size() << " lines\n";
        }
        std::cout << "total: " << hit << "/" << lines << " ("
                  << evaldetail::pct(report.percent()) << ")\n";
    }
    return kOk;
}

// ---- safety-check ----------------------------------------------------------

int cmd_safety(const std::string& rust, const CommonFlags& flags) {
    SafetyReport report = scan_sources(rust);
    if (flags.json) {
        nlohmann::json fs_ = nlohmann::json::array();
        for (const auto& f : report.findings)
            fs_.push_back({{"file", f.file},
                           {"line", f.line},
                           {"kind", to_string(f.kind)},
                           {"excerpt", f.excerpt}});
        std::cout << nlohmann::json{{"safe", report.safe()}, {"findings", fs_}}.dump(2) << "\n";
    } else {
        for (const auto& f : report.findings)
            std::cout << f.file << ":" << f.line << ": " << to_string(f.kind) << ": " << f.excerpt
                      << "\n";
        std::cout << (report.safe() ? "safe" : "unsafe") << "\n";
    }
    return report.safe() ? kOk : kFinding;
}

// ---- eval ------------------------------------------------------------------

int cmd_eval(const std::vector<std::string>& rust_dirs, const std::vector<std::string>& suites,
             const std::string& c_root, double timeout_s, const CommonFlags& flags) {
    BuildOptions opts = build_opts(flags);
    ExecLimits limits;
    limits.wall_timeout_s = timeout_s;

    std::vector<NamedSuite> named_suites;
    for (const auto& s : suites)
        named_suites.push_back(
            {fs::path(s).filename().string(),
             load_suite_with_expectations(s, c_root, limits, opts)});
    std::vector<NamedRoot> translations;
    for (const auto& r : rust_dirs)
        translations.push_back({fs::path(r).filename().string(), r});

    if (translations.size() > 1 || named_suites.size() > 1) {
        CrossMatrix m = cross_matrix(translations, named_suites, limits, opts, flags.jobs);
        if (flags.json) {
            std::cout << matrix_to_json(m).dump(2) << "\n";
        } else {
            for (std::size_t i = 0; i < m.cells.size(); ++i) {
                std::cout << m.translation_names[i] << ":";
                for (std::size_t j = 0; j < m.cells[i].size(); ++j)
                    std::cout << " " << m.suite_names[j] << "="
                              << evaldetail::pct(m.cells[i][j].fraction());
                std::cout << "\n";
            }
        }
        for (const auto& row : m.cells)
            for (const auto& cell : row)
                if (cell.passed != cell.total) return kFinding;
        return kOk;
    }

    EvalReport report;
    report.per_program[translations[0].name] =
        evaluate_translation(translations[0].root, named_suites[0].suite, limits, opts,
                             flags.jobs);
    if (flags.json)
        std::cout << report_to_json(report).dump(2) << "\n";
    else
        std::cout << render_report_table(report);
    PassRate micro = report.micro();
    return micro.passed == micro.total ? kOk : kFinding;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial C-to-Rust translation toolkit"};
    app.require_subcommand(1);
    std::string default_assets = ACTOR_DEFAULT_ASSETS;

    CommonFlags flags;

    // translate
    auto* translate = app.add_subcommand("translate", "run the adversarial translation loop");
    std::string config_file, playbooks, backend_kind = "scripted";
    RunConfig config;
    config.assets_dir = default_assets;
    std::string strategy_name;
    translate->add_option("--config", config_file, "JSON config; flags override its values");
    translate->add_option("--strategy", strategy_name, "naive|coverage|nofuzz|full");
    translate->add_option("--c-root", config.c_root, "C source directory");
    translate->add_option("--seeds", config.seed_suite, "seed suite directory");
    translate->add_option("--out", config.out_root, "output root");
    translate->add_option("--run-id", config.run_id, "run identifier");
    translate->add_option("--assets", config.assets_dir, "prompt template directory");
    translate->add_option("--max-iterations", config.max_iterations);
    translate->add_option("--batch-size", config.batch_size);
    translate->add_option("--seed-count", config.seed_count,
                          "expected number of seeds (0 = any)");
    translate->add_option("--playbooks", playbooks, "scripted backend playbook directory");
    translate->add_option("--backend", backend_kind, "scripted|http");
    add_common(translate, flags);

    // test
    auto* test = app.add_subcommand("test", "run a suite against a Rust candidate");
    std::string rust, suite_dir, c_root;
    double timeout_s = 10.0;
    test->add_option("--rust", rust, "Rust source directory")->required();
    test->add_option("--suite", suite_dir, "test suite directory")->required();
    test->add_option("--c", c_root, "C reference (to capture missing expectations)");
    test->add_option("--timeout", timeout_s, "per-test wall timeout in seconds");
    add_common(test, flags);

    // fuzz
    auto* fuzz = app.add_subcommand("fuzz", "differential fuzzing from an input grammar");
    std::string spec_file, fuzz_out;
    std::uint64_t seed = 0, count = 100;
    bool shrink = false;
    fuzz->add_option("--c", c_root, "C reference directory")->required();
    fuzz->add_option("--rust", rust, "Rust candidate directory")->required();
    fuzz->add_option("--spec", spec_file, "input grammar JSON")->required();
    fuzz->add_option("--seed", seed, "campaign seed");
    fuzz->add_option("--count", count, "inputs to draw");
    fuzz->add_flag("--shrink", shrink, "shrink each witness before reporting");
    fuzz->add_option("--out", fuzz_out, "write witness test cases here");
    fuzz->add_option("--timeout", timeout_s, "per-run wall timeout in seconds");
    add_common(fuzz, flags);

    // coverage
    auto* coverage = app.add_subcommand("coverage", "line coverage of a C program under a suite");
    coverage->add_option("--c", c_root, "C source directory")->required();
    coverage->add_option("--suite", suite_dir, "test suite directory")->required();
    coverage->add_option("--timeout", timeout_s, "per-test wall timeout in seconds");
    add_common(coverage, flags);

    // safety-check
    auto* safety = app.add_subcommand("safety-check", "scan Rust sources for unsafe constructs");
    safety->add_option("--rust", rust, "Rust source directory")->required();
    add_common(safety, flags);

    // eval
    auto* eval = app.add_subcommand("eval", "pass rates and cross-suite comparison");
    std::vector<std::string> rust_dirs, suite_dirs;
    eval->add_option("--rust", rust_dirs, "Rust translation directories")->required();
    eval->add_option("--suite", suite_dirs, "suite directories")->required();
    eval->add_option("--c", c_root, "C reference (to capture missing expectations)");
    eval->add_option("--timeout", timeout_s, "per-test wall timeout in seconds");
    add_common(eval, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*translate) {
            if (!config_file.empty()) {
                RunConfig from_file =
                    config_from_json(nlohmann::json::parse(read_file_bytes(config_file)));
                // flags override file values: reapply whatever was set
                from_file.assets_dir =
                    translate->count("--assets") ? config.assets_dir
                    : from_file.assets_dir.empty() ? fs::path(default_assets)
                                                   : from_file.assets_dir;
                if (translate->count("--c-root")) from_file.c_root = config.c_root;
                if (translate->count("--seeds")) from_file.seed_suite = config.seed_suite;
                if (translate->count("--out")) from_file.out_root = config.out_root;
                if (translate->count("--run-id")) from_file.run_id = config.run_id;
                if (translate->count("--max-iterations"))
                    from_file.max_iterations = config.max_iterations;
                if (translate->count("--batch-size")) from_file.batch_size = config.batch_size;
                if (translate->count("--seed-count")) from_file.seed_count = config.seed_count;
                config = from_file;
            }
            if (!strategy_name.empty()) config.strategy = strategy_from_string(strategy_name);
            if (!flags.scratch.empty()) config.scratch_root = flags.scratch;
            config.jobs = flags.jobs;
            return cmd_translate(config, playbooks, backend_kind, flags);
        }
        if (*test) return cmd_test(rust, suite_dir, c_root, timeout_s, flags);
        if (*fuzz)
            return cmd_fuzz(c_root, rust, spec_file, seed, count, shrink, fuzz_out, timeout_s,
                            flags);
        if (*coverage) return cmd_coverage(c_root, suite_dir, timeout_s, flags);
        if (*safety) return cmd_safety(rust, flags);
        if (*eval) return cmd_eval(rust_dirs, suite_dirs, c_root, timeout_s, flags);
    } catch (const BootstrapFailure& e) {
        std::cerr << "error_code=bootstrap_failure " << e.what() << "\n";
        return kBootstrap;
    } catch (const BuildFailure& e) {
        std::cerr << "error_code=build_failure " << e.what() << "\n";
        return kOperational;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error_code=bad_json " << e.what() << "\n";
        return kOperational;
    } catch (const MalformedTest& e) {
        std::cerr << "error_code=malformed_test " << e.what() << "\n";
        return kOperational;
    } catch (const SpecError& e) {
        std::cerr << "error_code=spec_error " << e.what() << "\n";
        return kOperational;
    } catch (const BackendError& e) {
        std::cerr << "error_code=backend_error " << e.what() << "\n";
        return kOperational;
    } catch (const Error& e) {
        std::cerr << "error_code=operational " << e.what() << "\n";
        return kOperational;
    } catch (const std::exception& e) {
        std::cerr << "error_code=internal " << e.what() << "\n";
        return kOperational;
    }
    return kOperational;
}
