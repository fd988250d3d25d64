// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "actor/process.hpp"
#include "actor/safety.hpp"
#include "actor/testcase.hpp"

namespace actor {

enum class SubjectKind { c_reference, rust_candidate };

struct SubjectProgram {
    SubjectKind kind = SubjectKind::c_reference;
    fs::path source_root;
    fs::path binary;
    std::string build_log;
};

struct ExecLimits {
    double wall_timeout_s = 10.0;
    std::size_t max_output_bytes = 8u << 20;
    std::size_t max_file_delta_bytes = 8u << 20;
};

enum class VerdictStatus { match, mismatch, invalid_test };

enum class DiffChannel { stdout_, stderr_, exit_code, file_delta, timeout };

inline const char* to_string(DiffChannel c) {
    switch (c) {
        case DiffChannel::stdout_: return "stdout";
        case DiffChannel::stderr_: return "stderr";
        case DiffChannel::exit_code: return "exit_code";
        case DiffChannel::file_delta: return "file_delta";
        case DiffChannel::timeout: return "timeout";
    }
    return "?";
}

struct DiffItem {
    DiffChannel channel;
    Bytes expected_excerpt;
    Bytes actual_excerpt;
};

struct Verdict {
    VerdictStatus status = VerdictStatus::match;
    std::vector<DiffItem> diffs;
};

struct SuiteReport {
    std::vector<Verdict> verdicts;  // order matches suite order
    std::size_t pass_count = 0;
    std::size_t total = 0;
};

namespace detail {

inline fs::path make_temp_dir(const fs::path& root, const std::string& prefix) {
    fs::create_directories(root);
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        fs::path p = root / (prefix + std::to_string(rd() % 1000000) + "-" +
                             std::to_string(counter.fetch_add(1)));
        std::error_code ec;
        if (fs::create_directory(p, ec)) return p;
    }
    throw SandboxFailure("cannot create temp directory under " + root.string());
}

inline fs::path default_scratch_root() {
    return fs::temp_directory_path() / "actor-scratch";
}

inline std::map<std::string, std::string> tool_env() {
    std::map<std::string, std::string> env;
    for (const char* k : {"PATH", "HOME", "RUSTUP_HOME", "CARGO_HOME"})
        if (const char* v = ::getenv(k)) env[k] = v;
    if (!env.count("PATH")) env["PATH"] = "/usr/bin:/bin";
    env["LC_ALL"] = "C";
    return env;
}

inline fs::path which(const std::string& name) {
    const char* path = ::getenv("PATH");
    std::string paths = path ? path : "/usr/bin:/bin";
    std::stringstream ss(paths);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        fs::path cand = fs::path(dir) / name;
        std::error_code ec;
        if (fs::exists(cand, ec)) return cand;
    }
    throw SandboxFailure("cannot find tool on PATH: " + name);
}

}  // namespace detail

struct BuildOptions {
    fs::path scratch_root = detail::default_scratch_root();
    bool deny_unsafe = true;  // rust_candidate only
    bool coverage = false;    // c_reference only; gcc --coverage
};

// Single-binary layout: C roots hold *.c, Rust roots hold main.rs (or
// src/main.rs). The binary lands in a fresh scratch directory.
inline SubjectProgram build_subject(const fs::path& source_root, SubjectKind kind,
                                    const BuildOptions& opts = {}) {
    if (!fs::is_directory(source_root))
        throw BuildFailure("source root missing: " + source_root.string());
    fs::path build_dir = detail::make_temp_dir(opts.scratch_root, "build-");
    fs::path binary = build_dir / "subject";

    ProcessRequest req;
    req.env = detail::tool_env();
    req.cwd = build_dir;
    req.wall_timeout_s = 120.0;

    if (kind == SubjectKind::c_reference) {
        std::vector<fs::path> sources;
        for (const auto& e : fs::directory_iterator(source_root))
            if (e.path().extension() == ".c") sources.push_back(fs::absolute(e.path()));
        std::sort(sources.begin(), sources.end());
        if (sources.empty()) throw BuildFailure("no .c sources in " + source_root.string());
        req.program = detail::which("cc");
        req.argv = {"-std=c11", "-O0", "-o", binary.string()};
        if (opts.coverage) req.argv.push_back("--coverage");
        for (const auto& s : sources) req.argv.push_back(s.string());
    } else {
        fs::path main_rs = source_root / "main.rs";
        if (!fs::exists(main_rs)) main_rs = source_root / "src" / "main.rs";
        if (!fs::exists(main_rs))
            throw BuildFailure("no main.rs in " + source_root.string());
        req.program = detail::which("rustc");
        req.argv = {"--edition", "2021", "-o", binary.string(),
                    fs::absolute(main_rs).string()};
        if (opts.deny_unsafe) req.argv = enforce_at_build(std::move(req.argv));
    }

    ProcessResult res = run_process(req);
    std::string log = res.stdout_bytes + res.stderr_bytes;
    if (res.exit_code != 0 || !fs::exists(binary)) throw BuildFailure(log);
    fs::permissions(binary, fs::perms::owner_exec | fs::perms::owner_read | fs::perms::owner_write,
                    fs::perm_options::add);
    return SubjectProgram{kind, source_root, binary, log};
}

struct ExecDetail {
    BehaviorRecord record;
    bool signaled = false;
    int term_signal = 0;
};

inline ExecDetail execute_detail(const SubjectProgram& subject, const TestCase& tc,
                                 const ExecLimits& limits,
                                 const fs::path& scratch_root = detail::default_scratch_root()) {
    fs::path sandbox = detail::make_temp_dir(scratch_root, "sbx-");
    struct Cleanup {
        fs::path p;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } cleanup{sandbox};

    materialize_tree(sandbox, tc.input_files);

    ProcessRequest req;
    req.program = fs::absolute(subject.binary);
    req.argv = tc.argv;
    req.stdin_bytes = tc.stdin_bytes;
    req.cwd = sandbox;
    req.wall_timeout_s = limits.wall_timeout_s;
    req.max_output_bytes = limits.max_output_bytes;
    // pinned base environment; reproducibility over fidelity
    req.env = {{"PATH", "/usr/bin:/bin"},
               {"HOME", sandbox.string()},
               {"LC_ALL", "C"},
               {"TERM", "dumb"}};
    for (const auto& [k, v] : tc.env) req.env[k] = v;

    ProcessResult res = run_process(req);

    ExecDetail out;
    out.signaled = res.signaled;
    out.term_signal = res.term_signal;
    out.record.stdout_bytes = std::move(res.stdout_bytes);
    out.record.stderr_bytes = std::move(res.stderr_bytes);
    out.record.exit_code = res.exit_code;
    out.record.timed_out = res.timed_out;
    out.record.output_truncated = res.output_truncated;

    // delta = post-state minus the materialized inputs
    std::size_t delta_bytes = 0;
    auto post = snapshot_tree(sandbox);
    for (const auto& [rel, content] : post) {
        auto it = tc.input_files.find(rel);
        if (it == tc.input_files.end()) {
            out.record.file_delta[rel] = FileChange{ChangeKind::created, content};
            delta_bytes += content.size();
        } else if (it->second != content) {
            out.record.file_delta[rel] = FileChange{ChangeKind::modified, content};
            delta_bytes += content.size();
        }
    }
    for (const auto& [rel, _] : tc.input_files)
        if (!post.count(rel))
            out.record.file_delta[rel] = FileChange{ChangeKind::deleted, {}};
    if (delta_bytes > limits.max_file_delta_bytes)
        out.record.output_truncated = true;
    return out;
}

inline BehaviorRecord execute(const SubjectProgram& subject, const TestCase& tc,
                              const ExecLimits& limits,
                              const fs::path& scratch_root = detail::default_scratch_root()) {
    return execute_detail(subject, tc, limits, scratch_root).record;
}

struct SanityResult {
    bool ok = true;
    std::string reason;  // "timeout" | "exit_code" | "crash" | "nondeterministic"
    std::optional<BehaviorRecord> record;  // first run, when ok
};

// Validity gate for reference runs: terminates, exit < 126, no signal, and a
// second run reproduces the behavior byte-exactly.
inline SanityResult sanity_check(const SubjectProgram& reference, const TestCase& tc,
                                 const ExecLimits& limits,
                                 const fs::path& scratch_root = detail::default_scratch_root()) {
    ExecDetail first = execute_detail(reference, tc, limits, scratch_root);
    if (first.record.timed_out) return {false, "timeout", {}};
    if (first.signaled) return {false, "crash", {}};
    if (first.record.exit_code >= 126) return {false, "exit_code", {}};
    ExecDetail second = execute_detail(reference, tc, limits, scratch_root);
    if (!(first.record == second.record)) return {false, "nondeterministic", {}};
    return {true, "", std::move(first.record)};
}

struct SanityFailure : Error {
    explicit SanityFailure(const std::string& reason_)
        : Error("sanity check failed: " + reason_), reason(reason_) {}
    std::string reason;
};

inline TestCase capture_expected(const SubjectProgram& reference, const TestCase& tc,
                                 const ExecLimits& limits,
                                 const fs::path& scratch_root = detail::default_scratch_root()) {
    if (reference.kind != SubjectKind::c_reference)
        throw SandboxFailure("capture_expected needs the C reference");
    SanityResult s = sanity_check(reference, tc, limits, scratch_root);
    if (!s.ok) throw SanityFailure(s.reason);
    TestCase out = tc;
    out.expected = std::move(*s.record);
    return out;
}

namespace detail {

inline constexpr std::size_t kExcerptWindow = 256;

inline void diff_bytes(std::vector<DiffItem>& diffs, DiffChannel ch, const Bytes& exp,
                       const Bytes& act) {
    if (exp == act) return;
    std::size_t at = first_divergence(exp, act);
    if (at == Bytes::npos) at = std::min(exp.size(), act.size());
    diffs.push_back({ch, exp.substr(at, kExcerptWindow), act.substr(at, kExcerptWindow)});
}

inline Bytes describe_change(const FileChange& c) {
    switch (c.kind) {
        case ChangeKind::created: return "created:" + c.content.substr(0, kExcerptWindow);
        case ChangeKind::modified: return "modified:" + c.content.substr(0, kExcerptWindow);
        case ChangeKind::deleted: return "deleted";
    }
    return {};
}

}  // namespace detail

/// IsEq* on two captured behaviors: match iff every channel is exactly equal.
inline Verdict compare(const BehaviorRecord& expected, const BehaviorRecord& actual) {
    Verdict v;
    detail::diff_bytes(v.diffs, DiffChannel::stdout_, expected.stdout_bytes, actual.stdout_bytes);
    detail::diff_bytes(v.diffs, DiffChannel::stderr_, expected.stderr_bytes, actual.stderr_bytes);
    if (expected.exit_code != actual.exit_code)
        v.diffs.push_back({DiffChannel::exit_code, std::to_string(expected.exit_code),
                           std::to_string(actual.exit_code)});
    if (expected.timed_out != actual.timed_out)
        v.diffs.push_back({DiffChannel::timeout, expected.timed_out ? "timeout" : "finished",
                           actual.timed_out ? "timeout" : "finished"});
    if (expected.output_truncated != actual.output_truncated)
        v.diffs.push_back({DiffChannel::stdout_,
                           expected.output_truncated ? "truncated" : "complete",
                           actual.output_truncated ? "truncated" : "complete"});
    if (expected.file_delta != actual.file_delta) {
        for (const auto& [path, change] : expected.file_delta) {
            auto it = actual.file_delta.find(path);
            if (it == actual.file_delta.end())
                v.diffs.push_back({DiffChannel::file_delta, path + " " + detail::describe_change(change),
                                   path + " untouched"});
            else if (!(it->second == change))
                v.diffs.push_back({DiffChannel::file_delta, path + " " + detail::describe_change(change),
                                   path + " " + detail::describe_change(it->second)});
        }
        for (const auto& [path, change] : actual.file_delta)
            if (!expected.file_delta.count(path))
                v.diffs.push_back({DiffChannel::file_delta, path + " untouched",
                                   path + " " + detail::describe_change(change)});
    }
    v.status = v.diffs.empty() ? VerdictStatus::match : VerdictStatus::mismatch;
    return v;
}

/// Runs every suite case against a subject; report order matches suite order.
inline SuiteReport run_suite(const SubjectProgram& subject, const TestSuite& suite,
                             const ExecLimits& limits, unsigned jobs = 1,
                             const fs::path& scratch_root = detail::default_scratch_root()) {
    SuiteReport report;
    report.total = suite.cases.size();
    report.verdicts.resize(suite.cases.size());

    auto run_one = [&](std::size_t i) {
        const TestCase& tc = suite.cases[i];
        if (!tc.expected) {
            report.verdicts[i] = Verdict{VerdictStatus::invalid_test, {}};
            return;
        }
        try {
            BehaviorRecord actual = execute(subject, tc, limits, scratch_root);
            report.verdicts[i] = compare(*tc.expected, actual);
        } catch (const SandboxFailure&) {
            report.verdicts[i] = Verdict{VerdictStatus::invalid_test, {}};
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < suite.cases.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= suite.cases.size()) return;
                    run_one(i);
                }
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& v : report.verdicts)
        if (v.status == VerdictStatus::match) ++report.pass_count;
    return report;
}

}  // namespace actor
