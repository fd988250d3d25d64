// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "actor/harness.hpp"

namespace actor {

struct FileCoverage {
    std::set<int> executable_lines;
    std::set<int> executed_lines;

    bool operator==(const FileCoverage&) const = default;
};

struct CoverageReport {
    std::map<std::string, FileCoverage> per_file;

    // 0/0 is defined as fully covered
    double percent() const {
        std::size_t executable = 0, executed = 0;
        for (const auto& [_, f] : per_file) {
            executable += f.executable_lines.size();
            executed += f.executed_lines.size();
        }
        if (executable == 0) return 1.0;
        return static_cast<double>(executed) / static_cast<double>(executable);
    }

    bool operator==(const CoverageReport&) const = default;
};

namespace covdetail {

// gcov text format: "  count:  lineno:source". count is '-' for
// non-executable lines, '#####'/'=====' for executable-but-unexecuted.
inline void parse_gcov_file(const fs::path& gcov_path, const std::string& file_key,
                            FileCoverage& out) {
    std::istringstream in(read_file_bytes(gcov_path));
    std::string line;
    while (std::getline(in, line)) {
        auto c1 = line.find(':');
        if (c1 == std::string::npos) continue;
        auto c2 = line.find(':', c1 + 1);
        if (c2 == std::string::npos) continue;
        std::string count = line.substr(0, c1);
        std::string lineno_s = line.substr(c1 + 1, c2 - c1 - 1);
        auto strip = [](std::string& s) {
            s.erase(0, s.find_first_not_of(' '));
        };
        strip(count);
        strip(lineno_s);
        int lineno = 0;
        try {
            lineno = std::stoi(lineno_s);
        } catch (...) {
            continue;
        }
        if (lineno <= 0 || count.empty()) continue;
        if (count == "-") continue;
        if (count[0] == '#' || count[0] == '=') {
            out.executable_lines.insert(lineno);
        } else if (isdigit(static_cast<unsigned char>(count[0]))) {
            out.executable_lines.insert(lineno);
            if (count != "0") out.executed_lines.insert(lineno);
        }
    }
    (void)file_key;
}

}  // namespace covdetail

/// Builds the reference with coverage instrumentation, runs every suite
/// case, and aggregates gcov's per-line counters. Instrumented runs are
/// never used for verdicts.
inline CoverageReport measure_coverage(
    const fs::path& c_root, const TestSuite& suite, const ExecLimits& limits,
    const fs::path& scratch_root = detail::default_scratch_root()) {
    // compile inside a private build dir so .gcno/.gcda stay contained
    fs::path build_dir = detail::make_temp_dir(scratch_root, "cov-");
    struct Cleanup {
        fs::path p;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } cleanup{build_dir};

    std::vector<std::string> source_names;
    for (const auto& e : fs::directory_iterator(c_root))
        if (e.path().extension() == ".c") {
            fs::copy_file(e.path(), build_dir / e.path().filename());
            source_names.push_back(e.path().filename().string());
        }
    std::sort(source_names.begin(), source_names.end());
    if (source_names.empty()) throw BuildFailure("no .c sources in " + c_root.string());

    ProcessRequest cc;
    cc.program = detail::which("cc");
    cc.argv = {"-std=c11", "-O0", "--coverage", "-o", "subject"};
    for (const auto& s : source_names) cc.argv.push_back(s);
    cc.cwd = build_dir;
    cc.env = detail::tool_env();
    cc.wall_timeout_s = 120.0;
    ProcessResult built = run_process(cc);
    if (built.exit_code != 0) throw BuildFailure(built.stdout_bytes + built.stderr_bytes);

    SubjectProgram instrumented{SubjectKind::c_reference, c_root, build_dir / "subject", ""};
    // counter files are global per build; executions must be serialized
    for (const auto& tc : suite.cases) {
        try {
            execute(instrumented, tc, limits, scratch_root);
        } catch (const SandboxFailure&) {
            // coverage is best-effort per case
        }
    }

    // single-step compile+link names the counters "<binary>-<unit>.gcno"
    ProcessRequest gcov;
    gcov.program = detail::which("gcov");
    for (const auto& e : fs::directory_iterator(build_dir))
        if (e.path().extension() == ".gcno")
            gcov.argv.push_back(e.path().filename().string());
    std::sort(gcov.argv.begin(), gcov.argv.end());
    gcov.cwd = build_dir;
    gcov.env = detail::tool_env();
    gcov.wall_timeout_s = 60.0;
    ProcessResult ran = run_process(gcov);
    if (ran.exit_code != 0)
        throw CoverageToolFailure("gcov failed: " + ran.stdout_bytes + ran.stderr_bytes);

    CoverageReport report;
    for (const auto& s : source_names) {
        fs::path gcov_file = build_dir / (s + ".gcov");
        FileCoverage cov;
        if (fs::exists(gcov_file)) {
            covdetail::parse_gcov_file(gcov_file, s, cov);
        } else {
            throw CoverageToolFailure("missing gcov output for " + s);
        }
        report.per_file[s] = std::move(cov);
    }
    // with zero executions gcov may still report all-zero counters; that is
    // exactly what we want (executable lines known, none executed)
    return report;
}

/// Set-union merge; executable-line sets must agree for shared files.
inline CoverageReport merge(const std::vector<CoverageReport>& reports) {
    CoverageReport out;
    for (const auto& r : reports) {
        for (const auto& [file, cov] : r.per_file) {
            auto it = out.per_file.find(file);
            if (it == out.per_file.end()) {
                out.per_file[file] = cov;
                continue;
            }
            if (it->second.executable_lines != cov.executable_lines)
                throw MismatchedSources("executable lines differ for " + file);
            it->second.executed_lines.insert(cov.executed_lines.begin(),
                                             cov.executed_lines.end());
        }
    }
    return out;
}

inline nlohmann::json coverage_to_json(const CoverageReport& r) {
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [file, cov] : r.per_file) {
        files[file] = {
            {"executable_lines", cov.executable_lines},
            {"executed_lines", cov.executed_lines},
        };
    }
    return {{"per_file", files}, {"percent", r.percent()}};
}

}  // namespace actor
