// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "actor/harness.hpp"

namespace actor {

// --- Pass rates -----------------------------------------------------------

struct PassRate {
    std::size_t passed = 0;
    std::size_t total = 0;
    bool vacuous = false;       // no tests at all; fraction() is 1 by convention
    bool build_failed = false;  // candidate failed to build; every test counts failed

    double fraction() const {
        return total == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(total);
    }
    double percent() const { return 100.0 * fraction(); }
};

inline PassRate pass_rate(const SuiteReport& report) {
    PassRate r;
    r.total = report.total;
    r.vacuous = report.total == 0;
    for (const auto& v : report.verdicts)
        if (v.status == VerdictStatus::match) ++r.passed;
    return r;
}

/// Builds a Rust candidate and runs the suite against it. A candidate that
/// does not compile scores 0/N, never 0/0: an unbuildable translation must
/// not look vacuously perfect.
inline PassRate evaluate_translation(const fs::path& rust_root, const TestSuite& suite,
                                     const ExecLimits& limits, const BuildOptions& opts = {},
                                     unsigned jobs = 1) {
    PassRate r;
    r.total = suite.cases.size();
    r.vacuous = r.total == 0;
    SubjectProgram subject;
    try {
        subject = build_subject(rust_root, SubjectKind::rust_candidate, opts);
    } catch (const BuildFailure&) {
        r.build_failed = true;
        r.vacuous = false;
        return r;
    }
    SuiteReport report = run_suite(subject, suite, limits, jobs, opts.scratch_root);
    r.passed = 0;
    for (const auto& v : report.verdicts)
        if (v.status == VerdictStatus::match) ++r.passed;
    return r;
}

// --- Cross matrix ---------------------------------------------------------
//
// matrix[i][j] = pass rate of translation i on suite j. Suites adversarially
// grown against translation i are expected to score lower when replayed
// against translations that still carry the bugs those suites were built to
// expose.

struct NamedRoot {
    std::string name;
    fs::path root;
};

struct NamedSuite {
    std::string name;
    TestSuite suite;
};

struct CrossMatrix {
    std::vector<std::string> translation_names;
    std::vector<std::string> suite_names;
    std::vector<std::vector<PassRate>> cells;
};

inline CrossMatrix cross_matrix(const std::vector<NamedRoot>& translations,
                                const std::vector<NamedSuite>& suites, const ExecLimits& limits,
                                const BuildOptions& opts = {}, unsigned jobs = 1) {
    CrossMatrix m;
    for (const auto& t : translations) m.translation_names.push_back(t.name);
    for (const auto& s : suites) m.suite_names.push_back(s.name);
    for (const auto& t : translations) {
        std::vector<PassRate> row;
        for (const auto& s : suites)
            row.push_back(evaluate_translation(t.root, s.suite, limits, opts, jobs));
        m.cells.push_back(std::move(row));
    }
    return m;
}

// --- Stability ------------------------------------------------------------

struct StabilityStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
    std::size_t trials = 0;
};

inline StabilityStats stability_stats(const std::vector<double>& trials) {
    if (trials.size() < 2)
        throw InsufficientTrials("stability needs at least 2 trials, got " +
                                 std::to_string(trials.size()));
    StabilityStats s;
    s.trials = trials.size();
    for (double v : trials) s.mean += v;
    s.mean /= static_cast<double>(trials.size());
    double ss = 0.0;
    for (double v : trials) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(trials.size() - 1));
    return s;
}

/// Per-program trial series -> per-program stats plus the across-programs
/// mean of means and mean of stddevs.
struct StabilitySummary {
    std::map<std::string, StabilityStats> per_program;
    double mean_of_means = 0.0;
    double mean_stddev = 0.0;
};

inline StabilitySummary summarize_stability(
    const std::map<std::string, std::vector<double>>& trials_per_program) {
    if (trials_per_program.empty()) throw InsufficientTrials("no programs");
    StabilitySummary out;
    for (const auto& [name, trials] : trials_per_program) {
        StabilityStats s = stability_stats(trials);
        out.mean_of_means += s.mean;
        out.mean_stddev += s.stddev;
        out.per_program.emplace(name, s);
    }
    out.mean_of_means /= static_cast<double>(out.per_program.size());
    out.mean_stddev /= static_cast<double>(out.per_program.size());
    return out;
}

// --- Reports --------------------------------------------------------------

struct EvalReport {
    std::map<std::string, PassRate> per_program;

    // mean of per-program fractions; every program weighs the same
    double macro_fraction() const {
        if (per_program.empty()) return 1.0;
        double acc = 0.0;
        for (const auto& [_, r] : per_program) acc += r.fraction();
        return acc / static_cast<double>(per_program.size());
    }
    // pooled tests; large suites weigh more
    PassRate micro() const {
        PassRate m;
        for (const auto& [_, r] : per_program) {
            m.passed += r.passed;
            m.total += r.total;
        }
        m.vacuous = m.total == 0;
        return m;
    }
};

namespace evaldetail {

inline std::string pct(double fraction) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << 100.0 * fraction << "%";
    return os.str();
}

}  // namespace evaldetail

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json programs = nlohmann::json::object();
    for (const auto& [name, r] : report.per_program)
        programs[name] = {{"passed", r.passed},
                          {"total", r.total},
                          {"fraction", r.fraction()},
                          {"vacuous", r.vacuous},
                          {"build_failed", r.build_failed}};
    PassRate micro = report.micro();
    return {{"programs", programs},
            {"macro_fraction", report.macro_fraction()},
            {"micro", {{"passed", micro.passed}, {"total", micro.total},
                       {"fraction", micro.fraction()}}}};
}

inline std::string render_report_table(const EvalReport& report) {
    std::size_t width = 7;  // fits the "program" header
    for (const auto& [name, _] : report.per_program) width = std::max(width, name.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "program" << std::right
       << std::setw(8) << "passed" << std::setw(7) << "total" << std::setw(9) << "rate"
       << "\n";
    for (const auto& [name, r] : report.per_program) {
        os << std::left << std::setw(static_cast<int>(width)) << name << std::right
           << std::setw(8) << r.passed << std::setw(7) << r.total << std::setw(9)
           << evaldetail::pct(r.fraction());
        if (r.build_failed) os << "  (build failed)";
        if (r.vacuous) os << "  (no tests)";
        os << "\n";
    }
    PassRate micro = report.micro();
    os << std::left << std::setw(static_cast<int>(width)) << "macro" << std::right
       << std::setw(8) << "" << std::setw(7) << "" << std::setw(9)
       << evaldetail::pct(report.macro_fraction()) << "\n";
    os << std::left << std::setw(static_cast<int>(width)) << "micro" << std::right
       << std::setw(8) << micro.passed << std::setw(7) << micro.total << std::setw(9)
       << evaldetail::pct(micro.fraction()) << "\n";
    return os.str();
}

inline nlohmann::json matrix_to_json(const CrossMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.cells.size(); ++i) {
        nlohmann::json row = nlohmann::json::object();
        for (std::size_t j = 0; j < m.cells[i].size(); ++j)
            row[m.suite_names[j]] = {{"passed", m.cells[i][j].passed},
                                     {"total", m.cells[i][j].total},
                                     {"fraction", m.cells[i][j].fraction()}};
        rows.push_back({{"translation", m.translation_names[i]}, {"suites", row}});
    }
    return {{"matrix", rows}};
}

}  // namespace actor
