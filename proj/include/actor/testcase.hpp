// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "actor/bytes.hpp"
#include "actor/error.hpp"

namespace actor {

enum class Provenance { seed, adversarial, coverage, fuzz };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::seed: return "seed";
        case Provenance::adversarial: return "adversarial";
        case Provenance::coverage: return "coverage";
        case Provenance::fuzz: return "fuzz";
    }
    return "seed";
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "seed") return Provenance::seed;
    if (s == "adversarial") return Provenance::adversarial;
    if (s == "coverage") return Provenance::coverage;
    if (s == "fuzz") return Provenance::fuzz;
    throw MalformedTest("unknown provenance: " + s);
}

enum class ChangeKind { created, modified, deleted };

struct FileChange {
    ChangeKind kind = ChangeKind::created;
    Bytes content;  // empty for deleted

    bool operator==(const FileChange&) const = default;
};

using FileDelta = std::map<std::string, FileChange>;

/// Observed external behavior of one execution.
struct BehaviorRecord {
    Bytes stdout_bytes;
    Bytes stderr_bytes;
    int exit_code = 0;  // 0..255; 124 when timed_out
    FileDelta file_delta;
    bool timed_out = false;
    bool output_truncated = false;  // stdout/stderr hit the capture cap

    bool operator==(const BehaviorRecord&) const = default;
};

/// A concrete program input plus the behavior recorded from the C reference.
struct TestCase {
    std::string id;
    std::vector<Bytes> argv;  // excludes program name
    Bytes stdin_bytes;
    std::map<std::string, std::string> env;
    std::map<std::string, Bytes> input_files;
    std::optional<BehaviorRecord> expected;
    Provenance provenance = Provenance::seed;
    int iteration = 0;

    bool operator==(const TestCase&) const = default;

    void validate() const {
        if (!is_safe_id(id)) throw MalformedTest("bad test id: '" + id + "'");
        if (iteration < 0) throw MalformedTest(id + ": negative iteration");
        for (const auto& [p, _] : input_files)
            if (!is_safe_rel_path(p))
                throw MalformedTest(id + ": unsafe input file path: " + p);
        if (expected)
            for (const auto& [p, _] : expected->file_delta)
                if (!is_safe_rel_path(p))
                    throw MalformedTest(id + ": unsafe delta path: " + p);
    }
};

namespace detail {

inline std::vector<Bytes> parse_cmd(const Bytes& content) {
    // one argv element per line; empty file = empty argv
    std::vector<Bytes> argv;
    if (content.empty()) return argv;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t nl = content.find('\n', start);
        if (nl == Bytes::npos) {
            argv.push_back(content.substr(start));
            break;
        }
        argv.push_back(content.substr(start, nl - start));
        start = nl + 1;
    }
    return argv;
}

inline Bytes format_cmd(const std::vector<Bytes>& argv, const std::string& id) {
    Bytes out;
    for (const auto& a : argv) {
        if (a.find('\n') != Bytes::npos)
            throw MalformedTest(id + ": argv element contains a newline, not representable in cmd");
        out += a;
        out += '\n';
    }
    return out;
}

inline int parse_exit_code(Bytes s, const std::string& id) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    if (s.empty() || s.size() > 3 ||
        !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw MalformedTest(id + ": unparseable exit_code");
    int v = std::stoi(s);
    if (v > 255) throw MalformedTest(id + ": exit_code out of range");
    return v;
}

// Delta tree encoding: content files carry created/modified payloads, an
// empty "<path>.deleted" file marks a deletion. created vs modified is
// recovered from input_files membership.
inline constexpr const char* kDeletedSuffix = ".deleted";

}  // namespace detail

inline TestCase parse_test_case(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw MalformedTest("no such test directory: " + dir.string());
    TestCase tc;
    tc.id = dir.filename().string();
    if (!is_safe_id(tc.id)) throw MalformedTest("bad test id: '" + tc.id + "'");

    if (!fs::exists(dir / "cmd")) throw MalformedTest(tc.id + ": missing cmd");
    tc.argv = detail::parse_cmd(read_file_bytes(dir / "cmd"));

    if (fs::exists(dir / "stdin")) tc.stdin_bytes = read_file_bytes(dir / "stdin");

    if (fs::exists(dir / "env")) {
        for (const auto& line : detail::parse_cmd(read_file_bytes(dir / "env"))) {
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == Bytes::npos || eq == 0)
                throw MalformedTest(tc.id + ": bad env line: " + line);
            tc.env[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }

    if (fs::is_directory(dir / "files")) {
        // symlinks could point outside the tree; reject anything irregular
        for (const auto& e : fs::recursive_directory_iterator(
                 dir / "files", fs::directory_options::none)) {
            if (e.is_directory()) continue;
            if (!e.is_regular_file() || e.is_symlink())
                throw MalformedTest(tc.id + ": non-regular file under files/");
            std::string rel = fs::relative(e.path(), dir / "files").generic_string();
            if (!is_safe_rel_path(rel))
                throw MalformedTest(tc.id + ": unsafe path under files/: " + rel);
            tc.input_files[rel] = read_file_bytes(e.path());
        }
    }

    if (fs::is_directory(dir / "expected")) {
        BehaviorRecord rec;
        if (fs::exists(dir / "expected/stdout"))
            rec.stdout_bytes = read_file_bytes(dir / "expected/stdout");
        if (fs::exists(dir / "expected/stderr"))
            rec.stderr_bytes = read_file_bytes(dir / "expected/stderr");
        if (fs::exists(dir / "expected/exit_code"))
            rec.exit_code = detail::parse_exit_code(read_file_bytes(dir / "expected/exit_code"), tc.id);
        rec.timed_out = fs::exists(dir / "expected/timed_out");
        rec.output_truncated = fs::exists(dir / "expected/truncated");
        if (rec.timed_out && rec.exit_code != kTimeoutExitCode)
            throw MalformedTest(tc.id + ": timed_out without the 124 sentinel");
        if (fs::is_directory(dir / "expected/files")) {
            for (const auto& e : fs::recursive_directory_iterator(dir / "expected/files")) {
                if (!e.is_regular_file()) continue;
                std::string rel = fs::relative(e.path(), dir / "expected/files").generic_string();
                std::string suffix = detail::kDeletedSuffix;
                if (rel.size() > suffix.size() &&
                    rel.compare(rel.size() - suffix.size(), suffix.size(), suffix) == 0) {
                    std::string target = rel.substr(0, rel.size() - suffix.size());
                    if (!is_safe_rel_path(target))
                        throw MalformedTest(tc.id + ": unsafe delta path: " + target);
                    rec.file_delta[target] = FileChange{ChangeKind::deleted, {}};
                } else {
                    if (!is_safe_rel_path(rel))
                        throw MalformedTest(tc.id + ": unsafe delta path: " + rel);
                    ChangeKind kind = tc.input_files.count(rel) ? ChangeKind::modified
                                                                : ChangeKind::created;
                    rec.file_delta[rel] = FileChange{kind, read_file_bytes(e.path())};
                }
            }
        }
        tc.expected = std::move(rec);
    }

    if (fs::exists(dir / "meta.json")) {
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(read_file_bytes(dir / "meta.json"));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTest(tc.id + ": bad meta.json: " + e.what());
        }
        if (meta.contains("provenance"))
            tc.provenance = provenance_from_string(meta["provenance"].get<std::string>());
        if (meta.contains("iteration")) tc.iteration = meta["iteration"].get<int>();
    }

    tc.validate();
    return tc;
}

inline void write_test_case(const TestCase& tc, const fs::path& dir) {
    tc.validate();
    if (fs::exists(dir) && !fs::is_empty(dir))
        throw IoFailure("test directory not empty: " + dir.string());
    fs::create_directories(dir);

    write_file_bytes(dir / "cmd", detail::format_cmd(tc.argv, tc.id));
    if (!tc.stdin_bytes.empty()) write_file_bytes(dir / "stdin", tc.stdin_bytes);
    if (!tc.env.empty()) {
        Bytes env_text;
        for (const auto& [k, v] : tc.env) env_text += k + "=" + v + "\n";
        write_file_bytes(dir / "env", env_text);
    }
    for (const auto& [rel, content] : tc.input_files)
        write_file_bytes(dir / "files" / rel, content);

    if (tc.expected) {
        const auto& rec = *tc.expected;
        write_file_bytes(dir / "expected/stdout", rec.stdout_bytes);
        write_file_bytes(dir / "expected/stderr", rec.stderr_bytes);
        write_file_bytes(dir / "expected/exit_code", std::to_string(rec.exit_code) + "\n");
        if (rec.timed_out) write_file_bytes(dir / "expected/timed_out", "");
        if (rec.output_truncated) write_file_bytes(dir / "expected/truncated", "");
        for (const auto& [rel, change] : rec.file_delta) {
            if (change.kind == ChangeKind::deleted)
                write_file_bytes(dir / "expected/files" / (rel + detail::kDeletedSuffix), "");
            else
                write_file_bytes(dir / "expected/files" / rel, change.content);
        }
    }

    nlohmann::json meta = {{"provenance", to_string(tc.provenance)},
                           {"iteration", tc.iteration}};
    write_file_bytes(dir / "meta.json", meta.dump(2) + "\n");
}

/// Append-only ordered collection of test cases.
struct TestSuite {
    std::vector<TestCase> cases;
    std::vector<std::pair<int, std::string>> history;  // (iteration, id)

    bool has_id(const std::string& id) const {
        return std::any_of(cases.begin(), cases.end(),
                           [&](const TestCase& c) { return c.id == id; });
    }
    std::size_t size() const { return cases.size(); }
};

inline TestSuite append_tests(TestSuite suite, const std::vector<TestCase>& batch,
                              int iteration) {
    for (const auto& tc : batch)
        if (suite.has_id(tc.id)) throw DuplicateId("duplicate test id: " + tc.id);
    for (const auto& tc : batch) {
        if (std::any_of(batch.begin(), batch.end(), [&](const TestCase& o) {
                return &o != &tc && o.id == tc.id;
            }))
            throw DuplicateId("duplicate test id within batch: " + tc.id);
        suite.cases.push_back(tc);
        suite.history.emplace_back(iteration, tc.id);
    }
    return suite;
}

/// Loads a directory of test-case subdirectories, lexicographic id order.
inline TestSuite load_suite(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoFailure("no such suite directory: " + dir.string());
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) subdirs.push_back(e.path());
    std::sort(subdirs.begin(), subdirs.end());

    TestSuite suite;
    // order.json, when present, pins append order and history
    if (fs::exists(dir / "order.json")) {
        auto order = nlohmann::json::parse(read_file_bytes(dir / "order.json"));
        for (const auto& entry : order["history"]) {
            std::string id = entry[1].get<std::string>();
            suite.cases.push_back(parse_test_case(dir / id));
            suite.history.emplace_back(entry[0].get<int>(), id);
        }
        return suite;
    }
    for (const auto& sub : subdirs) {
        TestCase tc = parse_test_case(sub);
        if (suite.has_id(tc.id)) throw DuplicateId("duplicate test id: " + tc.id);
        suite.history.emplace_back(tc.iteration, tc.id);
        suite.cases.push_back(std::move(tc));
    }
    return suite;
}

inline void save_suite(const TestSuite& suite, const fs::path& dir) {
    fs::create_directories(dir);
    nlohmann::json history = nlohmann::json::array();
    for (const auto& [iter, id] : suite.history) history.push_back({iter, id});
    for (const auto& tc : suite.cases) {
        fs::path sub = dir / tc.id;
        if (fs::exists(sub)) fs::remove_all(sub);
        write_test_case(tc, sub);
    }
    write_file_bytes(dir / "order.json", nlohmann::json{{"history", history}}.dump(2) + "\n");
}

}  // namespace actor
