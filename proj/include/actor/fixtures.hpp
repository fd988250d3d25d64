// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "actor/fuzz.hpp"
#include "actor/harness.hpp"

namespace actor {

// A fixture bundles a C reference, a correct Rust translation, one or more
// buggy Rust variants, a seed suite, and a predicate telling exactly which
// inputs each bug must corrupt. verify_fixture checks the whole package
// against the differential harness, so tests higher up the stack can trust
// the corpus.

// --- Input predicates -----------------------------------------------------

struct InputPredicate;
using PredicatePtr = std::shared_ptr<InputPredicate>;

struct InputPredicate {
    enum class Kind {
        p_not,
        p_and,
        p_or,
        first_arg_eq,
        first_arg_ne,
        first_arg_int_lt,
        argc_ge,
        stdin_empty,
        stdin_has_lower,
    };
    Kind kind = Kind::stdin_empty;
    std::string value;
    long long int_value = 0;
    std::vector<PredicatePtr> terms;
};

inline bool eval_predicate(const InputPredicate& p, const TestCase& tc) {
    using K = InputPredicate::Kind;
    switch (p.kind) {
        case K::p_not:
            return !eval_predicate(*p.terms.at(0), tc);
        case K::p_and:
            for (const auto& t : p.terms)
                if (!eval_predicate(*t, tc)) return false;
            return true;
        case K::p_or:
            for (const auto& t : p.terms)
                if (eval_predicate(*t, tc)) return true;
            return false;
        case K::first_arg_eq:
            return !tc.argv.empty() && tc.argv[0] == p.value;
        case K::first_arg_ne:
            return tc.argv.empty() || tc.argv[0] != p.value;
        case K::first_arg_int_lt: {
            if (tc.argv.empty()) return false;
            try {
                std::size_t pos = 0;
                long long v = std::stoll(tc.argv[0], &pos);
                return pos == tc.argv[0].size() && v < p.int_value;
            } catch (const std::exception&) {
                return false;
            }
        }
        case K::argc_ge:
            return tc.argv.size() >= static_cast<std::size_t>(p.int_value);
        case K::stdin_empty:
            return tc.stdin_bytes.empty();
        case K::stdin_has_lower:
            for (unsigned char c : tc.stdin_bytes)
                if (c >= 'a' && c <= 'z') return true;
            return false;
    }
    return false;
}

inline PredicatePtr predicate_from_json(const nlohmann::json& j) {
    auto p = std::make_shared<InputPredicate>();
    std::string type = j.at("type").get<std::string>();
    using K = InputPredicate::Kind;
    static const std::map<std::string, K> kinds = {
        {"not", K::p_not},
        {"and", K::p_and},
        {"or", K::p_or},
        {"first_arg_eq", K::first_arg_eq},
        {"first_arg_ne", K::first_arg_ne},
        {"first_arg_int_lt", K::first_arg_int_lt},
        {"argc_ge", K::argc_ge},
        {"stdin_empty", K::stdin_empty},
        {"stdin_has_lower", K::stdin_has_lower},
    };
    auto it = kinds.find(type);
    if (it == kinds.end()) throw SpecError("unknown predicate type: " + type);
    p->kind = it->second;
    if (p->kind == K::first_arg_eq || p->kind == K::first_arg_ne)
        p->value = j.at("value").get<std::string>();
    if (p->kind == K::first_arg_int_lt || p->kind == K::argc_ge)
        p->int_value = j.at("value").get<long long>();
    if (p->kind == K::p_not || p->kind == K::p_and || p->kind == K::p_or) {
        for (const auto& t : j.at("terms")) p->terms.push_back(predicate_from_json(t));
        if (p->kind == K::p_not && p->terms.size() != 1)
            throw SpecError("'not' takes exactly one term");
        if (p->terms.empty()) throw SpecError("'" + type + "' needs at least one term");
    }
    return p;
}

// --- Input domains --------------------------------------------------------
//
// A domain enumerates a finite, exhaustive set of inputs; predicates are
// checked against every one of them. Kinds:
//   argv_upto:     all argv sequences of length 0..max_len over an alphabet
//   int_arg_range: argv = [i] for every integer in [lo, hi]
//   product:       cross product of explicit argv_choices x stdin_choices

inline std::vector<TestCase> enumerate_domain(const nlohmann::json& j) {
    std::vector<TestCase> out;
    auto push = [&](std::vector<std::string> argv, Bytes stdin_bytes) {
        TestCase tc;
        tc.id = "dom-" + std::to_string(out.size());
        tc.argv = std::move(argv);
        tc.stdin_bytes = std::move(stdin_bytes);
        out.push_back(std::move(tc));
    };
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "argv_upto") {
        std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
        int max_len = j.at("max_len").get<int>();
        if (alphabet.empty() || max_len < 0) throw SpecError("bad argv_upto domain");
        std::vector<std::vector<std::string>> frontier = {{}};
        push({}, "");
        for (int len = 1; len <= max_len; ++len) {
            std::vector<std::vector<std::string>> next;
            for (const auto& prefix : frontier)
                for (const auto& word : alphabet) {
                    auto argv = prefix;
                    argv.push_back(word);
                    push(argv, "");
                    next.push_back(std::move(argv));
                }
            frontier = std::move(next);
        }
    } else if (kind == "int_arg_range") {
        long long lo = j.at("lo").get<long long>();
        long long hi = j.at("hi").get<long long>();
        if (lo > hi) throw SpecError("bad int_arg_range domain");
        for (long long v = lo; v <= hi; ++v) push({std::to_string(v)}, "");
    } else if (kind == "product") {
        auto argvs = j.at("argv_choices").get<std::vector<std::vector<std::string>>>();
        std::vector<Bytes> stdins = {""};
        if (j.contains("stdin_choices")) stdins = j["stdin_choices"].get<std::vector<Bytes>>();
        for (const auto& argv : argvs)
            for (const auto& sb : stdins) push(argv, sb);
    } else {
        throw SpecError("unknown domain kind: " + kind);
    }
    return out;
}

// --- Manifests ------------------------------------------------------------

struct FixtureBug {
    std::string bug_id;
    fs::path rust_root;  // absolute
    std::string description;
    PredicatePtr predicate;
};

struct FixtureManifest {
    std::string name;
    fs::path dir;
    fs::path c_root;
    fs::path rust_correct;
    fs::path seed_suite;
    std::vector<FixtureBug> bugs;
    nlohmann::json domain;
    ExecLimits limits;
    std::optional<fs::path> input_spec;  // fuzz grammar, when the fixture ships one
};

inline FixtureManifest load_manifest(const fs::path& fixture_dir) {
    fs::path file = fixture_dir / "manifest.json";
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file_bytes(file));
    } catch (const std::exception& e) {
        throw SpecError("bad manifest " + file.string() + ": " + e.what());
    }
    FixtureManifest m;
    m.dir = fixture_dir;
    m.name = j.at("name").get<std::string>();
    m.c_root = fixture_dir / j.at("c_root").get<std::string>();
    m.rust_correct = fixture_dir / j.at("rust_correct").get<std::string>();
    m.seed_suite = fixture_dir / j.at("seed_suite").get<std::string>();
    if (j.contains("limits"))
        m.limits.wall_timeout_s = j["limits"].value("wall_timeout_s", m.limits.wall_timeout_s);
    if (j.contains("input_spec"))
        m.input_spec = fixture_dir / j["input_spec"].get<std::string>();
    m.domain = j.at("domain");
    for (const auto& b : j.at("bugs")) {
        FixtureBug bug;
        bug.bug_id = b.at("bug_id").get<std::string>();
        bug.rust_root = fixture_dir / b.at("rust_root").get<std::string>();
        bug.description = b.value("description", "");
        bug.predicate = predicate_from_json(b.at("predicate"));
        m.bugs.push_back(std::move(bug));
    }
    for (const fs::path* p : {&m.c_root, &m.rust_correct, &m.seed_suite})
        if (!fs::is_directory(*p)) throw SpecError("manifest points at missing dir: " + p->string());
    return m;
}

inline std::vector<FixtureManifest> list_fixtures(const fs::path& corpus_dir) {
    std::vector<fs::path> dirs;
    for (const auto& d : fs::directory_iterator(corpus_dir))
        if (d.is_directory() && fs::exists(d.path() / "manifest.json")) dirs.push_back(d.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<FixtureManifest> out;
    for (const auto& d : dirs) out.push_back(load_manifest(d));
    return out;
}

// --- Verification ---------------------------------------------------------

struct FixtureCheck {
    std::string name;
    std::size_t domain_size = 0;
    std::size_t seed_count = 0;
    std::map<std::string, std::size_t> mismatches_per_bug;
};

/// Exhaustively checks a fixture against its own contract:
///  - every domain input passes the C-side sanity check,
///  - rust_correct matches the C reference on every domain input and seed,
///  - each bug variant mismatches exactly on the inputs its predicate marks.
/// Throws FixtureBroken naming the offending input otherwise.
inline FixtureCheck verify_fixture(const FixtureManifest& m,
                                   const fs::path& scratch = detail::default_scratch_root()) {
    FixtureCheck check;
    check.name = m.name;
    BuildOptions opts;
    opts.scratch_root = scratch;
    SubjectProgram c_ref = build_subject(m.c_root, SubjectKind::c_reference, opts);
    SubjectProgram correct = build_subject(m.rust_correct, SubjectKind::rust_candidate, opts);

    std::vector<TestCase> inputs = enumerate_domain(m.domain);
    check.domain_size = inputs.size();
    TestSuite seeds = load_suite(m.seed_suite);
    check.seed_count = seeds.cases.size();
    for (const auto& tc : seeds.cases) inputs.push_back(tc);

    std::vector<TestCase> cooked;
    for (auto& tc : inputs) {
        try {
            tc = capture_expected(c_ref, tc, m.limits);
        } catch (const SanityFailure& e) {
            throw FixtureBroken(m.name + ": C reference fails sanity on '" + tc.id +
                                "': " + e.what());
        }
        cooked.push_back(tc);
    }

    auto check_variant = [&](const SubjectProgram& subject, const std::string& label,
                             const PredicatePtr& predicate) {
        std::size_t mismatching = 0;
        for (const auto& tc : cooked) {
            BehaviorRecord actual = execute(subject, tc, m.limits);
            Verdict v = compare(*tc.expected, actual);
            bool mismatch = v.status != VerdictStatus::match;
            bool expected_mismatch = predicate && eval_predicate(*predicate, tc);
            if (mismatch != expected_mismatch)
                throw FixtureBroken(m.name + "/" + label + ": input '" + tc.id + "' " +
                                    (mismatch ? "mismatches unexpectedly" : "fails to mismatch"));
            if (mismatch) ++mismatching;
        }
        return mismatching;
    };

    check_variant(correct, "rust_correct", nullptr);
    for (const auto& bug : m.bugs) {
        SubjectProgram buggy = build_subject(bug.rust_root, SubjectKind::rust_candidate, opts);
        std::size_t n = check_variant(buggy, bug.bug_id, bug.predicate);
        if (n == 0)
            throw FixtureBroken(m.name + "/" + bug.bug_id +
                                ": predicate selects no input in the domain");
        check.mismatches_per_bug[bug.bug_id] = n;
    }
    return check;
}

}  // namespace actor
