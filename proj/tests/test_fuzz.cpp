// SPDX-License-Identifier: Apache-2.0
#include "actor/fuzz.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace actor;

namespace {

support::TempDir& scratch() {
    static support::TempDir tmp;
    return tmp;
}

BuildOptions opts() {
    BuildOptions o;
    o.scratch_root = scratch().path();
    return o;
}

InputSpec abstool_spec() {
    return load_input_spec(support::fixture("abstool") / "spec.json");
}

}  // namespace

TEST_CASE("generation is deterministic in (spec, seed, n)") {
    InputSpec spec = abstool_spec();
    SECTION("n=0 gives an empty list") {
        REQUIRE(generate_inputs(spec, 1, 0).empty());
    }
    SECTION("identical parameters give identical lists") {
        auto a = generate_inputs(spec, 42, 5);
        auto b = generate_inputs(spec, 42, 5);
        REQUIRE(a == b);
        auto c = generate_inputs(spec, 43, 5);
        REQUIRE(a != c);
    }
    SECTION("per-index regeneration matches the stream") {
        auto all = generate_inputs(spec, 7, 20);
        for (std::size_t i = 0; i < all.size(); ++i)
            REQUIRE(generate_input(spec, 7, i) == all[i]);
    }
    SECTION("degenerate range pins every draw") {
        InputSpec s;
        Gen g;
        g.kind = Gen::Kind::int_range;
        g.lo = g.hi = 0;
        s.argv_grammar = {g};
        for (const auto& tc : generate_inputs(s, 9, 10))
            REQUIRE(tc.argv == std::vector<Bytes>{"0"});
    }
}

TEST_CASE("spec validation rejects broken grammars") {
    SECTION("dangling file_ref") {
        InputSpec s;
        Gen g;
        g.kind = Gen::Kind::file_ref;
        g.file_name = "missing";
        s.argv_grammar = {g};
        REQUIRE_THROWS_AS(generate_inputs(s, 1, 1), SpecError);
    }
    SECTION("empty int range") {
        InputSpec s;
        Gen g;
        g.kind = Gen::Kind::int_range;
        g.lo = 3;
        g.hi = 1;
        s.argv_grammar = {g};
        REQUIRE_THROWS_AS(generate_inputs(s, 1, 1), SpecError);
    }
    SECTION("choice with no literals") {
        InputSpec s;
        s.argv_grammar = {Gen{}};
        REQUIRE_THROWS_AS(generate_inputs(s, 1, 1), SpecError);
    }
}

TEST_CASE("campaign on an equivalent pair yields no witnesses") {
    auto reference = build_subject(support::fixture("abstool") / "c",
                                   SubjectKind::c_reference, opts());
    auto correct = build_subject(support::fixture("abstool") / "rust_correct",
                                 SubjectKind::rust_candidate, opts());
    ExecLimits limits;
    auto ws = fuzz_campaign(reference, correct, abstool_spec(), 42, 60, limits, scratch().path());
    REQUIRE(ws.empty());
}

TEST_CASE("campaign finds the sign bug and witnesses replay") {
    auto reference = build_subject(support::fixture("abstool") / "c",
                                   SubjectKind::c_reference, opts());
    auto buggy = build_subject(support::fixture("abstool") / "rust_bug_sign",
                               SubjectKind::rust_candidate, opts());
    ExecLimits limits;
    InputSpec spec = abstool_spec();

    // independent oracle: enumerate the whole domain to get the divergence set
    std::vector<int> divergent;
    for (int v = -10; v <= 10; ++v) {
        TestCase tc;
        tc.id = "enum";
        tc.argv = {std::to_string(v)};
        BehaviorRecord c = execute(reference, tc, limits, scratch().path());
        BehaviorRecord r = execute(buggy, tc, limits, scratch().path());
        if (compare(c, r).status == VerdictStatus::mismatch) divergent.push_back(v);
    }
    std::vector<int> negatives;
    for (int v = -10; v < 0; ++v) negatives.push_back(v);
    REQUIRE(divergent == negatives);

    auto ws = fuzz_campaign(reference, buggy, spec, 42, 200, limits, scratch().path());
    REQUIRE(!ws.empty());
    for (const auto& w : ws) {
        REQUIRE(w.verdict.status == VerdictStatus::mismatch);
        REQUIRE(std::stoi(w.test.argv.at(0)) < 0);
        // reproducibility: (seed, index) regenerates the same input
        TestCase regen = generate_input(spec, w.seed, w.index);
        REQUIRE(regen.argv == w.test.argv);
        // and the mismatch replays
        BehaviorRecord actual = execute(buggy, w.test, limits, scratch().path());
        REQUIRE(compare(*w.test.expected, actual).status == VerdictStatus::mismatch);
    }

    SECTION("campaign is deterministic") {
        auto ws2 = fuzz_campaign(reference, buggy, spec, 42, 200, limits, scratch().path());
        REQUIRE(ws.size() == ws2.size());
        for (std::size_t i = 0; i < ws.size(); ++i) {
            REQUIRE(ws[i].test == ws2[i].test);
            REQUIRE(ws[i].index == ws2[i].index);
        }
    }
    SECTION("budget zero yields nothing") {
        REQUIRE(fuzz_campaign(reference, buggy, spec, 42, 0, limits, scratch().path()).empty());
    }
}

TEST_CASE("shrinking removes irrelevant arguments and stops at fixpoints") {
    ExecLimits limits;

    SECTION("irrelevant extra argument is dropped") {
        auto reference = build_subject(support::fixture("abstool") / "c",
                                       SubjectKind::c_reference, opts());
        auto buggy = build_subject(support::fixture("abstool") / "rust_bug_sign",
                                   SubjectKind::rust_candidate, opts());
        MismatchWitness w;
        w.test.id = "w";
        w.test.argv = {"-5", "junk"};
        w.test = capture_expected(reference, w.test, limits, scratch().path());
        w.verdict = compare(*w.test.expected,
                            execute(buggy, w.test, limits, scratch().path()));
        REQUIRE(w.verdict.status == VerdictStatus::mismatch);
        MismatchWitness s = shrink_witness(w, reference, buggy, limits, scratch().path());
        REQUIRE(s.test.argv == std::vector<Bytes>{"-5"});
        REQUIRE(s.verdict.status == VerdictStatus::mismatch);
    }
    SECTION("divergence requiring both arguments keeps both") {
        // pair diverging only when two arguments are present in order
        support::TempDir tmp;
        fs::create_directories(tmp.path() / "c");
        fs::create_directories(tmp.path() / "rs");
        write_file_bytes(tmp.path() / "c/main.c",
                         "#include <stdio.h>\nint main(int argc, char **argv) {\n"
                         "    for (int i = 1; i < argc; i++) fputs(argv[i], stdout);\n"
                         "    return 0;\n}\n");
        write_file_bytes(tmp.path() / "rs/main.rs",
                         "fn main() {\n    let mut args: Vec<String> = "
                         "std::env::args().skip(1).collect();\n    args.reverse();\n"
                         "    for a in args { print!(\"{}\", a); }\n}\n");
        auto reference = build_subject(tmp.path() / "c", SubjectKind::c_reference, opts());
        auto buggy = build_subject(tmp.path() / "rs", SubjectKind::rust_candidate, opts());

        MismatchWitness w;
        w.test.id = "w";
        w.test.argv = {"a", "b"};
        w.test = capture_expected(reference, w.test, limits, scratch().path());
        w.verdict = compare(*w.test.expected,
                            execute(buggy, w.test, limits, scratch().path()));
        REQUIRE(w.verdict.status == VerdictStatus::mismatch);
        MismatchWitness s = shrink_witness(w, reference, buggy, limits, scratch().path());
        REQUIRE(s.test.argv == std::vector<Bytes>{"a", "b"});
    }
    SECTION("already-minimal witness is returned unchanged") {
        auto reference = build_subject(support::fixture("abstool") / "c",
                                       SubjectKind::c_reference, opts());
        auto buggy = build_subject(support::fixture("abstool") / "rust_bug_sign",
                                   SubjectKind::rust_candidate, opts());
        MismatchWitness w;
        w.test.id = "w";
        w.test.argv = {"-7"};
        w.test = capture_expected(reference, w.test, limits, scratch().path());
        w.verdict = compare(*w.test.expected,
                            execute(buggy, w.test, limits, scratch().path()));
        MismatchWitness s = shrink_witness(w, reference, buggy, limits, scratch().path());
        REQUIRE(s.test.argv == w.test.argv);
        REQUIRE(s.test.stdin_bytes == w.test.stdin_bytes);
    }
}
