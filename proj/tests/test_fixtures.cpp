// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "actor/fixtures.hpp"
#include "support.hpp"

using namespace actor;
using support::TempDir;
using support::source_dir;

namespace {

TempDir& scratch() {
    static TempDir tmp;
    return tmp;
}

fs::path corpus() { return source_dir() / "fixtures"; }

TestCase input(std::vector<std::string> argv, Bytes stdin_bytes = "") {
    TestCase tc;
    tc.id = "in";
    tc.argv = std::move(argv);
    tc.stdin_bytes = std::move(stdin_bytes);
    return tc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

TEST_CASE("leaf predicates") {
    auto eq = predicate_from_json({{"type", "first_arg_eq"}, {"value", "-u"}});
    CHECK(eval_predicate(*eq, input({"-u"})));
    CHECK(eval_predicate(*eq, input({"-u", "x"})));
    CHECK_FALSE(eval_predicate(*eq, input({"x", "-u"})));
    CHECK_FALSE(eval_predicate(*eq, input({})));

    auto ne = predicate_from_json({{"type", "first_arg_ne"}, {"value", "-u"}});
    CHECK(eval_predicate(*ne, input({})));
    CHECK(eval_predicate(*ne, input({"x"})));
    CHECK_FALSE(eval_predicate(*ne, input({"-u"})));

    auto lt = predicate_from_json({{"type", "first_arg_int_lt"}, {"value", 0}});
    CHECK(eval_predicate(*lt, input({"-3"})));
    CHECK_FALSE(eval_predicate(*lt, input({"0"})));
    CHECK_FALSE(eval_predicate(*lt, input({"7"})));
    CHECK_FALSE(eval_predicate(*lt, input({"abc"})));
    CHECK_FALSE(eval_predicate(*lt, input({"3x"})));  // trailing junk is not an int
    CHECK_FALSE(eval_predicate(*lt, input({})));

    auto argc = predicate_from_json({{"type", "argc_ge"}, {"value", 2}});
    CHECK(eval_predicate(*argc, input({"a", "b"})));
    CHECK_FALSE(eval_predicate(*argc, input({"a"})));

    auto empty = predicate_from_json({{"type", "stdin_empty"}});
    CHECK(eval_predicate(*empty, input({}, "")));
    CHECK_FALSE(eval_predicate(*empty, input({}, "x")));

    auto lower = predicate_from_json({{"type", "stdin_has_lower"}});
    CHECK(eval_predicate(*lower, input({}, "Abc")));
    CHECK_FALSE(eval_predicate(*lower, input({}, "ABC1\n")));
    CHECK_FALSE(eval_predicate(*lower, input({}, "")));
}

TEST_CASE("composite predicates") {
    nlohmann::json leaf_a = {{"type", "first_arg_eq"}, {"value", "a"}};
    nlohmann::json leaf_empty = {{"type", "stdin_empty"}};

    auto p_not = predicate_from_json({{"type", "not"}, {"terms", {leaf_a}}});
    CHECK(eval_predicate(*p_not, input({"b"})));
    CHECK_FALSE(eval_predicate(*p_not, input({"a"})));

    auto p_and = predicate_from_json({{"type", "and"}, {"terms", {leaf_a, leaf_empty}}});
    CHECK(eval_predicate(*p_and, input({"a"}, "")));
    CHECK_FALSE(eval_predicate(*p_and, input({"a"}, "x")));
    CHECK_FALSE(eval_predicate(*p_and, input({"b"}, "")));

    auto p_or = predicate_from_json({{"type", "or"}, {"terms", {leaf_a, leaf_empty}}});
    CHECK(eval_predicate(*p_or, input({"a"}, "x")));
    CHECK(eval_predicate(*p_or, input({"b"}, "")));
    CHECK_FALSE(eval_predicate(*p_or, input({"b"}, "x")));
}

TEST_CASE("predicate parse errors") {
    CHECK_THROWS_AS(predicate_from_json({{"type", "xor"}}), SpecError);
    CHECK_THROWS_AS(predicate_from_json({{"type", "not"}, {"terms", nlohmann::json::array()}}),
                    SpecError);
    nlohmann::json two = {{"type", "stdin_empty"}};
    CHECK_THROWS_AS(predicate_from_json({{"type", "not"}, {"terms", {two, two}}}), SpecError);
    CHECK_THROWS_AS(predicate_from_json({{"type", "and"}, {"terms", nlohmann::json::array()}}),
                    SpecError);
}

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

TEST_CASE("argv_upto enumerates all sequences up to the length bound") {
    auto inputs = enumerate_domain(
        {{"kind", "argv_upto"}, {"alphabet", {"x", "y"}}, {"max_len", 2}});
    // 1 + 2 + 4
    REQUIRE(inputs.size() == 7);
    std::set<std::vector<std::string>> argvs;
    for (const auto& tc : inputs) {
        CHECK(tc.stdin_bytes.empty());
        argvs.insert(tc.argv);
    }
    CHECK(argvs.size() == 7);  // no duplicates
    CHECK(argvs.count({}));
    CHECK(argvs.count({"y", "x"}));

    // oracle: independent count for |alphabet|=3, max_len=3 is 3^0+3^1+3^2+3^3
    auto big = enumerate_domain(
        {{"kind", "argv_upto"}, {"alphabet", {"a", "b", "c"}}, {"max_len", 3}});
    CHECK(big.size() == 1 + 3 + 9 + 27);
}

TEST_CASE("int_arg_range covers every integer inclusively") {
    auto inputs = enumerate_domain({{"kind", "int_arg_range"}, {"lo", -2}, {"hi", 3}});
    REQUIRE(inputs.size() == 6);
    CHECK(inputs.front().argv == std::vector<std::string>{"-2"});
    CHECK(inputs.back().argv == std::vector<std::string>{"3"});
}

TEST_CASE("product crosses argv and stdin choices") {
    auto inputs = enumerate_domain({{"kind", "product"},
                                    {"argv_choices", {nlohmann::json::array(), {"-u"}}},
                                    {"stdin_choices", {"", "a"}}});
    REQUIRE(inputs.size() == 4);
    std::set<std::pair<std::size_t, Bytes>> seen;
    for (const auto& tc : inputs) seen.insert({tc.argv.size(), tc.stdin_bytes});
    CHECK(seen.size() == 4);

    // stdin_choices defaults to the single empty stdin
    auto no_stdin = enumerate_domain(
        {{"kind", "product"}, {"argv_choices", {nlohmann::json::array(), {"x"}}}});
    REQUIRE(no_stdin.size() == 2);
    CHECK(no_stdin[0].stdin_bytes.empty());
}

TEST_CASE("domain ids are unique") {
    auto inputs = enumerate_domain({{"kind", "int_arg_range"}, {"lo", 0}, {"hi", 20}});
    std::set<std::string> ids;
    for (const auto& tc : inputs) ids.insert(tc.id);
    CHECK(ids.size() == inputs.size());
}

TEST_CASE("bad domains are rejected") {
    CHECK_THROWS_AS(enumerate_domain({{"kind", "all_strings"}}), SpecError);
    CHECK_THROWS_AS(enumerate_domain({{"kind", "int_arg_range"}, {"lo", 5}, {"hi", 1}}),
                    SpecError);
    CHECK_THROWS_AS(enumerate_domain({{"kind", "argv_upto"},
                                      {"alphabet", nlohmann::json::array()},
                                      {"max_len", 1}}),
                    SpecError);
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

TEST_CASE("manifest loads with resolved paths") {
    FixtureManifest m = load_manifest(corpus() / "twobug");
    CHECK(m.name == "twobug");
    CHECK(fs::is_directory(m.c_root));
    CHECK(fs::is_directory(m.rust_correct));
    REQUIRE(m.bugs.size() == 3);
    CHECK(m.bugs[0].bug_id == "no_upper");
    CHECK(m.bugs[1].bug_id == "both");
    CHECK(m.bugs[2].bug_id == "empty_exit");
    // the seed suite parses and holds the advertised 15 cases
    TestSuite seeds = load_suite(m.seed_suite);
    CHECK(seeds.cases.size() == 15);
}

TEST_CASE("manifest with a missing directory is rejected") {
    TempDir tmp;
    nlohmann::json j = {{"name", "ghost"},
                        {"c_root", "c"},
                        {"rust_correct", "rust"},
                        {"seed_suite", "seeds"},
                        {"bugs", nlohmann::json::array()},
                        {"domain", {{"kind", "product"}, {"argv_choices", {nlohmann::json::array()}}}}};
    write_file_bytes(tmp.path() / "manifest.json", j.dump());
    CHECK_THROWS_AS(load_manifest(tmp.path()), SpecError);
    write_file_bytes(tmp.path() / "manifest.json", "not json");
    CHECK_THROWS_AS(load_manifest(tmp.path()), SpecError);
}

TEST_CASE("corpus listing finds every manifest") {
    auto all = list_fixtures(corpus());
    std::vector<std::string> names;
    for (const auto& m : all) names.push_back(m.name);
    CHECK(names == std::vector<std::string>{"abstool", "echotool", "greet", "retcode",
                                            "spinner", "twobug", "writer"});
    // spinner carries its own tighter time limit
    for (const auto& m : all)
        if (m.name == "spinner") CHECK(m.limits.wall_timeout_s == 1.0);
    // abstool ships a fuzz grammar
    for (const auto& m : all)
        if (m.name == "abstool") {
            REQUIRE(m.input_spec.has_value());
            InputSpec spec = load_input_spec(*m.input_spec);
            CHECK(spec.argv_grammar.size() == 1);
        }
}

// ---------------------------------------------------------------------------
// Verification against the harness
// ---------------------------------------------------------------------------

TEST_CASE("every corpus fixture satisfies its own contract") {
    for (const auto& m : list_fixtures(corpus())) {
        INFO("fixture " << m.name);
        FixtureCheck check = verify_fixture(m, scratch().path());
        CHECK(check.domain_size > 0);
        CHECK(check.seed_count > 0);
        for (const auto& [bug, n] : check.mismatches_per_bug) {
            INFO("bug " << bug);
            CHECK(n > 0);
        }
    }
}

TEST_CASE("verification catches a wrong predicate") {
    // claim echotool's bug fires on *every* input: the no-flag inputs mismatch
    // as promised, but "-n" inputs match and must trip the checker
    FixtureManifest m = load_manifest(corpus() / "echotool");
    REQUIRE(m.bugs.size() == 1);
    auto always = std::make_shared<InputPredicate>();
    always->kind = InputPredicate::Kind::argc_ge;
    always->int_value = 0;
    m.bugs[0].predicate = always;
    CHECK_THROWS_AS(verify_fixture(m, scratch().path()), FixtureBroken);
}

TEST_CASE("verification catches a bug passed off as correct") {
    FixtureManifest m = load_manifest(corpus() / "retcode");
    m.rust_correct = m.bugs[0].rust_root;
    CHECK_THROWS_AS(verify_fixture(m, scratch().path()), FixtureBroken);
}

TEST_CASE("verification catches a predicate selecting nothing") {
    FixtureManifest m = load_manifest(corpus() / "greet");
    // restrict the domain so the bug's trigger input is never enumerated
    m.domain = {{"kind", "product"},
                {"argv_choices", {nlohmann::json::array(), {"good"}}}};
    CHECK_THROWS_AS(verify_fixture(m, scratch().path()), FixtureBroken);
}

TEST_CASE("verification rejects a non-sane reference") {
    FixtureManifest m = load_manifest(corpus() / "echotool");
    m.c_root = source_dir() / "fixtures" / "aux" / "nondet";
    CHECK_THROWS_AS(verify_fixture(m, scratch().path()), FixtureBroken);
}
