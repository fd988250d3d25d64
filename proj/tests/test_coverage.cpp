// SPDX-License-Identifier: Apache-2.0
#include "actor/coverage.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace actor;

namespace {

support::TempDir& scratch() {
    static support::TempDir tmp;
    return tmp;
}

TestSuite suite_of(std::vector<std::vector<Bytes>> argvs) {
    TestSuite suite;
    int i = 0;
    for (auto& argv : argvs) {
        TestCase tc;
        tc.id = "c" + std::to_string(i++);
        tc.argv = std::move(argv);
        suite = append_tests(suite, {tc}, 0);
    }
    return suite;
}

CoverageReport measure(std::vector<std::vector<Bytes>> argvs) {
    ExecLimits limits;
    return measure_coverage(support::fixture("covtool") / "c", suite_of(std::move(argvs)),
                            limits, scratch().path());
}

}  // namespace

// The covtool fixture has 8 executable lines; the positive branch misses
// the "nonpos" arm and vice versa. Counts below are hand-checked against
// the source.
TEST_CASE("coverage of the hand-counted fixture") {
    CoverageReport pos = measure({{"3"}});
    REQUIRE(pos.per_file.count("main.c"));
    const FileCoverage& f = pos.per_file.at("main.c");
    REQUIRE(f.executable_lines.size() == 8);
    REQUIRE(f.executed_lines.size() == 7);
    REQUIRE(std::includes(f.executable_lines.begin(), f.executable_lines.end(),
                          f.executed_lines.begin(), f.executed_lines.end()));
    // the unexecuted line is the else arm (printf("nonpos"))
    REQUIRE(f.executable_lines.count(12));
    REQUIRE(!f.executed_lines.count(12));
    REQUIRE(pos.percent() == Catch::Approx(7.0 / 8.0));

    SECTION("both arms beat a single arm") {
        CoverageReport both = measure({{"3"}, {"-2"}});
        REQUIRE(both.percent() > pos.percent());
        REQUIRE(both.percent() == Catch::Approx(1.0));
    }
    SECTION("empty suite executes nothing") {
        CoverageReport none = measure({});
        REQUIRE(none.per_file.at("main.c").executed_lines.empty());
        REQUIRE(none.per_file.at("main.c").executable_lines.size() == 8);
        REQUIRE(none.percent() == 0.0);
    }
    SECTION("monotonicity: subset suite never covers more") {
        CoverageReport more = measure({{"3"}, {}});
        REQUIRE(pos.percent() <= more.percent());
    }
}

TEST_CASE("merge has set-union semantics") {
    CoverageReport a = measure({{"3"}});
    CoverageReport b = measure({{"-2"}});

    SECTION("idempotent") { REQUIRE(merge({a, a}) == a); }
    SECTION("commutative") { REQUIRE(merge({a, b}) == merge({b, a})); }
    SECTION("associative") {
        CoverageReport c = measure({{}});
        REQUIRE(merge({merge({a, b}), c}) == merge({a, merge({b, c})}));
    }
    SECTION("disjoint arms union to full coverage") {
        REQUIRE(merge({a, b}).percent() == Catch::Approx(1.0));
    }
    SECTION("empty merge is vacuously full") {
        CoverageReport empty = merge({});
        REQUIRE(empty.per_file.empty());
        REQUIRE(empty.percent() == 1.0);
    }
    SECTION("mismatched source trees are rejected") {
        CoverageReport other = a;
        other.per_file["main.c"].executable_lines.insert(99);
        REQUIRE_THROWS_AS(merge({a, other}), MismatchedSources);
    }
}

TEST_CASE("coverage report serializes to JSON") {
    CoverageReport a = measure({{"3"}});
    nlohmann::json j = coverage_to_json(a);
    REQUIRE(j["percent"].get<double>() == Catch::Approx(7.0 / 8.0));
    REQUIRE(j["per_file"]["main.c"]["executable_lines"].size() == 8);
}
