// SPDX-License-Identifier: Apache-2.0
#include "actor/testcase.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace actor;

TEST_CASE("cmd parsing maps lines to argv elements") {
    support::TempDir tmp;
    fs::path dir = tmp.path() / "t1";
    fs::create_directories(dir);
    write_file_bytes(dir / "cmd", "-n\nhello\n");
    TestCase tc = parse_test_case(dir);
    REQUIRE(tc.argv == std::vector<Bytes>{"-n", "hello"});
    REQUIRE(tc.stdin_bytes.empty());
    REQUIRE(tc.provenance == Provenance::seed);
    REQUIRE(tc.iteration == 0);
}

TEST_CASE("files and expected exit_code are mapped") {
    support::TempDir tmp;
    fs::path dir = tmp.path() / "t2";
    fs::create_directories(dir);
    write_file_bytes(dir / "cmd", "");
    write_file_bytes(dir / "files/a.txt", "x\n");
    write_file_bytes(dir / "expected/exit_code", "0");
    TestCase tc = parse_test_case(dir);
    REQUIRE(tc.argv.empty());
    REQUIRE(tc.input_files.at("a.txt") == "x\n");
    REQUIRE(tc.expected);
    REQUIRE(tc.expected->exit_code == 0);
}

TEST_CASE("malformed tests are rejected, never repaired") {
    support::TempDir tmp;

    SECTION("missing cmd") {
        fs::path dir = tmp.path() / "t3";
        fs::create_directories(dir);
        REQUIRE_THROWS_AS(parse_test_case(dir), MalformedTest);
    }
    SECTION("path escape under files/") {
        fs::path dir = tmp.path() / "t4";
        fs::create_directories(dir / "files");
        write_file_bytes(dir / "cmd", "");
        write_file_bytes(tmp.path() / "escape", "gotcha");
        fs::create_symlink(tmp.path() / "escape", dir / "files" / "link");
        REQUIRE_THROWS_AS(parse_test_case(dir), MalformedTest);
    }
    SECTION("bad id") {
        fs::path dir = tmp.path() / "has space";
        fs::create_directories(dir);
        write_file_bytes(dir / "cmd", "");
        REQUIRE_THROWS_AS(parse_test_case(dir), MalformedTest);
    }
    SECTION("unparseable exit_code") {
        fs::path dir = tmp.path() / "t5";
        fs::create_directories(dir);
        write_file_bytes(dir / "cmd", "");
        write_file_bytes(dir / "expected/exit_code", "zero");
        REQUIRE_THROWS_AS(parse_test_case(dir), MalformedTest);
    }
    SECTION("exit_code out of range") {
        fs::path dir = tmp.path() / "t6";
        fs::create_directories(dir);
        write_file_bytes(dir / "cmd", "");
        write_file_bytes(dir / "expected/exit_code", "300");
        REQUIRE_THROWS_AS(parse_test_case(dir), MalformedTest);
    }
}

TEST_CASE("write/parse round trip is byte-exact") {
    support::TempDir tmp;

    SECTION("stdin containing NUL bytes") {
        TestCase tc;
        tc.id = "nul";
        tc.stdin_bytes = Bytes("a\0b", 3);
        write_test_case(tc, tmp.path() / tc.id);
        REQUIRE(parse_test_case(tmp.path() / tc.id) == tc);
    }
    SECTION("empty argv writes an empty cmd file") {
        TestCase tc;
        tc.id = "empty";
        write_test_case(tc, tmp.path() / tc.id);
        REQUIRE(read_file_bytes(tmp.path() / tc.id / "cmd").empty());
        REQUIRE(parse_test_case(tmp.path() / tc.id) == tc);
    }
    SECTION("randomized round trips") {
        std::mt19937_64 rng(1234);
        for (int i = 0; i < 200; ++i) {
            TestCase tc = support::random_test_case(rng);
            fs::path dir = tmp.path() / ("rt" + std::to_string(i));
            write_test_case(tc, dir);
            TestCase back = parse_test_case(dir);
            back.id = tc.id;  // id comes from the directory name
            INFO("case " << i);
            REQUIRE(back == tc);
        }
    }
    SECTION("argv element with embedded newline cannot serialize") {
        TestCase tc;
        tc.id = "badnl";
        tc.argv = {"a\nb"};
        REQUIRE_THROWS_AS(write_test_case(tc, tmp.path() / tc.id), MalformedTest);
    }
}

TEST_CASE("append_tests grows the suite append-only") {
    auto mk = [](const std::string& id) {
        TestCase tc;
        tc.id = id;
        return tc;
    };
    TestSuite suite;
    for (int i = 0; i < 15; ++i)
        suite = append_tests(suite, {mk("seed-" + std::to_string(i))}, 0);
    REQUIRE(suite.size() == 15);

    SECTION("fifteen seeds plus ten batches of three makes forty-five") {
        for (int it = 1; it <= 10; ++it) {
            std::vector<TestCase> batch;
            for (int j = 0; j < 3; ++j)
                batch.push_back(mk("adv-" + std::to_string(it) + "-" + std::to_string(j)));
            TestSuite bigger = append_tests(suite, batch, it);
            // prefix preservation
            for (std::size_t k = 0; k < suite.size(); ++k)
                REQUIRE(bigger.cases[k].id == suite.cases[k].id);
            suite = std::move(bigger);
        }
        REQUIRE(suite.size() == 45);
        REQUIRE(suite.history.size() == 45);
    }
    SECTION("empty batch is the identity") {
        TestSuite same = append_tests(suite, {}, 1);
        REQUIRE(same.cases == suite.cases);
    }
    SECTION("duplicate id is rejected") {
        REQUIRE_THROWS_AS(append_tests(suite, {mk("seed-3")}, 1), DuplicateId);
    }
}

TEST_CASE("seed directory loads with provenance seed and iteration 0") {
    TestSuite suite = load_suite(support::fixture("twobug") / "seeds");
    REQUIRE(suite.size() == 15);
    for (const auto& tc : suite.cases) {
        REQUIRE(tc.provenance == Provenance::seed);
        REQUIRE(tc.iteration == 0);
    }
}

TEST_CASE("save/load suite preserves order and history") {
    support::TempDir tmp;
    std::mt19937_64 rng(99);
    TestSuite suite;
    for (int i = 0; i < 8; ++i) {
        TestCase tc = support::random_test_case(rng);
        tc.id = "zcase-" + std::to_string(7 - i);  // reverse-lexicographic append order
        if (!suite.has_id(tc.id)) suite = append_tests(suite, {tc}, i / 3);
    }
    save_suite(suite, tmp.path() / "suite");
    TestSuite back = load_suite(tmp.path() / "suite");
    REQUIRE(back.history == suite.history);
    REQUIRE(back.cases == suite.cases);
}
