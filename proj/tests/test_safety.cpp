// SPDX-License-Identifier: Apache-2.0
#include "actor/safety.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace actor;

namespace {

SafetyReport scan_snippet(const std::string& src) {
    support::TempDir tmp;
    fs::create_directories(tmp.path() / "src");
    write_file_bytes(tmp.path() / "src/main.rs", src);
    return scan_sources(tmp.path());
}

}  // namespace

TEST_CASE("known-unsafe snippets are all flagged") {
    struct Case {
        const char* src;
        FindingKind kind;
    };
    const Case cases[] = {
        {"fn main() { unsafe { std::ptr::null::<i32>(); } }", FindingKind::unsafe_block},
        {"unsafe fn f() {}\nfn main() {}", FindingKind::unsafe_fn},
        {"struct S;\nunsafe impl Send for S {}\nfn main() {}", FindingKind::unsafe_impl},
        {"unsafe trait T {}\nfn main() {}", FindingKind::unsafe_trait},
        {"extern \"C\" { fn abs(x: i32) -> i32; }\nfn main() {}", FindingKind::ffi_decl},
        {"unsafe extern \"C\" { fn abs(x: i32) -> i32; }\nfn main() {}", FindingKind::ffi_decl},
        {"#![allow(unsafe_code)]\nfn main() {}", FindingKind::allow_escape_hatch},
        {"#[allow(unsafe_code)]\nfn f() {}\nfn main() {}", FindingKind::allow_escape_hatch},
        {"unsafe extern \"C\" fn g() {}\nfn main() {}", FindingKind::unsafe_fn},
    };
    for (const auto& c : cases) {
        INFO(c.src);
        SafetyReport r = scan_snippet(c.src);
        REQUIRE(!r.safe());
        bool found = false;
        for (const auto& f : r.findings) found = found || f.kind == c.kind;
        REQUIRE(found);
    }
}

TEST_CASE("comment and literal decoys are not flagged") {
    const char* decoys[] = {
        "// this would be unsafe\nfn main() {}",
        "/* unsafe { } */\nfn main() {}",
        "/* outer /* unsafe nested */ still comment */\nfn main() {}",
        "fn main() { let s = \"unsafe { }\"; let _ = s; }",
        "fn main() { let s = r#\"unsafe extern\"#; let _ = s; }",
        "fn main() { let b = b\"unsafe\"; let _ = b; }",
        "fn main() { let c = 'u'; let _ = c; }",
        "fn unsafe_sounding_name() {}\nfn main() { unsafe_sounding_name(); }",
        "extern crate core;\nfn main() {}",
        "fn f<'a>(x: &'a str) -> &'a str { x }\nfn main() { f(\"x\"); }",
        "#[allow(dead_code)]\nfn f() {}\nfn main() {}",
    };
    for (const char* src : decoys) {
        INFO(src);
        SafetyReport r = scan_snippet(src);
        REQUIRE(r.safe());
    }
}

TEST_CASE("findings carry file and line positions") {
    SafetyReport r = scan_snippet("fn main() {\n    // fine\n    unsafe {}\n}");
    REQUIRE(r.findings.size() == 1);
    REQUIRE(r.findings[0].line == 3);
    REQUIRE(r.findings[0].file == "src/main.rs");
}

TEST_CASE("scan is pure: same tree, same report") {
    support::TempDir tmp;
    fs::create_directories(tmp.path() / "a");
    write_file_bytes(tmp.path() / "a/main.rs", "fn main() { unsafe {} }");
    SafetyReport r1 = scan_sources(tmp.path());
    SafetyReport r2 = scan_sources(tmp.path());
    REQUIRE(r1.findings.size() == r2.findings.size());
    for (std::size_t i = 0; i < r1.findings.size(); ++i) {
        REQUIRE(r1.findings[i].file == r2.findings[i].file);
        REQUIRE(r1.findings[i].line == r2.findings[i].line);
        REQUIRE(r1.findings[i].kind == r2.findings[i].kind);
    }
}

TEST_CASE("fixture translations scan clean") {
    for (const char* name : {"echotool", "abstool", "greet", "retcode", "writer",
                             "spinner", "twobug"}) {
        SafetyReport r = scan_sources(support::fixture(name) / "rust_correct");
        INFO(name);
        REQUIRE(r.safe());
    }
}

TEST_CASE("enforce_at_build injects the deny lint") {
    auto args = enforce_at_build({"--edition", "2021", "-o", "bin", "main.rs"});
    REQUIRE(args[args.size() - 2] == "-D");
    REQUIRE(args.back() == "unsafe_code");
}
