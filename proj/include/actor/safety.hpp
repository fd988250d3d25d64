// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "actor/bytes.hpp"
#include "actor/error.hpp"

namespace actor {

enum class FindingKind {
    unsafe_block,
    unsafe_fn,
    unsafe_impl,
    unsafe_trait,
    allow_escape_hatch,
    ffi_decl,
};

inline const char* to_string(FindingKind k) {
    switch (k) {
        case FindingKind::unsafe_block: return "unsafe_block";
        case FindingKind::unsafe_fn: return "unsafe_fn";
        case FindingKind::unsafe_impl: return "unsafe_impl";
        case FindingKind::unsafe_trait: return "unsafe_trait";
        case FindingKind::allow_escape_hatch: return "allow_escape_hatch";
        case FindingKind::ffi_decl: return "ffi_decl";
    }
    return "?";
}

struct SafetyFinding {
    std::string file;
    int line = 0;
    std::string excerpt;
    FindingKind kind;
};

struct SafetyReport {
    std::vector<SafetyFinding> findings;
    bool safe() const { return findings.empty(); }
};

/// Injects the deny-level unsafe lint into a rustc invocation, so the
/// compiler itself rejects unsafe code; scan_sources is the second check.
inline std::vector<std::string> enforce_at_build(std::vector<std::string> rustc_args) {
    rustc_args.push_back("-D");
    rustc_args.push_back("unsafe_code");
    return rustc_args;
}

namespace rustlex {

struct Token {
    std::string text;
    int line;
};

// Token stream with comments, string/char literals, and lifetimes stripped.
// Only identifiers and single punctuation characters survive; that is all
// the scan needs.
inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    auto at = [&](std::size_t k) -> char { return k < src.size() ? src[k] : '\0'; };

    auto skip_string = [&](char quote) {
        // cursor on the opening quote
        ++i;
        while (i < src.size()) {
            char c = src[i];
            if (c == '\n') ++line;
            if (c == '\\') {
                i += 2;
                continue;
            }
            ++i;
            if (c == quote) return;
        }
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == '/' && at(i + 1) == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
        } else if (c == '/' && at(i + 1) == '*') {
            int depth = 1;  // rust block comments nest
            i += 2;
            while (i < src.size() && depth > 0) {
                if (src[i] == '\n') ++line;
                if (src[i] == '/' && at(i + 1) == '*') {
                    ++depth;
                    i += 2;
                } else if (src[i] == '*' && at(i + 1) == '/') {
                    --depth;
                    i += 2;
                } else {
                    ++i;
                }
            }
        } else if (c == '"') {
            skip_string('"');
        } else if ((c == 'r' || c == 'b') &&
                   (at(i + 1) == '"' || at(i + 1) == '#' ||
                    (c == 'b' && at(i + 1) == 'r' && (at(i + 2) == '"' || at(i + 2) == '#')))) {
            // raw / byte string literals: r"..."  r#"..."#  b"..."  br#"..."#
            std::size_t j = i + 1;
            if (c == 'b' && at(j) == 'r') ++j;
            int hashes = 0;
            while (at(j) == '#') {
                ++hashes;
                ++j;
            }
            if (at(j) != '"') {
                // not a literal after all (e.g. identifier starting with r)
                std::size_t start = i;
                while (i < src.size() && (isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                    ++i;
                out.push_back({src.substr(start, i - start), line});
                continue;
            }
            ++j;  // past the opening quote
            std::string closer = "\"" + std::string(hashes, '#');
            std::size_t end = src.find(closer, j);
            if (end == std::string::npos) end = src.size();
            for (std::size_t k = i; k < std::min(end + closer.size(), src.size()); ++k)
                if (src[k] == '\n') ++line;
            i = std::min(end + closer.size(), src.size());
        } else if (c == '\'') {
            // char literal vs lifetime: a lifetime is '<ident> not followed
            // by a closing quote
            std::size_t j = i + 1;
            if (at(j) == '\\') {
                skip_string('\'');
            } else if ((isalnum(static_cast<unsigned char>(at(j))) || at(j) == '_') &&
                       at(j + 1) != '\'') {
                ++i;  // lifetime; skip the quote, the ident lexes next round
            } else {
                skip_string('\'');
            }
        } else if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size() && (isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            out.push_back({src.substr(start, i - start), line});
        } else if (isdigit(static_cast<unsigned char>(c))) {
            while (i < src.size() && (isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                                      src[i] == '.'))
                ++i;
        } else if (isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            out.push_back({std::string(1, c), line});
            ++i;
        }
    }
    return out;
}

}  // namespace rustlex

/// Scans one Rust source text for unsafe constructs.
inline void scan_rust_source(const std::string& file_label, const std::string& src,
                             std::vector<SafetyFinding>& findings) {
    auto tokens = rustlex::lex(src);
    auto text = [&](std::size_t k) -> const std::string& {
        static const std::string empty;
        return k < tokens.size() ? tokens[k].text : empty;
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        if (tok.text == "unsafe") {
            FindingKind kind = FindingKind::unsafe_block;
            // skip over any modifiers between `unsafe` and the item keyword
            std::size_t j = i + 1;
            while (j < tokens.size() &&
                   (text(j) == "extern" || text(j) == "async" || text(j) == "const"))
                ++j;
            if (text(j) == "fn") kind = FindingKind::unsafe_fn;
            else if (text(j) == "impl") kind = FindingKind::unsafe_impl;
            else if (text(j) == "trait") kind = FindingKind::unsafe_trait;
            else if (text(i + 1) == "extern") kind = FindingKind::ffi_decl;
            findings.push_back({file_label, tok.line, "unsafe " + text(i + 1), kind});
        } else if (tok.text == "extern" && text(i + 1) != "crate") {
            // extern blocks and extern fns are escape hatches even unused
            bool preceded_by_unsafe = i > 0 && tokens[i - 1].text == "unsafe";
            if (!preceded_by_unsafe)
                findings.push_back({file_label, tok.line, "extern " + text(i + 1),
                                    FindingKind::ffi_decl});
        } else if (tok.text == "#") {
            // #[allow(unsafe_code)] / #![allow(unsafe_code)] and expect(...)
            std::size_t j = i + 1;
            if (text(j) == "!") ++j;
            if (text(j) != "[") continue;
            int depth = 0;
            bool is_allow = false;
            for (std::size_t k = j; k < tokens.size(); ++k) {
                if (text(k) == "[") ++depth;
                else if (text(k) == "]" && --depth == 0) break;
                if (text(k) == "allow" || text(k) == "expect") is_allow = true;
                if (is_allow && text(k) == "unsafe_code") {
                    findings.push_back({file_label, tok.line, "allow(unsafe_code)",
                                        FindingKind::allow_escape_hatch});
                    break;
                }
            }
        }
    }
}

/// Lexical unsafe-construct scan over every .rs file under rust_root.
inline SafetyReport scan_sources(const fs::path& rust_root) {
    if (!fs::is_directory(rust_root)) throw IoFailure("no such directory: " + rust_root.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(rust_root))
        if (e.is_regular_file() && e.path().extension() == ".rs") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    SafetyReport report;
    for (const auto& f : files) {
        std::string rel = fs::relative(f, rust_root).generic_string();
        scan_rust_source(rel, read_file_bytes(f), report.findings);
    }
    return report;
}

}  // namespace actor
