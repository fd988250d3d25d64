// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "actor/error.hpp"

namespace actor {

// Subject programs emit arbitrary bytes; all program I/O is kept as raw
// byte strings, never decoded.
using Bytes = std::string;

// exit code recorded for a wall-timeout kill, matching timeout(1) convention
inline constexpr int kTimeoutExitCode = 124;

namespace fs = std::filesystem;

inline Bytes read_file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const fs::path& p, std::string_view data) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoFailure("short write to " + p.string());
}

// ids double as directory names, so the charset is deliberately narrow
inline bool is_safe_id(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

inline std::vector<std::string> split_path_segments(std::string_view p) {
    std::vector<std::string> segs;
    std::string cur;
    for (char c : p) {
        if (c == '/') {
            if (!cur.empty()) segs.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) segs.push_back(cur);
    return segs;
}

// Relative, normalized, and confined: no leading '/', no '.' or '..' segments.
inline bool is_safe_rel_path(std::string_view p) {
    if (p.empty() || p.front() == '/') return false;
    for (const auto& seg : split_path_segments(p))
        if (seg == "." || seg == "..") return false;
    return true;
}

// Collects every regular file under root as relative-path -> content.
inline std::map<std::string, Bytes> snapshot_tree(const fs::path& root) {
    std::map<std::string, Bytes> out;
    if (!fs::exists(root)) return out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::string rel = fs::relative(e.path(), root).generic_string();
        out.emplace(std::move(rel), read_file_bytes(e.path()));
    }
    return out;
}

inline void materialize_tree(const fs::path& root, const std::map<std::string, Bytes>& files) {
    for (const auto& [rel, content] : files) write_file_bytes(root / rel, content);
}

inline std::string hex_escape(std::string_view s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c >= 0x20 && c < 0x7f) {
            out.push_back(static_cast<char>(c));
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += "\\x";
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xf]);
        }
    }
    return out;
}

// First point where a and b differ, or npos if one is a prefix of the other
// and they have equal length.
inline std::size_t first_divergence(std::string_view a, std::string_view b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return i;
    return a.size() == b.size() ? std::string_view::npos : n;
}

// splitmix64; used to derive independent per-index RNG seeds
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace actor
