// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "actor/bytes.hpp"
#include "actor/testcase.hpp"

namespace support {

inline std::filesystem::path source_dir() { return ACTOR_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) {
    return source_dir() / "fixtures" / name;
}

// Fresh scratch directory per test binary run, cleaned up on exit.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("actor-test-" + std::to_string(rd() % 100000000));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Arbitrary byte strings, including NUL and high bytes.
inline actor::Bytes random_bytes(std::mt19937_64& rng, std::size_t max_len) {
    std::size_t len = rng() % (max_len + 1);
    actor::Bytes out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) out.push_back(static_cast<char>(rng() & 0xff));
    return out;
}

inline std::string random_id(std::mt19937_64& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789_-";
    std::size_t len = 1 + rng() % 12;
    std::string out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(alphabet[rng() % (sizeof alphabet - 1)]);
    return out;
}

inline actor::TestCase random_test_case(std::mt19937_64& rng) {
    actor::TestCase tc;
    tc.id = random_id(rng);
    std::size_t nargs = rng() % 4;
    for (std::size_t i = 0; i < nargs; ++i) {
        actor::Bytes a = random_bytes(rng, 10);
        // newline cannot be represented in the cmd file
        for (auto& c : a)
            if (c == '\n') c = 'n';
        tc.argv.push_back(a);
    }
    tc.stdin_bytes = random_bytes(rng, 64);
    if (rng() % 2) tc.env["FOO"] = "bar" + std::to_string(rng() % 10);
    if (rng() % 2) tc.input_files["sub/dir/a.bin"] = random_bytes(rng, 32);
    tc.provenance = static_cast<actor::Provenance>(rng() % 4);
    tc.iteration = static_cast<int>(rng() % 11);
    if (rng() % 2) {
        actor::BehaviorRecord rec;
        rec.stdout_bytes = random_bytes(rng, 64);
        rec.stderr_bytes = random_bytes(rng, 64);
        rec.exit_code = static_cast<int>(rng() % 123);
        if (rng() % 2)
            rec.file_delta["out.bin"] = {actor::ChangeKind::created, random_bytes(rng, 16)};
        if (rng() % 4 == 0) rec.file_delta["gone.txt"] = {actor::ChangeKind::deleted, {}};
        tc.expected = rec;
    }
    return tc;
}

}  // namespace support
