// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <nlohmann/json.hpp>

#include "actor/harness.hpp"

namespace actor {

// Grammar slots for sampling command-line inputs. Deliberately small:
// subject programs are CLI utilities.
struct Gen {
    enum class Kind { choice, flag, int_range, string, file_ref };
    Kind kind = Kind::choice;
    std::vector<Bytes> literals;   // choice
    Bytes flag_literal;            // flag (optionally present)
    std::int64_t lo = 0, hi = 0;   // int_range, inclusive
    Bytes alphabet;                // string
    std::size_t len_lo = 0, len_hi = 0;
    std::string file_name;         // file_ref
};

struct InputSpec {
    std::vector<Gen> argv_grammar;
    std::optional<Gen> stdin_gen;
    std::map<std::string, Gen> file_gens;
    std::size_t max_args = 16;

    void validate() const {
        auto check = [&](const Gen& g, bool top) {
            switch (g.kind) {
                case Gen::Kind::choice:
                    if (g.literals.empty()) throw SpecError("choice with no literals");
                    break;
                case Gen::Kind::flag:
                    if (g.flag_literal.empty()) throw SpecError("flag with empty literal");
                    break;
                case Gen::Kind::int_range:
                    if (g.lo > g.hi) throw SpecError("empty int_range");
                    break;
                case Gen::Kind::string:
                    if (g.alphabet.empty() || g.len_lo > g.len_hi)
                        throw SpecError("bad string generator");
                    break;
                case Gen::Kind::file_ref:
                    if (!top) throw SpecError("nested file_ref");
                    if (!file_gens.count(g.file_name))
                        throw SpecError("dangling file_ref: " + g.file_name);
                    break;
            }
        };
        for (const auto& g : argv_grammar) check(g, true);
        if (stdin_gen) check(*stdin_gen, false);
        for (const auto& [name, g] : file_gens) {
            if (g.kind == Gen::Kind::file_ref) throw SpecError("file_ref inside file_gens");
            check(g, false);
        }
    }
};

namespace fuzzdetail {

// All draws go through this; std::uniform_int_distribution is
// implementation-defined, a plain modulo keeps streams portable.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

inline Bytes sample_value(const Gen& g, std::mt19937_64& rng) {
    switch (g.kind) {
        case Gen::Kind::choice:
            return g.literals[draw(rng, g.literals.size())];
        case Gen::Kind::flag:
            return g.flag_literal;
        case Gen::Kind::int_range: {
            std::uint64_t span = static_cast<std::uint64_t>(g.hi - g.lo) + 1;
            return std::to_string(g.lo + static_cast<std::int64_t>(draw(rng, span)));
        }
        case Gen::Kind::string: {
            std::size_t len = g.len_lo + draw(rng, g.len_hi - g.len_lo + 1);
            Bytes out;
            for (std::size_t i = 0; i < len; ++i)
                out.push_back(g.alphabet[draw(rng, g.alphabet.size())]);
            return out;
        }
        case Gen::Kind::file_ref:
            return {};  // handled by the caller
    }
    return {};
}

}  // namespace fuzzdetail

/// Deterministic generation: each (seed, index) pair seeds its own stream,
/// so any single test can be regenerated without replaying the prefix.
inline TestCase generate_input(const InputSpec& spec, std::uint64_t seed, std::size_t index) {
    std::mt19937_64 rng(mix64(seed) ^ mix64(static_cast<std::uint64_t>(index) + 0x51ed));
    TestCase tc;
    tc.id = "fuzz-" + std::to_string(seed) + "-" + std::to_string(index);
    tc.provenance = Provenance::fuzz;
    for (const auto& g : spec.argv_grammar) {
        if (tc.argv.size() >= spec.max_args) break;
        if (g.kind == Gen::Kind::flag) {
            if (fuzzdetail::draw(rng, 2) == 1) tc.argv.push_back(g.flag_literal);
        } else if (g.kind == Gen::Kind::file_ref) {
            tc.input_files[g.file_name] =
                fuzzdetail::sample_value(spec.file_gens.at(g.file_name), rng);
            tc.argv.push_back(g.file_name);
        } else {
            tc.argv.push_back(fuzzdetail::sample_value(g, rng));
        }
    }
    if (spec.stdin_gen) tc.stdin_bytes = fuzzdetail::sample_value(*spec.stdin_gen, rng);
    return tc;
}

inline std::vector<TestCase> generate_inputs(const InputSpec& spec, std::uint64_t seed,
                                             std::size_t n) {
    spec.validate();
    std::vector<TestCase> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(generate_input(spec, seed, i));
    return out;
}

struct MismatchWitness {
    TestCase test;  // expected captured from the reference
    Verdict verdict;
    std::uint64_t seed = 0;
    std::size_t index = 0;
};

/// Streams generated inputs through both subjects, collecting every
/// mismatch. Inputs failing the reference sanity check are discarded.
inline std::vector<MismatchWitness> fuzz_campaign(
    const SubjectProgram& reference, const SubjectProgram& candidate, const InputSpec& spec,
    std::uint64_t seed, std::size_t budget, const ExecLimits& limits,
    const fs::path& scratch_root = detail::default_scratch_root()) {
    spec.validate();
    std::vector<MismatchWitness> witnesses;
    for (std::size_t i = 0; i < budget; ++i) {
        TestCase tc = generate_input(spec, seed, i);
        SanityResult s = sanity_check(reference, tc, limits, scratch_root);
        if (!s.ok) continue;
        tc.expected = std::move(*s.record);
        BehaviorRecord actual = execute(candidate, tc, limits, scratch_root);
        Verdict v = compare(*tc.expected, actual);
        if (v.status == VerdictStatus::mismatch)
            witnesses.push_back({std::move(tc), std::move(v), seed, i});
    }
    return witnesses;
}

namespace fuzzdetail {

// Re-verify a candidate reduction: still sane on the reference and still a
// mismatch against the candidate.
inline std::optional<MismatchWitness> try_reduction(
    MismatchWitness w, const SubjectProgram& reference, const SubjectProgram& candidate,
    const ExecLimits& limits, const fs::path& scratch_root) {
    w.test.expected.reset();
    SanityResult s = sanity_check(reference, w.test, limits, scratch_root);
    if (!s.ok) return std::nullopt;
    w.test.expected = std::move(*s.record);
    BehaviorRecord actual = execute(candidate, w.test, limits, scratch_root);
    Verdict v = compare(*w.test.expected, actual);
    if (v.status != VerdictStatus::mismatch) return std::nullopt;
    w.verdict = std::move(v);
    return w;
}

}  // namespace fuzzdetail

/// Greedy shrink: drop argv elements, halve stdin and file payloads, keeping
/// only reductions that preserve the verified mismatch.
inline MismatchWitness shrink_witness(
    MismatchWitness w, const SubjectProgram& reference, const SubjectProgram& candidate,
    const ExecLimits& limits, const fs::path& scratch_root = detail::default_scratch_root()) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < w.test.argv.size(); ++i) {
            MismatchWitness cand = w;
            cand.test.argv.erase(cand.test.argv.begin() + static_cast<std::ptrdiff_t>(i));
            if (auto ok = fuzzdetail::try_reduction(std::move(cand), reference, candidate,
                                                    limits, scratch_root)) {
                w = std::move(*ok);
                progress = true;
                break;
            }
        }
        if (progress) continue;
        if (!w.test.stdin_bytes.empty()) {
            MismatchWitness cand = w;
            cand.test.stdin_bytes.resize(cand.test.stdin_bytes.size() / 2);
            if (auto ok = fuzzdetail::try_reduction(std::move(cand), reference, candidate,
                                                    limits, scratch_root)) {
                w = std::move(*ok);
                progress = true;
                continue;
            }
        }
        for (auto& [name, content] : w.test.input_files) {
            if (content.empty()) continue;
            MismatchWitness cand = w;
            cand.test.input_files[name].resize(content.size() / 2);
            if (auto ok = fuzzdetail::try_reduction(std::move(cand), reference, candidate,
                                                    limits, scratch_root)) {
                w = std::move(*ok);
                progress = true;
                break;
            }
        }
    }
    return w;
}

// --- JSON serialization of InputSpec ----------------------------------------

inline Gen gen_from_json(const nlohmann::json& j) {
    Gen g;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "choice") {
        g.kind = Gen::Kind::choice;
        for (const auto& lit : j.at("literals")) g.literals.push_back(lit.get<std::string>());
    } else if (kind == "flag") {
        g.kind = Gen::Kind::flag;
        g.flag_literal = j.at("literal").get<std::string>();
    } else if (kind == "int_range") {
        g.kind = Gen::Kind::int_range;
        g.lo = j.at("lo").get<std::int64_t>();
        g.hi = j.at("hi").get<std::int64_t>();
    } else if (kind == "string") {
        g.kind = Gen::Kind::string;
        g.alphabet = j.at("alphabet").get<std::string>();
        g.len_lo = j.at("len_lo").get<std::size_t>();
        g.len_hi = j.at("len_hi").get<std::size_t>();
    } else if (kind == "file_ref") {
        g.kind = Gen::Kind::file_ref;
        g.file_name = j.at("name").get<std::string>();
    } else {
        throw SpecError("unknown generator kind: " + kind);
    }
    return g;
}

inline InputSpec input_spec_from_json(const nlohmann::json& j) {
    InputSpec spec;
    for (const auto& g : j.value("argv_grammar", nlohmann::json::array()))
        spec.argv_grammar.push_back(gen_from_json(g));
    if (j.contains("stdin_gen")) spec.stdin_gen = gen_from_json(j["stdin_gen"]);
    if (j.contains("file_gens"))
        for (const auto& [name, g] : j["file_gens"].items())
            spec.file_gens[name] = gen_from_json(g);
    if (j.contains("max_args")) spec.max_args = j["max_args"].get<std::size_t>();
    spec.validate();
    return spec;
}

inline InputSpec load_input_spec(const fs::path& file) {
    try {
        return input_spec_from_json(nlohmann::json::parse(read_file_bytes(file)));
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("bad input spec " + file.string() + ": " + e.what());
    }
}

}  // namespace actor
