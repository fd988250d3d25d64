// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <queue>
#include <variant>

#include <nlohmann/json.hpp>

#include "actor/bytes.hpp"
#include "actor/error.hpp"
#include "actor/testcase.hpp"

namespace actor {

enum class AgentRole { translator, discriminator, safety_fixer };

inline const char* to_string(AgentRole r) {
    switch (r) {
        case AgentRole::translator: return "translator";
        case AgentRole::discriminator: return "discriminator";
        case AgentRole::safety_fixer: return "safety_fixer";
    }
    return "?";
}

// --- Prompt templates --------------------------------------------------------
//
// Templates are plain text assets with {{name}} placeholders and
// {{#flag}}...{{/flag}} conditional sections (included iff the flag renders
// as "true"). Every referenced name must be bound; silence would hide
// config bugs.

inline std::string render_template_text(const std::string& tmpl,
                                        const std::map<std::string, std::string>& context) {
    std::string out;
    std::size_t i = 0;
    // stack of (flag value) for nested sections; emit only when all true
    std::vector<bool> emitting;
    auto active = [&] {
        for (bool b : emitting)
            if (!b) return false;
        return true;
    };
    while (i < tmpl.size()) {
        std::size_t open = tmpl.find("{{", i);
        if (open == std::string::npos) {
            if (active()) out += tmpl.substr(i);
            break;
        }
        if (active()) out += tmpl.substr(i, open - i);
        std::size_t close = tmpl.find("}}", open);
        if (close == std::string::npos) throw UnboundPlaceholder("unterminated {{ in template");
        std::string name = tmpl.substr(open + 2, close - open - 2);
        i = close + 2;
        if (!name.empty() && name[0] == '#') {
            auto it = context.find(name.substr(1));
            if (it == context.end())
                throw UnboundPlaceholder("unbound section flag: " + name.substr(1));
            emitting.push_back(it->second == "true");
            if (i < tmpl.size() && tmpl[i] == '\n') ++i;  // swallow the section's own line break
        } else if (!name.empty() && name[0] == '/') {
            if (emitting.empty()) throw UnboundPlaceholder("unmatched section close: " + name);
            emitting.pop_back();
            if (i < tmpl.size() && tmpl[i] == '\n') ++i;
        } else {
            auto it = context.find(name);
            if (it == context.end()) throw UnboundPlaceholder("unbound placeholder: " + name);
            if (active()) out += it->second;
        }
    }
    if (!emitting.empty()) throw UnboundPlaceholder("unclosed template section");
    return out;
}

inline std::string render_prompt(const fs::path& assets_dir, const std::string& template_name,
                                 const std::map<std::string, std::string>& context) {
    fs::path file = assets_dir / "prompts" / (template_name + ".txt");
    if (!fs::exists(file)) throw UnboundPlaceholder("no such template: " + template_name);
    return render_template_text(read_file_bytes(file), context);
}

// --- Tasks and outcomes ------------------------------------------------------

struct AgentBudget {
    int max_turns = 16;
    int max_retries = 5;
};

struct AgentTask {
    AgentRole role = AgentRole::translator;
    std::string prompt;
    fs::path workspace;
    std::vector<std::string> allowed_writes;  // globs relative to workspace
    AgentBudget budget;
};

enum class AgentStatus { success, gave_up, backend_error };

struct TokenUsage {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::uint64_t cached_tokens = 0;
};

struct Message {
    std::string role;  // "user" | "assistant" | "tool"
    std::string content;
};

struct AgentOutcome {
    AgentStatus status = AgentStatus::gave_up;
    int turns_used = 0;
    TokenUsage usage;
    std::vector<Message> transcript;
    std::string detail;  // backend_error reason, containment violation, ...
};

// Minimal glob: '*' matches within a path segment, "**" crosses segments.
inline bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.empty()) return path.empty();
    if (pattern.substr(0, 2) == "**") {
        std::string_view rest = pattern.substr(2);
        if (!rest.empty() && rest.front() == '/') {
            // "**/x" also matches "x" at the root
            if (glob_match(rest.substr(1), path)) return true;
        }
        for (std::size_t i = 0; i <= path.size(); ++i)
            if (glob_match(rest, path.substr(i))) return true;
        return false;
    }
    if (pattern.front() == '*') {
        for (std::size_t i = 0; i <= path.size(); ++i) {
            if (i < path.size() && path[i] == '/') break;
            if (glob_match(pattern.substr(1), path.substr(i))) return true;
        }
        return glob_match(pattern.substr(1), path.find('/') != std::string_view::npos
                                                 ? path.substr(path.find('/'))
                                                 : std::string_view{});
    }
    if (path.empty() || pattern.front() != path.front()) return false;
    return glob_match(pattern.substr(1), path.substr(1));
}

inline bool write_allowed(const std::vector<std::string>& globs, const std::string& rel) {
    for (const auto& g : globs)
        if (glob_match(g, rel)) return true;
    return false;
}

// --- Backends ----------------------------------------------------------------

class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual AgentOutcome run(const AgentTask& task) = 0;
};

/// Runs a task with filesystem write containment: any change outside
/// allowed_writes is rolled back and reported as backend_error.
inline AgentOutcome run_agent(const AgentTask& task, AgentBackend& backend) {
    if (!fs::is_directory(task.workspace))
        throw BackendError("workspace missing: " + task.workspace.string());
    if (task.allowed_writes.empty()) throw BackendError("allowed_writes must be nonempty");
    if (task.budget.max_turns < 1) throw BackendError("max_turns must be >= 1");

    auto before = snapshot_tree(task.workspace);
    AgentOutcome outcome = backend.run(task);
    auto after = snapshot_tree(task.workspace);

    std::vector<std::string> violations;
    for (const auto& [rel, content] : after) {
        auto it = before.find(rel);
        bool changed = it == before.end() || it->second != content;
        if (changed && !write_allowed(task.allowed_writes, rel)) violations.push_back(rel);
    }
    for (const auto& [rel, _] : before)
        if (!after.count(rel) && !write_allowed(task.allowed_writes, rel))
            violations.push_back(rel);

    if (!violations.empty()) {
        // restore the pre-task state wholesale
        for (const auto& rel : violations) {
            auto it = before.find(rel);
            if (it == before.end()) {
                std::error_code ec;
                fs::remove(task.workspace / rel, ec);
            } else {
                write_file_bytes(task.workspace / rel, it->second);
            }
        }
        outcome.status = AgentStatus::backend_error;
        outcome.detail = "write outside allowed_writes: " + violations.front();
    }
    return outcome;
}

// --- Scripted playback backend ------------------------------------------------

struct WriteFileAction {
    std::string path;  // relative to workspace
    Bytes content;
};
struct EmitTestsAction {
    std::vector<TestCase> tests;  // written under <workspace>/batch/<id>/
};
struct DeclareDoneAction {};
struct FailAction {};

using PlaybookAction =
    std::variant<WriteFileAction, EmitTestsAction, DeclareDoneAction, FailAction>;

struct Playbook {
    std::vector<PlaybookAction> actions;
    TokenUsage usage;  // synthetic usage attributed to the playback turn
};

/// Deterministic offline agent: consumes one playbook per task, replaying
/// its actions against the workspace.
class ScriptedBackend : public AgentBackend {
public:
    void enqueue(AgentRole role, Playbook pb) { queues_[role].push(std::move(pb)); }

    AgentOutcome run(const AgentTask& task) override {
        AgentOutcome out;
        out.usage = TokenUsage{};
        auto& q = queues_[task.role];
        out.transcript.push_back({"user", task.prompt});
        if (q.empty()) {
            out.status = AgentStatus::gave_up;
            out.turns_used = 1;
            out.detail = "playbook queue exhausted";
            return out;
        }
        Playbook pb = std::move(q.front());
        q.pop();
        out.usage = pb.usage;
        out.turns_used = 1;
        out.status = AgentStatus::gave_up;
        for (const auto& action : pb.actions) {
            if (const auto* w = std::get_if<WriteFileAction>(&action)) {
                write_file_bytes(task.workspace / w->path, w->content);
                out.transcript.push_back({"assistant", "write " + w->path});
            } else if (const auto* e = std::get_if<EmitTestsAction>(&action)) {
                for (const auto& tc : e->tests) {
                    fs::path dir = task.workspace / "batch" / tc.id;
                    if (fs::exists(dir)) fs::remove_all(dir);
                    write_test_case(tc, dir);
                }
                out.transcript.push_back({"assistant", "emit_tests"});
            } else if (std::holds_alternative<DeclareDoneAction>(action)) {
                out.status = AgentStatus::success;
                out.transcript.push_back({"assistant", "done"});
            } else {
                out.status = AgentStatus::gave_up;
                out.transcript.push_back({"assistant", "fail"});
            }
        }
        return out;
    }

    bool empty(AgentRole role) const {
        auto it = queues_.find(role);
        return it == queues_.end() || it->second.empty();
    }

private:
    std::map<AgentRole, std::queue<Playbook>> queues_;
};

// Playbook JSON:
//   {"usage": {"input": n, "output": n, "cached": n},
//    "actions": [{"op": "write_file", "path": "...", "content": "..."},
//                {"op": "write_file", "path": "...", "content_file": "rel/to/base"},
//                {"op": "emit_tests", "tests_dir": "rel/to/base"},
//                {"op": "declare_done"}, {"op": "fail"}]}
inline Playbook load_playbook(const fs::path& file, const fs::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file_bytes(file));
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("bad playbook " + file.string() + ": " + e.what());
    }
    Playbook pb;
    if (j.contains("usage")) {
        pb.usage.input_tokens = j["usage"].value("input", 0ull);
        pb.usage.output_tokens = j["usage"].value("output", 0ull);
        pb.usage.cached_tokens = j["usage"].value("cached", 0ull);
    }
    for (const auto& a : j.value("actions", nlohmann::json::array())) {
        std::string op = a.at("op").get<std::string>();
        if (op == "write_file") {
            WriteFileAction w;
            w.path = a.at("path").get<std::string>();
            if (a.contains("content_file"))
                w.content = read_file_bytes(base_dir / a["content_file"].get<std::string>());
            else
                w.content = a.at("content").get<std::string>();
            pb.actions.push_back(std::move(w));
        } else if (op == "emit_tests") {
            EmitTestsAction e;
            fs::path tests_dir = base_dir / a.at("tests_dir").get<std::string>();
            std::vector<fs::path> subdirs;
            for (const auto& d : fs::directory_iterator(tests_dir))
                if (d.is_directory()) subdirs.push_back(d.path());
            std::sort(subdirs.begin(), subdirs.end());
            for (const auto& d : subdirs) e.tests.push_back(parse_test_case(d));
            pb.actions.push_back(std::move(e));
        } else if (op == "declare_done") {
            pb.actions.push_back(DeclareDoneAction{});
        } else if (op == "fail") {
            pb.actions.push_back(FailAction{});
        } else {
            throw BackendError("unknown playbook op: " + op);
        }
    }
    return pb;
}

/// Fills a scripted backend from a directory of playbooks named
/// "<role>-<seq>.json" (e.g. translator-1.json); files queue up per role in
/// lexicographic order, with content_file/tests_dir paths resolved against
/// the directory itself.
inline void load_playbook_dir(ScriptedBackend& backend, const fs::path& dir) {
    if (!fs::is_directory(dir)) throw BackendError("playbook dir missing: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    bool any = false;
    for (const auto& f : files) {
        std::string stem = f.stem().string();
        std::optional<AgentRole> role;
        for (AgentRole r :
             {AgentRole::translator, AgentRole::discriminator, AgentRole::safety_fixer}) {
            std::string prefix = std::string(to_string(r)) + "-";
            if (stem.rfind(prefix, 0) == 0) role = r;
        }
        if (!role) continue;
        backend.enqueue(*role, load_playbook(f, dir));
        any = true;
    }
    if (!any) throw BackendError("no playbooks in " + dir.string());
}

// --- Cost ledger ---------------------------------------------------------------

struct Pricing {
    double input_per_token = 0.0;
    double output_per_token = 0.0;
    double cached_per_token = 0.0;
};

struct CostLedger {
    struct Entry {
        std::string role;
        int iteration = 0;
        TokenUsage usage;
        double cost_usd = 0.0;
    };
    std::vector<Entry> entries;

    TokenUsage total_usage() const {
        TokenUsage t;
        for (const auto& e : entries) {
            t.input_tokens += e.usage.input_tokens;
            t.output_tokens += e.usage.output_tokens;
            t.cached_tokens += e.usage.cached_tokens;
        }
        return t;
    }
    double total_cost() const {
        double c = 0;
        for (const auto& e : entries) c += e.cost_usd;
        return c;
    }
};

inline CostLedger record_usage(const AgentOutcome& outcome, CostLedger ledger,
                               const Pricing& pricing, const std::string& role = "",
                               int iteration = 0) {
    CostLedger::Entry e;
    e.role = role;
    e.iteration = iteration;
    e.usage = outcome.usage;
    e.cost_usd = static_cast<double>(outcome.usage.input_tokens) * pricing.input_per_token +
                 static_cast<double>(outcome.usage.output_tokens) * pricing.output_per_token +
                 static_cast<double>(outcome.usage.cached_tokens) * pricing.cached_per_token;
    ledger.entries.push_back(e);
    return ledger;
}

inline nlohmann::json ledger_to_json(const CostLedger& ledger) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : ledger.entries)
        entries.push_back({{"role", e.role},
                           {"iteration", e.iteration},
                           {"input_tokens", e.usage.input_tokens},
                           {"output_tokens", e.usage.output_tokens},
                           {"cached_tokens", e.usage.cached_tokens},
                           {"cost_usd", e.cost_usd}});
    TokenUsage t = ledger.total_usage();
    return {{"entries", entries},
            {"totals",
             {{"input_tokens", t.input_tokens},
              {"output_tokens", t.output_tokens},
              {"cached_tokens", t.cached_tokens},
              {"cost_usd", ledger.total_cost()}}}};
}

}  // namespace actor
