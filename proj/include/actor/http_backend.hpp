// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <httplib.h>

#include "actor/agents.hpp"
#include "actor/harness.hpp"

namespace actor {

struct HttpBackendConfig {
    std::string base_url;  // e.g. "http://localhost:8080"
    std::string api_path = "/v1/chat/completions";
    std::string api_key;
    std::string model;
    double command_timeout_s = 60.0;

    static HttpBackendConfig from_env() {
        HttpBackendConfig cfg;
        if (const char* v = ::getenv("ACTOR_API_BASE")) cfg.base_url = v;
        if (const char* v = ::getenv("ACTOR_API_KEY")) cfg.api_key = v;
        if (const char* v = ::getenv("ACTOR_MODEL")) cfg.model = v;
        return cfg;
    }
};

/// Chat-completions tool loop: the model edits the workspace through four
/// tools (read_file, write_file, run_command, finish), one tool call per
/// turn, until it finishes or the turn budget runs out.
class HttpBackend : public AgentBackend {
public:
    explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw BackendError("HttpBackend needs a base URL");
    }

    AgentOutcome run(const AgentTask& task) override {
        AgentOutcome out;
        nlohmann::json messages = nlohmann::json::array();
        messages.push_back({{"role", "system"}, {"content", system_prompt()}});
        messages.push_back({{"role", "user"}, {"content", task.prompt}});
        out.transcript.push_back({"user", task.prompt});

        httplib::Client client(cfg_.base_url);
        client.set_read_timeout(300, 0);

        for (int turn = 0; turn < task.budget.max_turns; ++turn) {
            out.turns_used = turn + 1;
            nlohmann::json req = {{"model", cfg_.model},
                                  {"messages", messages},
                                  {"tools", tool_schema()}};
            httplib::Headers headers;
            if (!cfg_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_key);
            auto res = client.Post(cfg_.api_path, headers, req.dump(), "application/json");
            if (!res || res->status != 200) {
                out.status = AgentStatus::backend_error;
                out.detail = res ? "http " + std::to_string(res->status) : "transport error";
                return out;
            }
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                out.status = AgentStatus::backend_error;
                out.detail = std::string("malformed response: ") + e.what();
                return out;
            }
            if (body.contains("usage")) {
                const auto& u = body["usage"];
                out.usage.input_tokens += u.value("prompt_tokens", 0ull);
                out.usage.output_tokens += u.value("completion_tokens", 0ull);
                if (u.contains("prompt_tokens_details"))
                    out.usage.cached_tokens +=
                        u["prompt_tokens_details"].value("cached_tokens", 0ull);
            }
            nlohmann::json msg;
            try {
                msg = body.at("choices").at(0).at("message");
            } catch (const nlohmann::json::exception&) {
                out.status = AgentStatus::backend_error;
                out.detail = "response without choices";
                return out;
            }
            messages.push_back(msg);
            if (msg.contains("content") && msg["content"].is_string())
                out.transcript.push_back({"assistant", msg["content"].get<std::string>()});

            if (!msg.contains("tool_calls") || msg["tool_calls"].empty()) {
                // a plain reply without a finish call does not end the task
                messages.push_back({{"role", "user"},
                                    {"content", "Use a tool, or call finish when done."}});
                continue;
            }
            for (const auto& call : msg["tool_calls"]) {
                std::string name = call.at("function").at("name").get<std::string>();
                nlohmann::json args;
                try {
                    args = nlohmann::json::parse(
                        call.at("function").value("arguments", "{}"));
                } catch (const nlohmann::json::exception&) {
                    args = nlohmann::json::object();
                }
                if (name == "finish") {
                    out.status = args.value("success", true) ? AgentStatus::success
                                                             : AgentStatus::gave_up;
                    return out;
                }
                std::string result = dispatch_tool(task, name, args);
                out.transcript.push_back({"tool", name + ": " + result.substr(0, 200)});
                messages.push_back({{"role", "tool"},
                                    {"tool_call_id", call.value("id", "")},
                                    {"content", result}});
            }
        }
        out.status = AgentStatus::gave_up;
        out.detail = "turn budget exhausted";
        return out;
    }

private:
    static std::string system_prompt() {
        return "You operate on a workspace directory through tools. Paths are "
               "relative to the workspace. Call finish when the task is complete "
               "(success=true) or when you cannot complete it (success=false).";
    }

    static nlohmann::json tool_schema() {
        auto tool = [](const char* name, const char* desc, nlohmann::json params) {
            return nlohmann::json{{"type", "function"},
                                  {"function",
                                   {{"name", name},
                                    {"description", desc},
                                    {"parameters",
                                     {{"type", "object"}, {"properties", params}}}}}};
        };
        return nlohmann::json::array({
            tool("read_file", "Read a file from the workspace",
                 {{"path", {{"type", "string"}}}}),
            tool("write_file", "Write a file in the workspace",
                 {{"path", {{"type", "string"}}}, {"content", {{"type", "string"}}}}),
            tool("run_command", "Run a program in the workspace; args as a list",
                 {{"program", {{"type", "string"}}},
                  {"args", {{"type", "array"}, {"items", {{"type", "string"}}}}}}),
            tool("finish", "End the task",
                 {{"success", {{"type", "boolean"}}}}),
        });
    }

    std::string dispatch_tool(const AgentTask& task, const std::string& name,
                              const nlohmann::json& args) {
        try {
            if (name == "read_file") {
                std::string rel = args.at("path").get<std::string>();
                if (!is_safe_rel_path(rel)) return "error: path escapes the workspace";
                return read_file_bytes(task.workspace / rel);
            }
            if (name == "write_file") {
                std::string rel = args.at("path").get<std::string>();
                if (!is_safe_rel_path(rel)) return "error: path escapes the workspace";
                // containment is re-checked by run_agent; refusing early gives
                // the model usable feedback
                if (!write_allowed(task.allowed_writes, rel))
                    return "error: writes to " + rel + " are not allowed";
                write_file_bytes(task.workspace / rel, args.at("content").get<std::string>());
                return "ok";
            }
            if (name == "run_command") {
                ProcessRequest req;
                std::string program = args.at("program").get<std::string>();
                req.program = program.find('/') != std::string::npos
                                  ? fs::path(program)
                                  : detail::which(program);
                for (const auto& a : args.value("args", nlohmann::json::array()))
                    req.argv.push_back(a.get<std::string>());
                req.cwd = task.workspace;
                req.env = detail::tool_env();
                req.wall_timeout_s = cfg_.command_timeout_s;
                ProcessResult r = run_process(req);
                return "exit=" + std::to_string(r.exit_code) + "\nstdout:\n" +
                       r.stdout_bytes.substr(0, 16384) + "\nstderr:\n" +
                       r.stderr_bytes.substr(0, 16384);
            }
            return "error: unknown tool " + name;
        } catch (const Error& e) {
            return std::string("error: ") + e.what();
        }
    }

    HttpBackendConfig cfg_;
};

/// Wraps an external agent CLI: the prompt goes to its stdin, the command
/// runs in the workspace, exit 0 means success.
class SubprocessBackend : public AgentBackend {
public:
    SubprocessBackend(fs::path program, std::vector<std::string> args,
                      double timeout_s = 3600.0)
        : program_(std::move(program)), args_(std::move(args)), timeout_s_(timeout_s) {}

    AgentOutcome run(const AgentTask& task) override {
        ProcessRequest req;
        req.program = program_;
        for (const auto& a : args_) req.argv.push_back(a);
        req.stdin_bytes = task.prompt;
        req.cwd = task.workspace;
        req.env = detail::tool_env();
        req.wall_timeout_s = timeout_s_;
        ProcessResult r = run_process(req);
        AgentOutcome out;
        out.turns_used = 1;
        out.transcript.push_back({"user", task.prompt});
        out.transcript.push_back({"assistant", r.stdout_bytes.substr(0, 65536)});
        if (r.timed_out || r.signaled) {
            out.status = AgentStatus::backend_error;
            out.detail = r.timed_out ? "agent command timed out" : "agent command crashed";
        } else {
            out.status = r.exit_code == 0 ? AgentStatus::success : AgentStatus::gave_up;
        }
        return out;
    }

private:
    fs::path program_;
    std::vector<std::string> args_;
    double timeout_s_;
};

}  // namespace actor
