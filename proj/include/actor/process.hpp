// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "actor/bytes.hpp"
#include "actor/error.hpp"

namespace actor {

struct ProcessResult {
    Bytes stdout_bytes;
    Bytes stderr_bytes;
    int exit_code = 0;      // 128+signal when signaled
    bool signaled = false;  // terminated by a signal (not the timeout kill)
    int term_signal = 0;
    bool timed_out = false;
    bool output_truncated = false;
};

struct ProcessRequest {
    fs::path program;              // absolute path to the binary
    std::vector<Bytes> argv;       // excludes argv[0]
    Bytes stdin_bytes;
    std::map<std::string, std::string> env;  // full environment
    fs::path cwd;
    double wall_timeout_s = 10.0;
    std::size_t max_output_bytes = 8u << 20;
};

namespace detail {

inline void set_cloexec(int fd) { fcntl(fd, F_SETFD, FD_CLOEXEC); }

}  // namespace detail

// Runs a program to completion with piped stdio. The child gets its own
// process group so the timeout kill reaps grandchildren too.
inline ProcessResult run_process(const ProcessRequest& req) {
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw SandboxFailure("pipe() failed");

    std::vector<std::string> argv_store;
    argv_store.push_back(req.program.string());
    for (const auto& a : req.argv) argv_store.push_back(a);
    std::vector<char*> argv_ptrs;
    for (auto& s : argv_store) argv_ptrs.push_back(s.data());
    argv_ptrs.push_back(nullptr);

    std::vector<std::string> env_store;
    for (const auto& [k, v] : req.env) env_store.push_back(k + "=" + v);
    std::vector<char*> env_ptrs;
    for (auto& s : env_store) env_ptrs.push_back(s.data());
    env_ptrs.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) throw SandboxFailure("fork() failed");
    if (pid == 0) {
        setpgid(0, 0);
        if (!req.cwd.empty() && chdir(req.cwd.c_str()) != 0) _exit(127);
        dup2(in_pipe[0], 0);
        dup2(out_pipe[1], 1);
        dup2(err_pipe[1], 2);
        close(in_pipe[0]); close(in_pipe[1]);
        close(out_pipe[0]); close(out_pipe[1]);
        close(err_pipe[0]); close(err_pipe[1]);
        execve(req.program.c_str(), argv_ptrs.data(), env_ptrs.data());
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    int in_fd = in_pipe[1], out_fd = out_pipe[0], err_fd = err_pipe[0];
    fcntl(in_fd, F_SETFL, O_NONBLOCK);
    fcntl(out_fd, F_SETFL, O_NONBLOCK);
    fcntl(err_fd, F_SETFL, O_NONBLOCK);
    // the child may exit without draining stdin
    signal(SIGPIPE, SIG_IGN);

    ProcessResult res;
    std::size_t stdin_off = 0;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(req.wall_timeout_s));

    auto drain = [&](int& fd, Bytes& sink) {
        char buf[65536];
        for (;;) {
            ssize_t n = read(fd, buf, sizeof buf);
            if (n > 0) {
                std::size_t room = req.max_output_bytes > sink.size()
                                       ? req.max_output_bytes - sink.size()
                                       : 0;
                if (static_cast<std::size_t>(n) > room) {
                    sink.append(buf, room);
                    res.output_truncated = true;
                } else {
                    sink.append(buf, static_cast<std::size_t>(n));
                }
            } else if (n == 0) {
                close(fd);
                fd = -1;
                return;
            } else {
                return;  // EAGAIN or error; retry next poll round
            }
        }
    };

    bool killed = false;
    while (out_fd >= 0 || err_fd >= 0) {
        struct pollfd fds[3];
        int nfds = 0;
        int in_idx = -1, out_idx = -1, err_idx = -1;
        if (in_fd >= 0) {
            if (stdin_off >= req.stdin_bytes.size()) {
                close(in_fd);
                in_fd = -1;
            } else {
                in_idx = nfds;
                fds[nfds++] = {in_fd, POLLOUT, 0};
            }
        }
        if (out_fd >= 0) { out_idx = nfds; fds[nfds++] = {out_fd, POLLIN, 0}; }
        if (err_fd >= 0) { err_idx = nfds; fds[nfds++] = {err_fd, POLLIN, 0}; }

        auto now = std::chrono::steady_clock::now();
        int timeout_ms = killed ? 1000
                                : static_cast<int>(std::max<long long>(
                                      0, std::chrono::duration_cast<std::chrono::milliseconds>(
                                             deadline - now)
                                             .count()));
        int rc = poll(fds, static_cast<nfds_t>(nfds), timeout_ms);
        if (rc < 0 && errno != EINTR) break;
        if (rc == 0) {
            if (!killed) {
                kill(-pid, SIGKILL);
                res.timed_out = true;
                killed = true;
            } else {
                break;  // pipes held open by an orphan; give up draining
            }
            continue;
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t n = write(in_fd, req.stdin_bytes.data() + stdin_off,
                              req.stdin_bytes.size() - stdin_off);
            if (n > 0) {
                stdin_off += static_cast<std::size_t>(n);
            } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                close(in_fd);
                in_fd = -1;
            }
            if (in_fd >= 0 && stdin_off >= req.stdin_bytes.size()) {
                close(in_fd);
                in_fd = -1;
            }
        }
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) drain(out_fd, res.stdout_bytes);
        if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) drain(err_fd, res.stderr_bytes);
        // truncation cap reached on both channels: stop the process
        if (res.output_truncated && !killed &&
            res.stdout_bytes.size() >= req.max_output_bytes) {
            kill(-pid, SIGKILL);
            killed = true;
        }
    }
    if (in_fd >= 0) close(in_fd);
    if (out_fd >= 0) close(out_fd);
    if (err_fd >= 0) close(err_fd);

    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw SandboxFailure("waitpid() failed");
    if (res.timed_out) {
        res.exit_code = kTimeoutExitCode;
    } else if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        res.signaled = true;
        res.term_signal = WTERMSIG(status);
        res.exit_code = 128 + res.term_signal;
    }
    return res;
}

}  // namespace actor
