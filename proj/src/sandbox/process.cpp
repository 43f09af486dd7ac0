// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/sandbox/process.hpp"

#include "cotflow/util.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <optional>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace cotflow::sandbox {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kTimeoutExitCode = 124;
// How long to keep draining pipes held open by stray descendants after the
// main child exits.
constexpr auto kDrainGrace = std::chrono::milliseconds(200);

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(other.release()) {}
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) reset(other.release());
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    int release() { return std::exchange(fd_, -1); }
    void reset(int fd = -1) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_ = -1;
};

struct Pipe {
    Fd read;
    Fd write;
};

Pipe make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
        throw Error(ErrorCode::ExecutorFault, std::string("pipe: ") + std::strerror(errno));
    }
    return Pipe{Fd(fds[0]), Fd(fds[1])};
}

// Child side: never returns.
[[noreturn]] void exec_child(const std::string& command, const std::filesystem::path& workdir,
                             int out_fd, int err_fd, int status_fd) {
    ::setpgid(0, 0);
    auto fail = [status_fd](int stage) {
        const int payload[2] = {stage, errno};
        [[maybe_unused]] auto n = ::write(status_fd, payload, sizeof payload);
        ::_exit(127);
    };
    if (::dup2(out_fd, STDOUT_FILENO) < 0 || ::dup2(err_fd, STDERR_FILENO) < 0) fail(0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (::chdir(workdir.c_str()) != 0) fail(1);
    ::signal(SIGPIPE, SIG_DFL);
    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    ::execv("/bin/sh", const_cast<char* const*>(argv));
    fail(2);
    ::_exit(127);
}

bool drain(int fd, CappedBuffer& sink) {
    char buf[8192];
    while (true) {
        const ssize_t n = ::read(fd, buf, sizeof buf);
        if (n > 0) {
            sink.append(std::string_view(buf, static_cast<std::size_t>(n)));
            continue;
        }
        if (n == 0) return false;  // EOF
        if (errno == EINTR) continue;
        return true;  // EAGAIN: still open
    }
}

}  // namespace

CappedBuffer::CappedBuffer(std::size_t cap)
    : cap_(cap), head_cap_(cap / 2), tail_cap_(cap - cap / 2) {}

void CappedBuffer::append(std::string_view bytes) {
    total_ += bytes.size();
    if (head_.size() < head_cap_) {
        const std::size_t take = std::min(head_cap_ - head_.size(), bytes.size());
        head_.append(bytes.substr(0, take));
        bytes.remove_prefix(take);
    }
    if (bytes.empty() || tail_cap_ == 0) return;
    tail_.append(bytes);
    if (tail_.size() > 2 * tail_cap_) tail_.erase(0, tail_.size() - tail_cap_);
}

std::string CappedBuffer::str() const {
    std::string tail = tail_.size() > tail_cap_ ? tail_.substr(tail_.size() - tail_cap_) : tail_;
    const std::size_t kept = head_.size() + tail.size();
    if (kept == total_) return head_ + tail;

    const std::string marker =
        "\n[... " + std::to_string(total_ - kept) + " bytes omitted ...]\n";
    if (marker.size() >= cap_) return (head_ + tail).substr(0, cap_);
    std::string head = head_;
    std::size_t excess = head.size() + marker.size() + tail.size() - cap_;
    const std::size_t cut_head = std::min(head.size(), (excess + 1) / 2);
    head.resize(head.size() - cut_head);
    excess -= cut_head;
    tail.erase(0, std::min(tail.size(), excess));
    return head + marker + tail;
}

std::filesystem::path resolve_inside(const std::filesystem::path& workdir, std::string_view relative) {
    const std::filesystem::path rel(relative);
    if (relative.empty() || rel.is_absolute() || rel.has_root_name()) {
        throw Error(ErrorCode::PathEscape, "not a relative path: '" + std::string(relative) + "'");
    }
    for (const auto& part : rel) {
        if (part == "..") {
            throw Error(ErrorCode::PathEscape, "path leaves the working directory: " + rel.string());
        }
    }
    const auto base = std::filesystem::weakly_canonical(std::filesystem::absolute(workdir));
    const auto full = std::filesystem::weakly_canonical(base / rel);
    auto mismatch = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
    if (mismatch.first != base.end()) {
        throw Error(ErrorCode::PathEscape, "path resolves outside the working directory: " + rel.string());
    }
    return full;
}

std::filesystem::path write_inside(const std::filesystem::path& workdir, std::string_view relative,
                                   std::string_view content) {
    auto full = resolve_inside(workdir, relative);
    write_text_file(full, content);
    return full;
}

RunRecord execute(const std::string& command, const std::filesystem::path& workdir,
                  const ExecOptions& options) {
    std::error_code ec;
    if (!std::filesystem::is_directory(workdir, ec)) {
        throw Error(ErrorCode::ExecutorFault, "working directory does not exist: " + workdir.string());
    }

    Pipe out = make_pipe();
    Pipe err = make_pipe();
    Pipe status = make_pipe();

    const auto started = Clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) throw Error(ErrorCode::ExecutorFault, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) exec_child(command, workdir, out.write.get(), err.write.get(), status.write.get());

    ::setpgid(pid, pid);
    out.write.reset();
    err.write.reset();
    status.write.reset();

    // A successful exec closes the CLOEXEC status pipe without writing.
    int payload[2] = {0, 0};
    ssize_t got;
    do {
        got = ::read(status.read.get(), payload, sizeof payload);
    } while (got < 0 && errno == EINTR);
    if (got == static_cast<ssize_t>(sizeof payload)) {
        int wstatus = 0;
        ::waitpid(pid, &wstatus, 0);
        static constexpr const char* kStage[] = {"redirect", "chdir", "exec"};
        throw Error(ErrorCode::ExecutorFault,
                    std::string(kStage[payload[0] % 3]) + ": " + std::strerror(payload[1]));
    }

    ::fcntl(out.read.get(), F_SETFL, O_NONBLOCK);
    ::fcntl(err.read.get(), F_SETFL, O_NONBLOCK);

    CappedBuffer out_buf(options.capture_cap);
    CappedBuffer err_buf(options.capture_cap);
    bool out_open = true;
    bool err_open = true;
    bool exited = false;
    bool timed_out = false;
    int wstatus = 0;
    const auto deadline = started + options.timeout;
    std::optional<Clock::time_point> drain_deadline;

    while (out_open || err_open || !exited) {
        if (!exited) {
            const pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
            if (r == pid) {
                exited = true;
                drain_deadline = Clock::now() + kDrainGrace;
            }
        }
        const auto now = Clock::now();
        if (!exited && now >= deadline) {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &wstatus, 0);
            exited = true;
            timed_out = true;
            drain_deadline = Clock::now() + kDrainGrace;
        }
        if (exited && drain_deadline && now >= *drain_deadline) {
            ::kill(-pid, SIGKILL);
            if (out_open) out_open = drain(out.read.get(), out_buf);
            if (err_open) err_open = drain(err.read.get(), err_buf);
            break;
        }
        if (!out_open && !err_open) {
            if (!exited) {
                // Streams closed; block for the exit status within the deadline.
                const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
                ::usleep(static_cast<useconds_t>(std::min<long long>(wait.count(), 20) * 1000));
            }
            continue;
        }

        pollfd fds[2];
        nfds_t count = 0;
        if (out_open) fds[count++] = {out.read.get(), POLLIN, 0};
        if (err_open) fds[count++] = {err.read.get(), POLLIN, 0};
        ::poll(fds, count, 20);
        if (out_open) out_open = drain(out.read.get(), out_buf);
        if (err_open) err_open = drain(err.read.get(), err_buf);
    }
    if (exited && !timed_out) ::kill(-pid, SIGKILL);  // stray descendants

    RunRecord record;
    record.command = command;
    record.stdout_text = out_buf.str();
    record.stderr_text = err_buf.str();
    record.duration_s = std::chrono::duration<double>(Clock::now() - started).count();
    if (timed_out) {
        record.exit_code = kTimeoutExitCode;
        record.timed_out = true;
        record.outcome_tag = OutcomeTag::RunFail;
        record.note = "timed out after " +
                      format_fixed(std::chrono::duration<double>(options.timeout).count(), 3) + " s";
    } else if (WIFEXITED(wstatus)) {
        record.exit_code = WEXITSTATUS(wstatus);
    } else if (WIFSIGNALED(wstatus)) {
        record.exit_code = 128 + WTERMSIG(wstatus);
        record.note = "terminated by signal " + std::to_string(WTERMSIG(wstatus));
    } else {
        record.exit_code = 1;
    }
    return record;
}

}  // namespace cotflow::sandbox
