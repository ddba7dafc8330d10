#include "effbench/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "effbench/errors.hpp"

namespace effbench {

namespace {

constexpr std::size_t kStderrCap = 64 * 1024;

void set_cloexec(int fd) { ::fcntl(fd, F_SETFD, ::fcntl(fd, F_GETFD) | FD_CLOEXEC); }

}  // namespace

// ---------------------------------------------------------------- CommandSpec

CommandSpec CommandSpec::parse(std::string_view text) {
    CommandSpec spec;
    std::string word;
    bool in_word = false;
    char quote = '\0';
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quote != '\0') {
            if (c == quote) {
                quote = '\0';
            } else if (c == '\\' && quote == '"' && i + 1 < text.size()) {
                word.push_back(text[++i]);
            } else {
                word.push_back(c);
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            in_word = true;
        } else if (c == '\\' && i + 1 < text.size()) {
            word.push_back(text[++i]);
            in_word = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_word) spec.argv.push_back(std::move(word));
            word.clear();
            in_word = false;
        } else {
            word.push_back(c);
            in_word = true;
        }
    }
    if (quote != '\0') throw ParseError("unterminated quote in command '" + std::string(text) + "'");
    if (in_word) spec.argv.push_back(std::move(word));
    return spec;
}

std::string CommandSpec::to_string() const {
    std::string out;
    for (const auto& a : argv) {
        if (!out.empty()) out.push_back(' ');
        bool plain = !a.empty() && a.find_first_of(" \t\n'\"\\") == std::string::npos;
        if (plain) {
            out += a;
        } else {
            out.push_back('\'');
            for (char c : a) {
                if (c == '\'') out += "'\\''";
                else out.push_back(c);
            }
            out.push_back('\'');
        }
    }
    return out;
}

std::string ExitStatus::describe() const {
    if (signaled) return "killed by signal " + std::to_string(signal);
    return "exit code " + std::to_string(code);
}

// ---------------------------------------------------------------- ChildProcess

ChildProcess ChildProcess::spawn(const CommandSpec& command, const SpawnOptions& options) {
    if (command.empty()) throw Error("cannot spawn an empty command");

    int out_pipe[2], err_pipe[2], exec_pipe[2];
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0 || ::pipe(exec_pipe) != 0) {
        throw Error(std::string("pipe: ") + std::strerror(errno));
    }
    set_cloexec(exec_pipe[1]);

    // Everything the child touches is prepared before fork.
    std::vector<char*> argv;
    argv.reserve(command.argv.size() + 1);
    for (const auto& a : command.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    std::string workdir = options.working_dir.string();

    pid_t pid = ::fork();
    if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        // Child: only async-signal-safe calls from here on.
        ::setpgid(0, 0);
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        ::close(exec_pipe[0]);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        if (options.isolate_network) {
            if (::unshare(CLONE_NEWNET) != 0) ::unshare(CLONE_NEWUSER | CLONE_NEWNET);
        }
        if (options.memory_limit_bytes) {
            struct rlimit lim{};
            lim.rlim_cur = lim.rlim_max = *options.memory_limit_bytes;
            ::setrlimit(RLIMIT_AS, &lim);
        }
        if (!workdir.empty() && ::chdir(workdir.c_str()) != 0) {
            int err = errno;
            [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof err);
            ::_exit(127);
        }
        ::execvp(argv[0], argv.data());
        int err = errno;
        [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof err);
        ::_exit(127);
    }

    ::setpgid(pid, pid);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::close(exec_pipe[1]);
    set_cloexec(out_pipe[0]);
    set_cloexec(err_pipe[0]);

    int child_errno = 0;
    ssize_t got;
    do {
        got = ::read(exec_pipe[0], &child_errno, sizeof child_errno);
    } while (got < 0 && errno == EINTR);
    ::close(exec_pipe[0]);

    ChildProcess child(pid, out_pipe[0], err_pipe[0]);
    if (got > 0) {
        child.wait_for(std::chrono::milliseconds(1000));
        throw Error("cannot execute '" + command.argv.front() + "': " + std::strerror(child_errno));
    }
    return child;
}

ChildProcess::ChildProcess(ChildProcess&& other) noexcept
    : pid_(other.pid_),
      out_fd_(other.out_fd_),
      err_fd_(other.err_fd_),
      out_buf_(std::move(other.out_buf_)),
      err_(std::move(other.err_)),
      reaped_(other.reaped_) {
    other.pid_ = -1;
    other.out_fd_ = -1;
    other.err_fd_ = -1;
    other.reaped_ = true;
}

ChildProcess::~ChildProcess() {
    if (pid_ > 0 && !reaped_) {
        kill_group();
        wait_for(std::chrono::milliseconds(2000));
    }
    close_fds();
}

void ChildProcess::close_fds() noexcept {
    if (out_fd_ >= 0) ::close(out_fd_);
    if (err_fd_ >= 0) ::close(err_fd_);
    out_fd_ = err_fd_ = -1;
}

void ChildProcess::drain(int fd, std::string& sink, bool bounded) {
    char buf[8192];
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n > 0) {
        if (!bounded) {
            sink.append(buf, static_cast<std::size_t>(n));
        } else if (sink.size() < kStderrCap) {
            sink.append(buf, std::min(static_cast<std::size_t>(n), kStderrCap - sink.size()));
        }
        return;
    }
    if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        ::close(fd);
        (fd == out_fd_ ? out_fd_ : err_fd_) = -1;
    }
}

ChildProcess::ReadStatus ChildProcess::read_line(std::string& line, Clock::time_point deadline) {
    while (true) {
        auto nl = out_buf_.find('\n');
        if (nl != std::string::npos) {
            line.assign(out_buf_, 0, nl);
            out_buf_.erase(0, nl + 1);
            return ReadStatus::line;
        }
        if (out_fd_ < 0) {
            if (!out_buf_.empty()) {
                line = std::move(out_buf_);
                out_buf_.clear();
                return ReadStatus::line;
            }
            // Collect the rest of stderr so diagnostics are complete.
            while (err_fd_ >= 0) {
                pollfd p{err_fd_, POLLIN, 0};
                auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
                if (left <= 0 || ::poll(&p, 1, static_cast<int>(left)) <= 0) break;
                drain(err_fd_, err_, true);
            }
            return ReadStatus::eof;
        }

        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) return ReadStatus::deadline;

        pollfd fds[2];
        nfds_t count = 0;
        fds[count++] = {out_fd_, POLLIN, 0};
        if (err_fd_ >= 0) fds[count++] = {err_fd_, POLLIN, 0};
        int rc = ::poll(fds, count, static_cast<int>(std::min<long long>(left, 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("poll: ") + std::strerror(errno));
        }
        for (nfds_t i = 0; i < count; ++i) {
            if (fds[i].revents == 0) continue;
            if (fds[i].fd == out_fd_) drain(out_fd_, out_buf_, false);
            else drain(err_fd_, err_, true);
        }
    }
}

void ChildProcess::kill_group() noexcept {
    if (pid_ > 0 && !reaped_) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
    }
}

std::optional<ExitStatus> ChildProcess::wait_for(std::chrono::milliseconds timeout) {
    if (pid_ <= 0) return std::nullopt;
    auto deadline = Clock::now() + timeout;
    while (true) {
        int status = 0;
        pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_) {
            reaped_ = true;
            ExitStatus es;
            if (WIFSIGNALED(status)) {
                es.signaled = true;
                es.signal = WTERMSIG(status);
            } else {
                es.code = WEXITSTATUS(status);
            }
            return es;
        }
        if (r < 0 && errno != EINTR) {
            reaped_ = true;
            return ExitStatus{true, 0, 0};
        }
        if (Clock::now() >= deadline) return std::nullopt;
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
}

// ---------------------------------------------------------------- run_capture

CaptureResult run_capture(const CommandSpec& command, double timeout_s, const SpawnOptions& options) {
    auto child = ChildProcess::spawn(command, options);
    auto deadline = ChildProcess::Clock::now() +
                    std::chrono::duration_cast<ChildProcess::Clock::duration>(std::chrono::duration<double>(timeout_s));
    CaptureResult result;
    std::string line;
    while (true) {
        auto st = child.read_line(line, deadline);
        if (st == ChildProcess::ReadStatus::line) {
            result.out += line;
            result.out.push_back('\n');
            continue;
        }
        if (st == ChildProcess::ReadStatus::deadline) {
            result.timed_out = true;
            child.kill_group();
        }
        break;
    }
    auto status = child.wait_for(std::chrono::milliseconds(result.timed_out ? 5000 : 60000));
    if (!status) {
        child.kill_group();
        status = child.wait_for(std::chrono::milliseconds(5000));
        if (!status) throw HarnessError("child process " + std::to_string(child.pid()) + " could not be reaped");
    }
    result.status = *status;
    result.err = child.stderr_text();
    return result;
}

}  // namespace effbench
