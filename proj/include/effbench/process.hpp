#pragma once

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace effbench {

// argv of an external command.
struct CommandSpec {
    std::vector<std::string> argv;

    // Splits shell-style: whitespace separates words, single and double
    // quotes group, backslash escapes. No expansion of any kind.
    static CommandSpec parse(std::string_view text);

    bool empty() const noexcept { return argv.empty(); }
    std::string to_string() const;

    friend bool operator==(const CommandSpec&, const CommandSpec&) = default;
};

struct SpawnOptions {
    std::filesystem::path working_dir;  // empty: inherit
    std::optional<std::uint64_t> memory_limit_bytes;
    // Best effort: a fresh network namespace when the kernel allows it.
    bool isolate_network = false;
};

struct ExitStatus {
    bool signaled = false;
    int code = 0;    // valid when !signaled
    int signal = 0;  // valid when signaled

    bool success() const noexcept { return !signaled && code == 0; }
    std::string describe() const;
};

// A child in its own process group with stdout and stderr piped back.
// The destructor kills and reaps a child that is still alive.
class ChildProcess {
public:
    using Clock = std::chrono::steady_clock;

    enum class ReadStatus { line, eof, deadline };

    // Throws Error if the program cannot be executed.
    static ChildProcess spawn(const CommandSpec& command, const SpawnOptions& options = {});

    ChildProcess(ChildProcess&& other) noexcept;
    ChildProcess& operator=(ChildProcess&&) = delete;
    ChildProcess(const ChildProcess&) = delete;
    ~ChildProcess();

    pid_t pid() const noexcept { return pid_; }

    // Next complete stdout line (without the newline). Drains stderr while
    // waiting. A trailing unterminated line is returned before eof.
    ReadStatus read_line(std::string& line, Clock::time_point deadline);

    // SIGKILL to the whole process group.
    void kill_group() noexcept;

    // Reaps the child, waiting at most `timeout`. nullopt if it is still
    // alive afterwards.
    std::optional<ExitStatus> wait_for(std::chrono::milliseconds timeout);

    // Captured stderr, truncated to a bounded size.
    const std::string& stderr_text() const noexcept { return err_; }

private:
    ChildProcess(pid_t pid, int out_fd, int err_fd) : pid_(pid), out_fd_(out_fd), err_fd_(err_fd) {}

    void drain(int fd, std::string& sink, bool bounded);
    void close_fds() noexcept;

    pid_t pid_ = -1;
    int out_fd_ = -1;
    int err_fd_ = -1;
    std::string out_buf_;
    std::string err_;
    bool reaped_ = false;
};

struct CaptureResult {
    ExitStatus status;
    std::string out;
    std::string err;
    bool timed_out = false;
};

// Runs a command to completion, killing it after `timeout_s` seconds.
CaptureResult run_capture(const CommandSpec& command, double timeout_s, const SpawnOptions& options = {});

}  // namespace effbench
