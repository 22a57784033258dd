#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "embedgauge/benchharness.hpp"
#include "embedgauge/errors.hpp"

extern char** environ;

namespace embedgauge::bench {

namespace {

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

ProviderProcess::ProviderProcess(const std::string& command, std::chrono::milliseconds timeout) : timeout_(timeout) {
    ignore_sigpipe();
    int in_pipe[2];   // parent -> child stdin
    int out_pipe[2];  // child stdout -> parent
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw IoError(std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char**>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw ProviderDiedError("failed to launch provider: " + std::string(std::strerror(rc)), command);
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

ProviderProcess::~ProviderProcess() {
    if (to_child_ >= 0) ::close(to_child_);
    // Closing stdin lets a well-behaved provider exit on EOF; force it otherwise.
    reap(false);
    if (from_child_ >= 0) ::close(from_child_);
}

void ProviderProcess::reap(bool force) {
    if (reaped_ || pid_ <= 0) return;
    int status = 0;
    for (int i = 0; i < 50 && !force; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
            reaped_ = true;
            return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    reaped_ = true;
}

bool ProviderProcess::running() {
    if (reaped_) return false;
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) reaped_ = true;
    return !reaped_;
}

void ProviderProcess::write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ProviderDiedError(std::string("provider closed its input: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::string ProviderProcess::read_line() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw ProtocolError("provider response timed out");
        pollfd pfd{from_child_, POLLIN, 0};
        const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw IoError(std::string("poll: ") + std::strerror(errno));
        }
        if (pr == 0) continue;
        char chunk[65536];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ProviderDiedError(std::string("reading from provider: ") + std::strerror(errno));
        }
        if (n == 0) throw ProviderDiedError("provider exited (end of output stream)");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string ProviderProcess::round_trip(const std::string& line) {
    write_all(!line.empty() && line.back() == '\n' ? line : line + '\n');
    return read_line();
}

}  // namespace embedgauge::bench
