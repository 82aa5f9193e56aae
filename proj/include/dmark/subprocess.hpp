#pragma once

// Child-process line transport: spawns the model command with pipes on its
// standard streams. One restart is allowed after a crash; stderr is
// inherited so the child's diagnostics reach the operator.

#include <csignal>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "dmark/adapter.hpp"

namespace dmark {

class SubprocessTransport : public LineTransport {
 public:
  explicit SubprocessTransport(std::vector<std::string> argv) : argv_(std::move(argv)) {
    if (argv_.empty()) throw AdapterError("empty adapter command");
    // A dead child must surface as EPIPE on write, not kill this process.
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });
    spawn();
  }

  ~SubprocessTransport() override { teardown(); }

  void send(const std::string& line) override {
    if (!to_child_ || std::fputs(line.c_str(), to_child_) == EOF ||
        std::fputc('\n', to_child_) == EOF || std::fflush(to_child_) == EOF)
      throw AdapterError("write to model process failed");
  }

  bool receive(std::string& line) override {
    if (!from_child_) return false;
    line.clear();
    char* buffer = nullptr;
    std::size_t capacity = 0;
    const ssize_t n = ::getline(&buffer, &capacity, from_child_);
    if (n < 0) {
      std::free(buffer);
      return false;
    }
    line.assign(buffer, static_cast<std::size_t>(n));
    std::free(buffer);
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return true;
  }

  bool restart() override {
    teardown();
    try {
      spawn();
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }

  void shutdown() override {
    // Killing the child delivers EOF to a reader blocked in receive().
    if (pid_ > 0) ::kill(pid_, SIGKILL);
  }

  std::string describe() const override {
    std::string joined;
    for (const std::string& a : argv_) {
      if (!joined.empty()) joined += ' ';
      joined += a;
    }
    return "subprocess: " + joined;
  }

 private:
  void spawn() {
    int to_pipe[2];
    int from_pipe[2];
    if (::pipe(to_pipe) != 0) throw AdapterError("pipe() failed");
    if (::pipe(from_pipe) != 0) {
      ::close(to_pipe[0]);
      ::close(to_pipe[1]);
      throw AdapterError("pipe() failed");
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
      for (int fd : {to_pipe[0], to_pipe[1], from_pipe[0], from_pipe[1]}) ::close(fd);
      throw AdapterError("fork() failed");
    }
    if (pid == 0) {
      ::dup2(to_pipe[0], STDIN_FILENO);
      ::dup2(from_pipe[1], STDOUT_FILENO);
      for (int fd : {to_pipe[0], to_pipe[1], from_pipe[0], from_pipe[1]}) ::close(fd);
      std::vector<char*> args;
      for (const std::string& a : argv_) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      ::execvp(args[0], args.data());
      std::fprintf(stderr, "exec %s: %s\n", args[0], std::strerror(errno));
      ::_exit(127);
    }
    ::close(to_pipe[0]);
    ::close(from_pipe[1]);
    pid_ = pid;
    to_child_ = ::fdopen(to_pipe[1], "w");
    from_child_ = ::fdopen(from_pipe[0], "r");
    if (!to_child_ || !from_child_) {
      teardown();
      throw AdapterError("fdopen() failed");
    }
  }

  void teardown() {
    if (to_child_) {
      std::fclose(to_child_);  // child sees EOF and is expected to exit
      to_child_ = nullptr;
    }
    if (pid_ > 0) {
      int status = 0;
      if (::waitpid(pid_, &status, WNOHANG) == 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
      pid_ = -1;
    }
    if (from_child_) {
      std::fclose(from_child_);
      from_child_ = nullptr;
    }
  }

  std::vector<std::string> argv_;
  pid_t pid_ = -1;
  FILE* to_child_ = nullptr;
  FILE* from_child_ = nullptr;
};

} // namespace dmark
