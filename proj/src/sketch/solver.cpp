#include "digits/sketch/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include "digits/core/error.hpp"

extern char** environ;

namespace digits::sketch {

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::sat: return "sat";
    case SolverStatus::unsat: return "unsat";
    case SolverStatus::unknown: return "unknown";
    case SolverStatus::timeout: return "timeout";
  }
  return "?";
}

namespace {

bool executable(const std::filesystem::path& p) {
  struct stat st {};
  return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

std::optional<std::string> resolve(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    if (executable(name)) return name;
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) return std::nullopt;
  std::string dirs(path);
  std::size_t start = 0;
  while (start <= dirs.size()) {
    const std::size_t end = std::min(dirs.find(':', start), dirs.size());
    const std::filesystem::path candidate = std::filesystem::path(dirs.substr(start, end - start)) / name;
    if (end > start && executable(candidate)) return candidate.string();
    start = end + 1;
  }
  return std::nullopt;
}

struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& s) : s_(s) {}

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw std::invalid_argument("unexpected end of solver output");
    SExpr e;
    if (s_[pos_] == '(') {
      ++pos_;
      e.is_list = true;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw std::invalid_argument("unbalanced solver output");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (s_[pos_] == ')') throw std::invalid_argument("unexpected ')' in solver output");
    const std::size_t start = pos_;
    if (s_[pos_] == '|') {
      pos_ = s_.find('|', pos_ + 1);
      if (pos_ == std::string::npos) throw std::invalid_argument("unterminated quoted symbol");
      ++pos_;
      e.atom = s_.substr(start + 1, pos_ - start - 2);
      return e;
    }
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')') {
      ++pos_;
    }
    e.atom = s_.substr(start, pos_ - start);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

double number_of(const SExpr& e) {
  if (!e.is_list) {
    char* end = nullptr;
    const double v = std::strtod(e.atom.c_str(), &end);
    if (e.atom.empty() || end != e.atom.c_str() + e.atom.size()) {
      throw std::invalid_argument("non-numeric model value '" + e.atom + "'");
    }
    return v;
  }
  if (e.items.empty() || e.items[0].is_list) throw std::invalid_argument("malformed model value");
  const std::string& op = e.items[0].atom;
  if (op == "-" && e.items.size() == 2) return -number_of(e.items[1]);
  if (op == "-" && e.items.size() == 3) return number_of(e.items[1]) - number_of(e.items[2]);
  if (op == "/" && e.items.size() == 3) return number_of(e.items[1]) / number_of(e.items[2]);
  if (op == "+" && e.items.size() == 3) return number_of(e.items[1]) + number_of(e.items[2]);
  if (op == "*" && e.items.size() == 3) return number_of(e.items[1]) * number_of(e.items[2]);
  throw std::invalid_argument("unsupported model value '" + op + "'");
}

}  // namespace

std::optional<std::string> find_solver(const std::string& requested) {
  if (!requested.empty()) return resolve(requested);
  if (const char* env = std::getenv("DIGITS_SOLVER"); env != nullptr && *env != '\0') return resolve(env);
  for (const char* name : {"z3", "cvc5", "cvc4"}) {
    if (auto p = resolve(name)) return p;
  }
  return std::nullopt;
}

std::vector<std::string> default_solver_args(const std::string& path) {
  const std::string base = std::filesystem::path(path).filename().string();
  if (base.starts_with("z3")) return {"-in", "-smt2"};
  if (base.starts_with("cvc")) return {"--lang=smt2"};
  return {};
}

std::map<std::string, double> parse_model(const std::string& text) {
  SExprReader reader(text);
  const SExpr root = reader.read();
  if (!root.is_list) throw std::invalid_argument("model is not a list");
  std::map<std::string, double> model;
  for (const auto& pair : root.items) {
    if (!pair.is_list || pair.items.size() != 2 || pair.items[0].is_list) {
      throw std::invalid_argument("malformed model entry");
    }
    model[pair.items[0].atom] = number_of(pair.items[1]);
  }
  return model;
}

SolverResult run_solver(const SolverConfig& config, const std::string& script,
                        const std::vector<std::string>& symbols) {
  const auto path = find_solver(config.path);
  if (!path) throw InfrastructureError("SMT solver '" + (config.path.empty() ? std::string("<auto>") : config.path) + "' not found");
  std::vector<std::string> args = config.args.empty() ? default_solver_args(*path) : config.args;

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) throw InfrastructureError("pipe: " + std::string(std::strerror(errno)));

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  std::vector<char*> argv;
  argv.push_back(const_cast<char*>(path->c_str()));
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, path->c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw InfrastructureError("cannot start solver " + *path + ": " + std::strerror(rc));
  }

  ::fcntl(in_pipe[1], F_SETFL, ::fcntl(in_pipe[1], F_GETFL) | O_NONBLOCK);
  ::signal(SIGPIPE, SIG_IGN);

  const auto deadline = start + std::chrono::milliseconds(config.timeout_ms);
  std::string output;
  std::size_t written = 0;
  int write_fd = in_pipe[1];
  bool timed_out = false;
  char buf[4096];
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (write_fd >= 0) fds[nfds++] = {write_fd, POLLOUT, 0};
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int ready = ::poll(fds, nfds, static_cast<int>(std::max<long long>(1, remaining)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (write_fd >= 0 && nfds > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(write_fd, script.data() + written, script.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN && errno != EINTR) written = script.size();
      if (written >= script.size()) {
        ::close(write_fd);
        write_fd = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
      if (n > 0) {
        output.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        break;
      }
    }
  }
  if (write_fd >= 0) ::close(write_fd);
  ::close(out_pipe[0]);
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }

  SolverResult result;
  result.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (timed_out) {
    result.status = SolverStatus::timeout;
    return result;
  }

  const std::size_t first = output.find_first_not_of(" \t\r\n");
  const std::size_t line_end = first == std::string::npos ? std::string::npos : output.find('\n', first);
  const std::string head = first == std::string::npos ? "" : output.substr(first, line_end - first);
  if (head == "unsat") {
    result.status = SolverStatus::unsat;
  } else if (head == "unknown") {
    result.status = SolverStatus::unknown;
  } else if (head == "sat") {
    result.status = SolverStatus::sat;
    if (!symbols.empty()) {
      try {
        result.model = parse_model(line_end == std::string::npos ? "" : output.substr(line_end));
      } catch (const std::invalid_argument& e) {
        result.status = SolverStatus::unknown;
        result.note = e.what();
      }
      for (const auto& s : symbols) {
        if (result.status == SolverStatus::sat && !result.model.contains(s)) {
          result.status = SolverStatus::unknown;
          result.note = "model lacks a value for " + s;
        }
      }
    }
  } else {
    throw InfrastructureError("solver " + *path + " failed: " + output.substr(0, 500));
  }
  return result;
}

}  // namespace digits::sketch
