#include "wfshap/evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "httplib.h"
#include "json_util.hpp"
#include "wfshap/game_io.hpp"

extern char** environ;

namespace wfshap {

using detail::Json;

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  // A blank trailing line carries no response.
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

struct Fd {
  int fd = -1;
  Fd() = default;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

/// Blocks SIGPIPE for the calling thread and discards any that became pending.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
  }
  ~SigpipeGuard() {
    timespec zero{0, 0};
    while (sigtimedwait(&set_, nullptr, &zero) > 0) {
    }
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  sigset_t set_{};
  sigset_t old_{};
};

std::string errno_text() { return std::strerror(errno); }

}  // namespace

EvaluatorAdapter EvaluatorAdapter::parse(std::string_view text) {
  EvaluatorAdapter adapter;
  auto take = [&](std::string_view prefix) {
    if (text.substr(0, prefix.size()) != prefix) return false;
    adapter.target = std::string(text.substr(prefix.size()));
    return true;
  };
  if (take("subprocess:")) {
    adapter.kind = AdapterKind::kSubprocess;
  } else if (take("sim:")) {
    adapter.kind = AdapterKind::kSimulator;
  } else if (text.substr(0, 7) == "http://" || text.substr(0, 8) == "https://") {
    adapter.kind = AdapterKind::kHttp;
    adapter.target = std::string(text);
  } else if (take("http:")) {
    adapter.kind = AdapterKind::kHttp;
  } else {
    throw ValidationError("adapter '" + std::string(text) + "' must start with subprocess:, http:, or sim:");
  }
  adapter.validate();
  return adapter;
}

void EvaluatorAdapter::validate() const {
  if (target.empty()) throw ValidationError("evaluator adapter needs a target");
  if (timeout.count() <= 0) throw ValidationError("evaluator timeout must be positive");
  if (max_retries > 10) throw ValidationError("evaluator max_retries is capped at 10");
}

std::string format_request_line(const Coalition& coalition, const ComponentSet& components,
                                std::string_view task_id) {
  Json j = Json::object();
  j["coalition"] = member_labels(coalition, components);
  j["task_id"] = task_id;
  return j.dump();
}

SubprocessEvaluator::SubprocessEvaluator(EvaluatorAdapter adapter) : Evaluator(std::move(adapter)) {
  this->adapter().validate();
}

std::vector<std::string> SubprocessEvaluator::exchange(const std::vector<std::string>& request_lines) {
  const auto& cfg = adapter();
  const std::string input = join_lines(request_lines);
  const auto deadline = std::chrono::steady_clock::now() + cfg.timeout;

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw TransportError("pipe: " + errno_text());
  Fd child_in(in_pipe[0]);
  Fd to_child(in_pipe[1]);
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw TransportError("pipe: " + errno_text());
  Fd from_child(out_pipe[0]);
  Fd child_out(out_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_in.fd, STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_out.fd, STDOUT_FILENO);
  std::string shell = "sh";
  std::string flag = "-c";
  std::string command = cfg.target;
  char* argv[] = {shell.data(), flag.data(), command.data(), nullptr};
  pid_t pid = 0;
  const int spawn_rc = ::posix_spawnp(&pid, "sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (spawn_rc != 0) throw TransportError("cannot start evaluator '" + cfg.target + "': " + std::strerror(spawn_rc));
  child_in.reset();
  child_out.reset();

  SigpipeGuard sigpipe_guard;
  ::fcntl(to_child.fd, F_SETFL, ::fcntl(to_child.fd, F_GETFL) | O_NONBLOCK);
  ::fcntl(from_child.fd, F_SETFL, ::fcntl(from_child.fd, F_GETFL) | O_NONBLOCK);

  std::string output;
  std::size_t written = 0;
  if (input.empty()) to_child.reset();
  bool timed_out = false;
  char buffer[65536];
  while (from_child.fd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {from_child.fd, POLLIN, 0};
    if (to_child.fd >= 0) fds[count++] = {to_child.fd, POLLOUT, 0};
    const int rc = ::poll(fds, count, static_cast<int>(std::min<long long>(remaining, 1000)) + 1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError("poll: " + errno_text());
    }
    if (count == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP)) != 0) {
      const ssize_t n = ::write(to_child.fd, input.data() + written, input.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
        if (written == input.size()) to_child.reset();
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        // The child stopped reading; whatever it already wrote still counts.
        to_child.reset();
      }
    }
    if ((fds[0].revents & (POLLIN | POLLERR | POLLHUP)) != 0) {
      const ssize_t n = ::read(from_child.fd, buffer, sizeof buffer);
      if (n > 0) {
        output.append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0) {
        from_child.reset();
      } else if (errno != EAGAIN && errno != EINTR) {
        throw TransportError("reading evaluator output: " + errno_text());
      }
    }
  }
  to_child.reset();

  int status = 0;
  while (!timed_out) {
    const pid_t rc = ::waitpid(pid, &status, WNOHANG);
    if (rc == pid) break;
    if (rc < 0 && errno != EINTR) throw TransportError("waitpid: " + errno_text());
    if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    throw TransportError("evaluator '" + cfg.target + "' timed out after " + std::to_string(cfg.timeout.count()) +
                         " ms");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status) ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                              : "was killed by signal " + std::to_string(WTERMSIG(status));
    throw TransportError("evaluator '" + cfg.target + "' " + how);
  }
  return split_lines(output);
}

HttpEvaluator::HttpEvaluator(EvaluatorAdapter adapter) : Evaluator(std::move(adapter)) {
  this->adapter().validate();
  const std::string& url = this->adapter().target;
  if (url.rfind("https://", 0) == 0) throw ValidationError("https evaluators are not supported; use http://");
  if (url.rfind("http://", 0) != 0) throw ValidationError("http evaluator URL must start with http://");
  const auto slash = url.find('/', 7);
  base_ = slash == std::string::npos ? url : url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (base_.size() <= 7) throw ValidationError("http evaluator URL '" + url + "' has no host");
}

std::vector<std::string> HttpEvaluator::exchange(const std::vector<std::string>& request_lines) {
  const auto& cfg = adapter();
  httplib::Client client(base_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  auto response = client.Post(path_, join_lines(request_lines), "application/x-ndjson");
  if (!response) {
    throw TransportError("http evaluator " + cfg.target + ": " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw TransportError("http evaluator " + cfg.target + " answered status " + std::to_string(response->status));
  }
  return split_lines(response->body);
}

SimulatorEvaluator::SimulatorEvaluator(SyntheticGameSpec spec, ComponentSet components, std::uint64_t seed,
                                       EvaluatorAdapter adapter)
    : Evaluator(std::move(adapter)), spec_(std::move(spec)), components_(std::move(components)), seed_(seed) {
  spec_.validate();
  if (spec_.n != components_.size()) {
    throw ValidationError("simulator spec has n = " + std::to_string(spec_.n) + " but " +
                          std::to_string(components_.size()) + " components were given");
  }
}

std::string SimulatorEvaluator::respond(std::string_view request_line) const {
  Json request;
  try {
    request = detail::parse_strict(request_line, "request");
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what(), std::string(request_line));
  }
  if (!request.is_object() || !request.contains("task_id") || !request.at("task_id").is_string() ||
      !request.contains("coalition")) {
    throw ProtocolError("request needs 'task_id' and 'coalition'", std::string(request_line));
  }
  Coalition coalition;
  try {
    coalition = make_coalition(detail::string_list(request.at("coalition"), "coalition"), components_);
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("bad coalition in request: ") + e.what(), std::string(request_line));
  }
  const auto task_id = request.at("task_id").get<std::string>();
  Json response = Json::object();
  response["task_id"] = task_id;
  response["score"] = simulate_task_score(spec_, coalition, task_id, seed_);
  return response.dump();
}

std::vector<std::string> SimulatorEvaluator::exchange(const std::vector<std::string>& request_lines) {
  std::vector<std::string> out;
  out.reserve(request_lines.size());
  for (const auto& line : request_lines) out.push_back(respond(line));
  return out;
}

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorAdapter& adapter, const ComponentSet& components,
                                          std::uint64_t seed) {
  adapter.validate();
  switch (adapter.kind) {
    case AdapterKind::kSubprocess:
      return std::make_unique<SubprocessEvaluator>(adapter);
    case AdapterKind::kHttp:
      return std::make_unique<HttpEvaluator>(adapter);
    case AdapterKind::kSimulator:
      return std::make_unique<SimulatorEvaluator>(parse_spec_json(read_text_file(adapter.target)), components, seed,
                                                  adapter);
  }
  throw ValidationError("unknown adapter kind");
}

}  // namespace wfshap
