#include "bookcode/external_scorer.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>

#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace bookcode {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  throw ScorerError(what + ": " + std::strerror(errno));
}

}  // namespace

ExternalScorer::ExternalScorer(const std::string& command) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) sys_fail("socketpair");
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    sys_fail("fork");
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  to_child_ = fds[0];
  from_child_ = fds[0];

  nlohmann::json pong;
  try {
    pong = request({{"op", "ping"}});
  } catch (...) {
    shutdown_child();
    throw;
  }
  if (!pong.value("ok", false)) {
    shutdown_child();
    throw ScorerError("sidecar did not acknowledge ping");
  }
  window_ = pong.value("window", 0);
}

ExternalScorer::~ExternalScorer() { shutdown_child(); }

void ExternalScorer::shutdown_child() noexcept {
  if (to_child_ >= 0) {
    ::shutdown(to_child_, SHUT_WR);
    ::close(to_child_);
    to_child_ = from_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

nlohmann::json ExternalScorer::request(const nlohmann::json& req) const {
  std::lock_guard lock(mutex_);
  const std::string line = req.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(to_child_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("write to sidecar");
    }
    sent += static_cast<std::size_t>(n);
  }

  std::size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("read from sidecar");
    }
    if (n == 0) throw ScorerError("sidecar closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string reply = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);

  nlohmann::json out;
  try {
    out = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("malformed sidecar response: ") + e.what());
  }
  if (out.contains("error")) throw ScorerError("sidecar error: " + out["error"].dump());
  if (out.value("v", 0) != kProtocolVersion) {
    throw ScorerError("sidecar protocol version mismatch: " + reply);
  }
  return out;
}

std::vector<TokenId> ExternalScorer::tokenize(std::string_view word) const {
  if (word.empty()) throw std::invalid_argument("cannot tokenize an empty word");
  const std::string key(word);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = token_cache_.find(key); it != token_cache_.end()) return it->second;
  }
  auto ids = request({{"op", "tokenize"}, {"word", key}}).at("ids").get<std::vector<TokenId>>();
  if (ids.empty()) throw ScorerError("sidecar returned no tokens for '" + key + "'");
  std::lock_guard lock(mutex_);
  token_cache_.emplace(key, ids);
  return ids;
}

std::string ExternalScorer::detokenize(const std::vector<TokenId>& ids) const {
  return request({{"op", "detokenize"}, {"ids", ids}}).at("text").get<std::string>();
}

std::vector<double> ExternalScorer::score(
    const std::vector<TokenId>& context,
    const std::vector<std::vector<TokenId>>& continuations) const {
  if (continuations.empty()) return {};
  const auto reply =
      request({{"op", "score"}, {"context", context}, {"continuations", continuations}});
  auto out = reply.at("logprobs").get<std::vector<double>>();
  if (out.size() != continuations.size()) {
    throw ScorerError("sidecar returned " + std::to_string(out.size()) + " scores for " +
                      std::to_string(continuations.size()) + " continuations");
  }
  for (const double lp : out) {
    if (!std::isfinite(lp) || lp > 0.0) throw ScorerError("sidecar returned an invalid log probability");
  }
  return out;
}

std::vector<double> ExternalScorer::score_next(const ScorerState& state,
                                               std::span<const TokenId> tokens) const {
  std::vector<std::vector<TokenId>> conts;
  conts.reserve(tokens.size());
  for (const TokenId t : tokens) conts.push_back({t});
  return score(state.context, conts);
}

ScorerState ExternalScorer::advance(const ScorerState& state, TokenId token) const {
  ScorerState next = state;
  next.context.push_back(token);
  return next;
}

std::pair<ScorerState, double> ExternalScorer::extend(const ScorerState& state,
                                                      TokenId token) const {
  const double lp = score(state.context, {{token}}).front();
  return {advance(state, token), lp};
}

}  // namespace bookcode
