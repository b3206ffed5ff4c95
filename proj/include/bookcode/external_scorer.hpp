#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "bookcode/scorer.hpp"

namespace bookcode {

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scorer backed by a sidecar process speaking newline-delimited JSON on
/// stdin/stdout. Requests:
///
///   {"op":"ping"}
///   {"op":"tokenize","word":W}
///   {"op":"detokenize","ids":[...]}
///   {"op":"score","context":[...],"continuations":[[...],...]}
///
/// Every response carries "v":1. Scores are total log probabilities of
/// each continuation given the context, in request order. The state is
/// the full context; the sidecar truncates it to its own window.
class ExternalScorer final : public Scorer {
 public:
  static constexpr int kProtocolVersion = 1;

  /// Launches `command` through /bin/sh and pings it. Throws ScorerError
  /// if the process cannot start or does not answer.
  explicit ExternalScorer(const std::string& command);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  std::vector<TokenId> tokenize(std::string_view word) const override;
  ScorerState begin() const override { return {}; }
  std::pair<ScorerState, double> extend(const ScorerState& state, TokenId token) const override;
  std::vector<double> score_next(const ScorerState& state,
                                 std::span<const TokenId> tokens) const override;
  ScorerState advance(const ScorerState& state, TokenId token) const override;
  bool thread_safe() const override { return false; }

  /// Total log probabilities of multi-token continuations.
  std::vector<double> score(const std::vector<TokenId>& context,
                            const std::vector<std::vector<TokenId>>& continuations) const;
  std::string detokenize(const std::vector<TokenId>& ids) const;
  /// Context window reported by the sidecar's ping response, 0 if absent.
  int window() const { return window_; }

 private:
  nlohmann::json request(const nlohmann::json& req) const;
  void shutdown_child() noexcept;

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int window_ = 0;
  mutable std::string buffer_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::vector<TokenId>> token_cache_;
};

}  // namespace bookcode
