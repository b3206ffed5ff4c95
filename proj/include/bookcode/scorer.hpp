#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bookcode {

using TokenId = std::int32_t;

/// Language-model context after consuming a token sequence. What the ids
/// mean is up to the scorer that produced it.
struct ScorerState {
  std::vector<TokenId> context;

  bool operator==(const ScorerState&) const = default;
};

/// Incremental language-model scoring used by the decoders.
///
/// Log probabilities are natural logs and never positive; the decoder's
/// pruning bound depends on that.
class Scorer {
 public:
  virtual ~Scorer() = default;

  /// Splits a candidate word (possibly several space-separated words) into
  /// model tokens. Throws std::invalid_argument for an empty word.
  virtual std::vector<TokenId> tokenize(std::string_view word) const = 0;

  virtual ScorerState begin() const = 0;

  /// Consumes one token, returning the new state and log P(token | state).
  virtual std::pair<ScorerState, double> extend(const ScorerState& state, TokenId token) const = 0;

  /// Log probabilities of several alternative next tokens. The default
  /// calls extend once per token; remote scorers override it to batch.
  virtual std::vector<double> score_next(const ScorerState& state,
                                         std::span<const TokenId> tokens) const;

  /// State after consuming a token, without scoring it.
  virtual ScorerState advance(const ScorerState& state, TokenId token) const;

  /// Whether concurrent calls from several threads are allowed.
  virtual bool thread_safe() const { return true; }
};

/// Log probability of a whole word sequence from the initial state.
double score_sequence(const Scorer& scorer, const std::vector<std::string>& words);

}  // namespace bookcode
