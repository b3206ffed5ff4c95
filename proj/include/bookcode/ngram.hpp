#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bookcode/scorer.hpp"

namespace bookcode {

inline constexpr const char* kUnknownToken = "<unk>";
// Sentence boundaries are an ordinary vocabulary item; documents are
// padded with it on the left so every position has a full history.
inline constexpr const char* kSentenceEndToken = ".";

/// Interpolated Kneser-Ney n-gram model. The highest order uses raw counts;
/// lower orders use continuation counts (number of distinct left contexts).
/// The unigram level interpolates with a uniform distribution over the
/// vocabulary plus <unk>, so every token has non-zero probability.
class NGramModel {
 public:
  static constexpr int kMaxOrder = 8;
  static constexpr double kDefaultDiscount = 0.75;

  /// Throws std::domain_error for order outside 1..kMaxOrder or an empty corpus.
  static NGramModel train(const std::vector<std::vector<std::string>>& corpus, int order,
                          double discount = kDefaultDiscount);

  static NGramModel load(std::istream& is);
  void save(std::ostream& os) const;

  int order() const { return order_; }
  double discount() const { return discount_; }
  /// Vocabulary size including <unk>.
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  TokenId id(std::string_view word) const;
  TokenId unknown_id() const { return 0; }
  TokenId sentence_end_id() const;

  /// P(word | history); only the last order-1 history ids are used.
  double prob(std::span<const TokenId> history, TokenId word) const;
  double log_prob(std::span<const TokenId> history, TokenId word) const;

  /// Raw count of an n-gram of the highest order, or the continuation
  /// count for lower orders.
  double count(std::span<const TokenId> ngram) const;

 private:
  struct Key {
    std::array<TokenId, kMaxOrder> ids{};
    int size = 0;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct ContextStats {
    double total = 0.0;
    double types = 0.0;
  };

  static Key make_key(std::span<const TokenId> ids);
  void build_context_stats();
  double prob_at(int level, std::span<const TokenId> history, TokenId word) const;

  int order_ = 3;
  double discount_ = kDefaultDiscount;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  // counts_[k - 1]: k-gram -> count (raw at the top order, continuation below).
  std::vector<std::unordered_map<Key, double, KeyHash>> counts_;
  // context_[k - 1]: (k-1)-gram history -> sum and number of distinct followers.
  std::vector<std::unordered_map<Key, ContextStats, KeyHash>> context_;
};

/// Scorer adapter: each space-separated word is one token.
class NGramScorer final : public Scorer {
 public:
  explicit NGramScorer(std::shared_ptr<const NGramModel> model);

  std::vector<TokenId> tokenize(std::string_view word) const override;
  ScorerState begin() const override;
  std::pair<ScorerState, double> extend(const ScorerState& state, TokenId token) const override;
  ScorerState advance(const ScorerState& state, TokenId token) const override;

  const NGramModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NGramModel> model_;
};

/// exp of the mean negative log probability per token, each document scored
/// from the padded start state.
double perplexity(const NGramModel& model, const std::vector<std::vector<std::string>>& docs);

}  // namespace bookcode
