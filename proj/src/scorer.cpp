#include "bookcode/scorer.hpp"

namespace bookcode {

std::vector<double> Scorer::score_next(const ScorerState& state,
                                       std::span<const TokenId> tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const TokenId t : tokens) out.push_back(extend(state, t).second);
  return out;
}

ScorerState Scorer::advance(const ScorerState& state, TokenId token) const {
  return extend(state, token).first;
}

double score_sequence(const Scorer& scorer, const std::vector<std::string>& words) {
  ScorerState state = scorer.begin();
  double total = 0.0;
  for (const auto& w : words) {
    for (const TokenId t : scorer.tokenize(w)) {
      auto [next, lp] = scorer.extend(state, t);
      total += lp;
      state = std::move(next);
    }
  }
  return total;
}

}  // namespace bookcode
