#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bookcode/lattice.hpp"
#include "bookcode/scorer.hpp"

namespace testing {

// splitmix64 finalizer
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Scores depend on the previous two tokens through a seeded hash. Not a
// normalized model, but every value is finite and negative, which is all
// the decoder relies on.
class MockScorer final : public bookcode::Scorer {
 public:
  explicit MockScorer(std::uint64_t seed, std::vector<std::string> vocab = {}) : seed_(seed) {
    for (auto& w : vocab) add(w);
  }

  bookcode::TokenId add(const std::string& piece) {
    auto [it, inserted] = ids_.try_emplace(piece, static_cast<bookcode::TokenId>(ids_.size() + 1));
    return it->second;
  }

  std::vector<bookcode::TokenId> tokenize(std::string_view word) const override {
    if (word.empty()) throw std::invalid_argument("empty word");
    std::vector<bookcode::TokenId> out;
    std::istringstream ss{std::string(word)};
    std::string piece;
    while (ss >> piece) {
      auto it = ids_.find(piece);
      if (it == ids_.end()) throw std::out_of_range("mock vocabulary lacks '" + piece + "'");
      out.push_back(it->second);
    }
    return out;
  }

  bookcode::ScorerState begin() const override { return {{0, 0}}; }

  std::pair<bookcode::ScorerState, double> extend(const bookcode::ScorerState& s,
                                                  bookcode::TokenId t) const override {
    const auto n = s.context.size();
    std::uint64_t h = mix(seed_);
    h = mix(h ^ static_cast<std::uint64_t>(s.context[n - 2]));
    h = mix(h ^ static_cast<std::uint64_t>(s.context[n - 1]) << 1);
    h = mix(h ^ static_cast<std::uint64_t>(t) << 2);
    const double lp = -0.05 - static_cast<double>(h % 4000) / 500.0;
    return {{{s.context[n - 1], t}}, lp};
  }

 private:
  std::uint64_t seed_;
  std::unordered_map<std::string, bookcode::TokenId> ids_;
};

// Words drawn from a small pool so that candidates share prefixes, repeat
// across segments and sometimes span two tokens.
inline const std::vector<std::string>& mock_pool() {
  static const std::vector<std::string> pool = {"a",     "b",     "c",   "d",   "e",  "f",
                                                "a b",   "a c",   "b a", "c d", "e f", "f a",
                                                "a b c", "d e",   "b b", "c c"};
  return pool;
}

inline std::vector<std::string> mock_tokens() { return {"a", "b", "c", "d", "e", "f"}; }

inline bookcode::Lattice random_lattice(std::mt19937_64& rng, int max_segments,
                                        int max_candidates) {
  using namespace bookcode;
  Lattice lat;
  const auto& pool = mock_pool();
  std::uniform_int_distribution<int> nseg(0, max_segments), ncand(1, max_candidates);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  const int segments = nseg(rng);
  for (int s = 0; s < segments; ++s) {
    Segment seg;
    seg.token = TableCode{200 + s, {}};
    const int k = ncand(rng);
    seg.kind = k == 1 ? SegmentKind::Exact : SegmentKind::Interpolated;
    std::vector<std::string> words;
    while (static_cast<int>(words.size()) < k) {
      auto w = pool[pick(rng)];
      if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
    std::vector<double> p(k);
    double total = 0;
    for (auto& x : p) total += x = weight(rng);
    for (int c = 0; c < k; ++c) {
      seg.candidates.push_back({words[c], std::log(p[c] / total),
                                k == 1 ? CandidateSource::WordbankExact : CandidateSource::Interpolated,
                                words[c]});
    }
    lat.segments.push_back(std::move(seg));
  }
  return lat;
}

}  // namespace testing
