#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bookcode/decoder.hpp"
#include "bookcode/lattice.hpp"
#include "bookcode/scorer.hpp"
#include "bookcode/transcript.hpp"
#include "bookcode/wordbank.hpp"

namespace bookcode {

// ---------------------------------------------------------------- text

/// Lowercase word tokens; runs of '.', '!', '?', ';' and ':' become one
/// "." token, other punctuation is dropped. Apostrophes inside words are
/// kept.
std::vector<std::string> tokenize_text(std::string_view text);

/// Splits on blank lines and tokenizes each paragraph; empty paragraphs
/// are dropped.
std::vector<std::vector<std::string>> tokenize_paragraphs(std::string_view text);

/// The k most frequent word tokens (excluding "."), most frequent first,
/// ties alphabetical.
std::vector<std::string> most_common_words(std::span<const std::vector<std::string>> docs,
                                           std::size_t k);

/// word -> 0-based position in a frequency-ordered list.
std::unordered_map<std::string, int> rank_map(std::span<const std::string> words);

// ----------------------------------------------------------- synthesis

struct SynthConfig {
  // Sorted lemma list standing in for the shared dictionary; word i
  // (0-based) sits at dictionary index i + 1.
  std::vector<std::string> key_dictionary;
  DictGeometry geometry;
  // Frequent words given table codes alpha_range.first, first + 1, ...
  // in alphabetical order.
  std::vector<std::string> table_words;
  std::pair<int, int> alpha_range{160, 1218};
};

struct GoldToken {
  std::string surface;
  // Word the code stands for; equals surface unless an inflection marker
  // carries the difference.
  std::string lemma;

  bool operator==(const GoldToken&) const = default;
};

struct SynthText {
  std::vector<CipherToken> cipher;
  std::vector<GoldToken> gold;
};

/// Precomputed encipherment tables for one configuration.
class SynthKey {
 public:
  explicit SynthKey(SynthConfig cfg);

  const SynthConfig& config() const { return cfg_; }

  /// Encodes one word: table code, dictionary code, lemma code plus
  /// marker (table before dictionary), else a literal. "." becomes a
  /// sentence end.
  std::pair<CipherToken, GoldToken> encode(const std::string& word) const;

  SynthText encipher(std::span<const std::string> words) const;

  /// Every table and dictionary mapping; deciphering with it is exact for
  /// words in the key.
  Wordbank full_wordbank() const;

  /// Empty wordbank carrying this key's geometry, range and extent.
  Wordbank empty_wordbank() const;

 private:
  SynthConfig cfg_;
  std::unordered_map<std::string, int> table_code_;
  std::unordered_map<std::string, int> dict_index_;
  // Inflected form -> lemma, for lemmas in the table or dictionary.
  std::unordered_map<std::string, std::string> table_lemma_;
  std::unordered_map<std::string, std::string> dict_lemma_;
};

/// Parallel (token, lemma) pairs for the first `word_tokens` non-"."
/// tokens of an enciphered text.
std::vector<ParallelPair> parallel_prefix(const SynthText& text, std::size_t word_tokens);

// ----------------------------------------------------------- metrics

struct Metrics {
  // Exact matches over code tokens (table and dictionary codes).
  double token_accuracy = 0.0;
  // Code tokens whose segment is a wordbank hit.
  double coverage = 0.0;
  double oracle_accuracy = 0.0;
  double mean_candidates = 0.0;
  std::size_t code_tokens = 0;
};

/// Accuracy and coverage of a path against gold surface words. Literal
/// segments are excluded unless `all_tokens` is set. Throws
/// std::domain_error on a length mismatch.
Metrics evaluate(const DecodePath& path, std::span<const std::string> gold, bool all_tokens = false);

std::vector<std::string> surfaces(std::span<const GoldToken> gold);

// ------------------------------------------------------- self-learning

struct SelfLearnConfig {
  int iterations = 3;
  double promote_fraction = 0.1;
  // Per-token lm + a * lattice a decoding must reach to be promoted.
  double min_confidence = -std::numeric_limits<double>::infinity();
};

struct SelfLearnRound {
  int round = 0;
  std::size_t wordbank_size = 0;
  std::size_t promoted = 0;
  std::size_t rejected = 0;
  double combined = 0.0;
  // Only when gold was supplied.
  double accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct SelfLearnResult {
  DecodePath path;
  Wordbank wordbank;
  std::vector<SelfLearnRound> rounds;
  double final_accuracy = std::numeric_limits<double>::quiet_NaN();
};

/// Decode, promote the most confident interpolated decodings into the
/// wordbank (skipping any that would break alphabetical order), rebuild,
/// repeat. Stops early when a round promotes nothing.
SelfLearnResult self_learn(std::span<const CipherToken> doc, Wordbank wb, const ReferenceDict& ref,
                           const Scorer& scorer, const LatticeConfig& lcfg,
                           const DecodeOptions& dopts, const SelfLearnConfig& cfg,
                           std::span<const std::string> gold = {});

// ----------------------------------------------------- data efficiency

struct EfficiencyRow {
  std::size_t requested_tokens = 0;
  std::size_t parallel_tokens = 0;  // after clamping
  std::size_t wordbank_size = 0;
  double coverage = 0.0;
  double accuracy = 0.0;
  double unigram_accuracy = 0.0;
  double oracle_accuracy = 0.0;
  double mean_candidates = 0.0;
  double runtime_seconds = 0.0;
};

struct EfficiencyReport {
  std::vector<EfficiencyRow> rows;
  std::vector<std::string> warnings;
};

struct EfficiencyInputs {
  const SynthKey* key = nullptr;
  std::span<const std::string> parallel_words;
  std::span<const std::string> test_words;
  const ReferenceDict* reference = nullptr;
  const Scorer* scorer = nullptr;
  LatticeConfig lattice;
  DecodeOptions decode;
  // Frequency-ordered list for the unigram baseline.
  std::vector<std::string> frequency_list;
  int jobs = 1;
};

/// For each size N, extracts a wordbank from the first N parallel word
/// tokens and deciphers the enciphered test text with it.
EfficiencyReport data_efficiency(std::span<const std::size_t> sizes, const EfficiencyInputs& in);

void write_efficiency_tsv(std::ostream& os, const EfficiencyReport& report);
void write_efficiency_json(std::ostream& os, const EfficiencyReport& report);

}  // namespace bookcode
