#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bookcode/beta.hpp"
#include "bookcode/transcript.hpp"
#include "bookcode/wordbank.hpp"

namespace bookcode {

/// Sorted, deduplicated list of lowercase lemmas used to propose
/// candidates between anchors.
class ReferenceDict {
 public:
  ReferenceDict() = default;
  explicit ReferenceDict(std::vector<std::string> words);

  static ReferenceDict load(std::istream& is);

  std::span<const std::string> words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const;

  /// Words strictly between two bounds; an absent bound leaves that side open.
  std::span<const std::string> range(const std::optional<std::string>& lo,
                                     const std::optional<std::string>& hi) const;

 private:
  std::vector<std::string> words_;
};

/// One word per line; blank lines and '#' comments skipped.
std::vector<std::string> read_word_list(std::istream& is);

/// Reference words strictly between lo and hi. Throws std::domain_error
/// unless lo < hi.
std::vector<std::string> candidates_between(const std::string& lo, const std::string& hi,
                                            const ReferenceDict& ref);

enum class CandidateSource { WordbankExact, Interpolated, Inflection, EdgeCase, Literal };

const char* to_string(CandidateSource s);
CandidateSource candidate_source_from_string(std::string_view s);

struct Candidate {
  std::string word;
  double log_prob = 0.0;
  CandidateSource source = CandidateSource::Literal;
  // Lemma the word was generated from; equals word for base forms.
  std::string base;

  bool operator==(const Candidate&) const = default;
};

enum class SegmentKind { Literal, Exact, Interpolated, EdgeCase };

const char* to_string(SegmentKind k);
SegmentKind segment_kind_from_string(std::string_view s);

struct Segment {
  CipherToken token;
  SegmentKind kind = SegmentKind::Literal;
  std::vector<Candidate> candidates;
};

struct Lattice {
  std::vector<Segment> segments;

  double mean_candidates() const;
};

struct LatticeConfig {
  double sharpness = 5.0;
  std::string proper_noun = "america";
  // Fallback vocabulary for codes outside the alphabetic sections.
  std::vector<std::string> common_words;
  bool inflect = true;
  int jobs = 1;
};

// Floor for log probabilities of slices that underflow to zero.
inline constexpr double kMinLogProb = -700.0;

/// Splits each candidate's mass equally over its inflected forms, merging
/// duplicate words by summing probability. With a marker, only forms ending
/// in it are kept (falling back to all forms when none match).
std::vector<Candidate> expand_inflections(const std::vector<Candidate>& cands,
                                          const std::optional<std::string>& marker = std::nullopt);

Segment build_segment(const CipherToken& token, const Wordbank& wb, const ReferenceDict& ref,
                      const LatticeConfig& cfg);

Lattice build_lattice(std::span<const CipherToken> doc, const Wordbank& wb,
                      const ReferenceDict& ref, const LatticeConfig& cfg);

void write_lattice_json(std::ostream& os, const Lattice& lattice);
Lattice read_lattice_json(std::istream& is);

}  // namespace bookcode
