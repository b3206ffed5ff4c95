#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bookcode/transcript.hpp"

namespace bookcode {

enum class Section { Table, Dict };

/// Known cipher-to-plaintext mappings, split by code section. Table codes
/// within alpha_range and all dictionary indices are expected to be in
/// alphabetical order of their plaintext.
struct Wordbank {
  std::map<int, std::string> table_entries;
  std::map<int, std::string> dict_entries;
  std::pair<int, int> alpha_range{160, 1218};
  DictGeometry geometry;
  // Largest dictionary index; 780 pages of 58 words by default.
  int dict_extent = 44892;

  std::size_t size() const { return table_entries.size() + dict_entries.size(); }

  /// Exact hit for a code token (suffix ignored); empty string if unknown.
  std::string lookup(const CipherToken& token) const;

  /// Position of a code token within its section.
  std::pair<Section, int> position_of(const CipherToken& token) const;

  bool operator==(const Wordbank&) const = default;
};

struct WordbankConflict {
  Section section;
  int position;
  std::string kept;
  std::string rejected;
};

struct ExtractResult {
  Wordbank wordbank;
  std::vector<WordbankConflict> conflicts;
};

struct ParallelPair {
  CipherToken token;
  std::string plaintext;
};

/// Lowercases, drops punctuation and collapses internal whitespace.
std::string normalize_plaintext(std::string_view text);

ExtractResult extract_wordbank(const std::vector<ParallelPair>& pairs, Wordbank base = {});

struct MonotonicViolation {
  Section section;
  int lower_position;
  int upper_position;
  std::string lower_word;
  std::string upper_word;
};

std::vector<MonotonicViolation> check_monotonic(const Wordbank& wb);

/// True if inserting `word` at `position` keeps the section ordered.
bool insertion_keeps_order(const Wordbank& wb, Section section, int position,
                           const std::string& word);

struct Anchor {
  int position = 0;
  // Empty for a virtual anchor at the start or end of the section.
  std::string word;
};

struct AnchorPair {
  Anchor lower;
  Anchor upper;
  double m = 0.0;
  bool open_below = false;
  bool open_above = false;
};

struct ExactMatch {
  std::string word;
};

enum class EdgeCase { ProperNounSection, OutsideAlphabetic, NoAnchors };

using AnchorResult = std::variant<ExactMatch, AnchorPair, EdgeCase>;

/// Locates a code token relative to the known entries of its section.
/// Literal and sentence-end tokens throw std::invalid_argument.
AnchorResult anchors_for(const CipherToken& token, const Wordbank& wb);

const char* to_string(Section s);
const char* to_string(EdgeCase e);

void write_wordbank(std::ostream& os, const Wordbank& wb);
Wordbank read_wordbank(std::istream& is);

}  // namespace bookcode
