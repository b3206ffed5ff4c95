#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bookcode/lattice.hpp"
#include "bookcode/scorer.hpp"

namespace bookcode {

struct PathStep {
  std::string cipher;  // rendered token
  std::string word;
  std::string base;
  CandidateSource source = CandidateSource::Literal;
  SegmentKind kind = SegmentKind::Literal;
  double lm = 0.0;
  double lattice = 0.0;

  bool operator==(const PathStep&) const = default;
};

struct DecodePath {
  std::vector<PathStep> steps;
  double lm_score = 0.0;
  double lattice_score = 0.0;
  double combined = 0.0;
  std::size_t beam = 0;
  double lattice_weight = 1.0;
  double runtime_seconds = 0.0;

  std::vector<std::string> words() const;
};

struct DecodeOptions {
  std::size_t beam = 4;
  double lattice_weight = 1.0;
  // Share token prefixes between candidates and prune whole subtrees at
  // once. Results are identical either way.
  bool use_trie = true;
};

/// Beam search synchronized at segment boundaries. Throws
/// std::invalid_argument for beam 0, a non-positive weight, or an empty
/// segment.
DecodePath beam_decode(const Lattice& lattice, const Scorer& scorer, const DecodeOptions& opts = {});

inline constexpr double kExhaustiveLimit = 1e6;

/// Full enumeration. Throws std::length_error when the number of paths
/// exceeds kExhaustiveLimit.
DecodePath exhaustive_decode(const Lattice& lattice, const Scorer& scorer,
                             double lattice_weight = 1.0);

/// Per segment, the candidate with the best (lowest) frequency rank;
/// unlisted words rank after all listed ones. Ties go to the higher lattice
/// probability, then the alphabetically smaller word. No LM is involved.
DecodePath unigram_decode(const Lattice& lattice, const std::unordered_map<std::string, int>& rank);

struct OracleResult {
  DecodePath path;
  // Fraction of segments whose gold word is among the candidates.
  double in_lattice_rate = 0.0;
};

/// Picks the gold word wherever the lattice offers it, else the most
/// probable candidate. Throws std::domain_error on a length mismatch.
OracleResult oracle_decode(const Lattice& lattice, std::span<const std::string> gold);

/// Recomputes the path's LM score from scratch and combines it with the
/// stored lattice scores. Used to check score additivity.
double rescore(const DecodePath& path, const Scorer& scorer, double lattice_weight);

/// TSV: cipher, word, base, source, kind, lm, lattice per line, then
/// "#"-prefixed totals. Runtime is written only when requested so that
/// repeated runs produce identical bytes.
void write_path_tsv(std::ostream& os, const DecodePath& path, bool with_runtime = false);
DecodePath read_path_tsv(std::istream& is);

}  // namespace bookcode
