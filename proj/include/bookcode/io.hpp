#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bookcode/pipeline.hpp"
#include "bookcode/wordbank.hpp"

namespace bookcode {

/// Whole file as bytes. Throws std::runtime_error naming the file.
std::string read_text_file(const std::filesystem::path& path);

/// Word list file (one entry per line, '#' comments).
std::vector<std::string> read_word_file(const std::filesystem::path& path);

/// Cipher document file; parse errors are rethrown with the file name and
/// line prefixed.
std::vector<CipherToken> read_cipher_file(const std::filesystem::path& path);

/// Aligned pairs, one "cipher<TAB>plaintext" per line, '#' comments.
std::vector<ParallelPair> read_parallel(std::istream& is, const std::string& name = "<stream>");
void write_parallel(std::ostream& os, const std::vector<ParallelPair>& pairs);

/// Gold alignment, one "surface<TAB>lemma" per line; a missing lemma
/// column means lemma = surface.
std::vector<GoldToken> read_gold(std::istream& is, const std::string& name = "<stream>");
void write_gold(std::ostream& os, const std::vector<GoldToken>& gold);

}  // namespace bookcode
