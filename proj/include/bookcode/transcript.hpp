#pragma once

// Transcription notation for dictionary book codes.
//
//   [N]^      table code N
//   P.[R]-    dictionary code, page P, row R, first column
//   P.[R]=    dictionary code, page P, row R, second column
//   +suffix   inflection marker, attaches to the preceding code
//   |         sentence end
//
// Any other whitespace-separated token is a plaintext literal. Lines whose
// first non-blank character is '#' are comments.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bookcode {

struct TableCode {
  int code = 0;
  std::optional<std::string> suffix;

  bool operator==(const TableCode&) const = default;
};

struct DictCode {
  int page = 0;
  int row = 0;
  int column = 1;  // 1 for '-', 2 for '='
  std::optional<std::string> suffix;

  bool operator==(const DictCode&) const = default;
};

struct Literal {
  std::string text;

  bool operator==(const Literal&) const = default;
};

struct SentenceEnd {
  bool operator==(const SentenceEnd&) const = default;
};

using CipherToken = std::variant<TableCode, DictCode, Literal, SentenceEnd>;

/// Page layout of the shared dictionary. The defaults reproduce the index
/// values of the deciphered dictionary wordbank.
struct DictGeometry {
  int rows_per_column = 29;
  int columns = 2;
  int first_content_page = 7;

  bool operator==(const DictGeometry&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line = 0)
      : std::runtime_error(what), offset_(offset), line_(line) {}

  /// Byte offset of the offending character (within the token for
  /// parse_token, within the document for parse_document).
  std::size_t offset() const { return offset_; }
  /// 1-based line number, 0 when unknown.
  std::size_t line() const { return line_; }

 private:
  std::size_t offset_;
  std::size_t line_;
};

CipherToken parse_token(std::string_view text);

std::vector<CipherToken> parse_document(std::string_view text);

/// Renders one token, including a trailing " +suffix" marker when present.
std::string render(const CipherToken& token);

std::string render_document(const std::vector<CipherToken>& tokens);

bool is_code(const CipherToken& token);

const std::optional<std::string>& suffix_of(const CipherToken& token);

/// Linear position of a dictionary word. Throws std::domain_error when the
/// page lies in the front matter.
int dict_index(int page, int row, int column, const DictGeometry& geom = {});

int dict_index(const DictCode& code, const DictGeometry& geom = {});

/// Inverse of dict_index for rows within 1..rows_per_column.
DictCode dict_code_for_index(int index, const DictGeometry& geom = {});

}  // namespace bookcode
