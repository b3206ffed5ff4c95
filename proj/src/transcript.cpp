#include "bookcode/transcript.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace bookcode {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads a positive decimal integer starting at `pos`; advances `pos`.
int read_positive(std::string_view text, std::size_t& pos, const char* what) {
  const std::size_t start = pos;
  while (pos < text.size() && is_digit(text[pos])) ++pos;
  if (pos == start) {
    throw ParseError(std::string("expected ") + what + " in '" + std::string(text) + "'", start);
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + pos, value);
  if (ec != std::errc{} || value <= 0) {
    throw ParseError(std::string(what) + " must be a positive integer in '" + std::string(text) + "'",
                     start);
  }
  return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError(std::string("expected '") + c + "' in '" + std::string(text) + "'", pos);
  }
  ++pos;
}

void expect_end(std::string_view text, std::size_t pos) {
  if (pos != text.size()) {
    throw ParseError("unexpected trailing characters in '" + std::string(text) + "'", pos);
  }
}

TableCode parse_table(std::string_view text) {
  std::size_t pos = 0;
  expect(text, pos, '[');
  TableCode out;
  out.code = read_positive(text, pos, "table code");
  expect(text, pos, ']');
  expect(text, pos, '^');
  expect_end(text, pos);
  return out;
}

DictCode parse_dict(std::string_view text) {
  std::size_t pos = 0;
  DictCode out;
  out.page = read_positive(text, pos, "page");
  expect(text, pos, '.');
  expect(text, pos, '[');
  out.row = read_positive(text, pos, "row");
  expect(text, pos, ']');
  if (pos >= text.size() || (text[pos] != '-' && text[pos] != '=')) {
    throw ParseError("expected column marker '-' or '=' in '" + std::string(text) + "'", pos);
  }
  out.column = text[pos] == '-' ? 1 : 2;
  ++pos;
  expect_end(text, pos);
  return out;
}

std::string parse_suffix(std::string_view marker, std::size_t offset, std::size_t line) {
  if (marker.size() < 2) throw ParseError("empty inflection marker", offset, line);
  std::string suffix;
  for (std::size_t i = 1; i < marker.size(); ++i) {
    const char c = marker[i];
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseError("inflection marker must be alphabetic: '" + std::string(marker) + "'",
                       offset + i, line);
    }
    suffix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return suffix;
}

std::optional<std::string>* mutable_suffix(CipherToken& token) {
  if (auto* t = std::get_if<TableCode>(&token)) return &t->suffix;
  if (auto* d = std::get_if<DictCode>(&token)) return &d->suffix;
  return nullptr;
}

}  // namespace

CipherToken parse_token(std::string_view text) {
  if (text.empty()) throw ParseError("empty token", 0);
  if (text == "|") return SentenceEnd{};
  if (text.front() == '+') {
    throw ParseError("inflection marker '" + std::string(text) + "' is not a standalone token", 0);
  }
  if (text.front() == '[') return parse_table(text);
  if (is_digit(text.front()) && text.find('[') != std::string_view::npos) return parse_dict(text);

  const auto bad = text.find_first_of("[]^");
  if (bad != std::string_view::npos) {
    throw ParseError("malformed code '" + std::string(text) + "'", bad);
  }
  return Literal{std::string(text)};
}

std::vector<CipherToken> parse_document(std::string_view text) {
  std::vector<CipherToken> out;
  std::size_t line = 1;
  std::size_t pos = 0;
  bool at_line_start = true;

  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '\n') {
      ++line;
      ++pos;
      at_line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    if (at_line_start && c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    at_line_start = false;

    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string_view word = text.substr(start, pos - start);

    if (word.front() == '+') {
      auto* slot = out.empty() ? nullptr : mutable_suffix(out.back());
      if (slot == nullptr) {
        throw ParseError("inflection marker '" + std::string(word) + "' has no preceding code",
                         start, line);
      }
      if (slot->has_value()) {
        throw ParseError("code already carries an inflection marker", start, line);
      }
      *slot = parse_suffix(word, start, line);
      continue;
    }

    try {
      out.push_back(parse_token(word));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), start + e.offset(), line);
    }
  }
  return out;
}

std::string render(const CipherToken& token) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TableCode>) {
          os << '[' << t.code << "]^";
          if (t.suffix) os << " +" << *t.suffix;
        } else if constexpr (std::is_same_v<T, DictCode>) {
          os << t.page << ".[" << t.row << ']' << (t.column == 1 ? '-' : '=');
          if (t.suffix) os << " +" << *t.suffix;
        } else if constexpr (std::is_same_v<T, Literal>) {
          os << t.text;
        } else {
          os << '|';
        }
      },
      token);
  return os.str();
}

std::string render_document(const std::vector<CipherToken>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += render(tokens[i]);
  }
  return out;
}

bool is_code(const CipherToken& token) {
  return std::holds_alternative<TableCode>(token) || std::holds_alternative<DictCode>(token);
}

const std::optional<std::string>& suffix_of(const CipherToken& token) {
  static const std::optional<std::string> kNone;
  if (const auto* t = std::get_if<TableCode>(&token)) return t->suffix;
  if (const auto* d = std::get_if<DictCode>(&token)) return d->suffix;
  return kNone;
}

int dict_index(int page, int row, int column, const DictGeometry& geom) {
  if (page < geom.first_content_page) {
    throw std::domain_error("page " + std::to_string(page) + " precedes first content page " +
                            std::to_string(geom.first_content_page));
  }
  if (row < 1 || column < 1 || column > geom.columns) {
    throw std::domain_error("invalid dictionary row/column");
  }
  return (page - geom.first_content_page) * geom.rows_per_column * geom.columns +
         (column - 1) * geom.rows_per_column + row;
}

int dict_index(const DictCode& code, const DictGeometry& geom) {
  return dict_index(code.page, code.row, code.column, geom);
}

DictCode dict_code_for_index(int index, const DictGeometry& geom) {
  if (index < 1) throw std::domain_error("dictionary index must be positive");
  const int per_page = geom.rows_per_column * geom.columns;
  const int zero = index - 1;
  DictCode out;
  out.page = geom.first_content_page + zero / per_page;
  out.column = 1 + (zero % per_page) / geom.rows_per_column;
  out.row = 1 + zero % geom.rows_per_column;
  return out;
}

}  // namespace bookcode
