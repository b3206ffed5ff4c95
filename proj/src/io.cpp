#include "bookcode/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bookcode/lattice.hpp"

namespace bookcode {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_word_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_word_list(in);
}

std::vector<CipherToken> read_cipher_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_document(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what(), e.offset(),
                     e.line());
  }
}

std::vector<ParallelPair> read_parallel(std::istream& is, const std::string& name) {
  std::vector<ParallelPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": expected cipher<TAB>plaintext");
    }
    try {
      const auto tokens = parse_document(line.substr(0, tab));
      if (tokens.size() != 1) throw std::runtime_error("cipher column must hold one token");
      out.push_back({tokens.front(), line.substr(tab + 1)});
    } catch (const std::exception& e) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_parallel(std::ostream& os, const std::vector<ParallelPair>& pairs) {
  for (const auto& p : pairs) os << render(p.token) << '\t' << p.plaintext << '\n';
}

std::vector<GoldToken> read_gold(std::istream& is, const std::string& name) {
  std::vector<GoldToken> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    GoldToken g;
    g.surface = line.substr(0, tab);
    g.lemma = tab == std::string::npos ? g.surface : line.substr(tab + 1);
    if (g.surface.empty()) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": empty gold word");
    }
    out.push_back(std::move(g));
  }
  return out;
}

void write_gold(std::ostream& os, const std::vector<GoldToken>& gold) {
  for (const auto& g : gold) os << g.surface << '\t' << g.lemma << '\n';
}

}  // namespace bookcode
