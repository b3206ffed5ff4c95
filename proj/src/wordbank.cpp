#include "bookcode/wordbank.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bookcode {

namespace {

const std::map<int, std::string>& entries(const Wordbank& wb, Section s) {
  return s == Section::Table ? wb.table_entries : wb.dict_entries;
}

std::map<int, std::string>& entries(Wordbank& wb, Section s) {
  return s == Section::Table ? wb.table_entries : wb.dict_entries;
}

bool in_alpha(const Wordbank& wb, Section s, int position) {
  return s == Section::Dict ||
         (position >= wb.alpha_range.first && position <= wb.alpha_range.second);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

int to_int(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("wordbank line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
}

}  // namespace

const char* to_string(Section s) { return s == Section::Table ? "table" : "dict"; }

const char* to_string(EdgeCase e) {
  switch (e) {
    case EdgeCase::ProperNounSection:
      return "ProperNounSection";
    case EdgeCase::OutsideAlphabetic:
      return "OutsideAlphabetic";
    case EdgeCase::NoAnchors:
      return "NoAnchors";
  }
  return "?";
}

std::pair<Section, int> Wordbank::position_of(const CipherToken& token) const {
  if (const auto* t = std::get_if<TableCode>(&token)) return {Section::Table, t->code};
  if (const auto* d = std::get_if<DictCode>(&token)) {
    return {Section::Dict, dict_index(*d, geometry)};
  }
  throw std::invalid_argument("token is not a code: " + render(token));
}

std::string Wordbank::lookup(const CipherToken& token) const {
  if (!is_code(token)) return {};
  const auto [section, pos] = position_of(token);
  const auto& map = entries(*this, section);
  const auto it = map.find(pos);
  return it == map.end() ? std::string{} : it->second;
}

std::string normalize_plaintext(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '\'' || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c)) {
      pending_space = true;
    }
  }
  return out;
}

ExtractResult extract_wordbank(const std::vector<ParallelPair>& pairs, Wordbank base) {
  ExtractResult result{std::move(base), {}};
  for (const auto& pair : pairs) {
    if (!is_code(pair.token)) continue;
    std::string word = normalize_plaintext(pair.plaintext);
    if (word.empty()) continue;
    const auto [section, pos] = result.wordbank.position_of(pair.token);
    auto& map = entries(result.wordbank, section);
    const auto [it, inserted] = map.emplace(pos, word);
    if (!inserted && it->second != word) {
      result.conflicts.push_back({section, pos, it->second, std::move(word)});
    }
  }
  return result;
}

std::vector<MonotonicViolation> check_monotonic(const Wordbank& wb) {
  std::vector<MonotonicViolation> out;
  for (const Section s : {Section::Table, Section::Dict}) {
    const std::pair<const int, std::string>* prev = nullptr;
    for (const auto& entry : entries(wb, s)) {
      if (!in_alpha(wb, s, entry.first)) continue;
      if (prev != nullptr && entry.second < prev->second) {
        out.push_back({s, prev->first, entry.first, prev->second, entry.second});
      }
      prev = &entry;
    }
  }
  return out;
}

bool insertion_keeps_order(const Wordbank& wb, Section section, int position,
                           const std::string& word) {
  if (!in_alpha(wb, section, position)) return true;
  const auto& map = entries(wb, section);
  auto upper = map.upper_bound(position);
  if (upper != map.end() && in_alpha(wb, section, upper->first) && upper->second < word) {
    return false;
  }
  auto lower = map.lower_bound(position);
  if (lower != map.begin()) {
    --lower;
    if (in_alpha(wb, section, lower->first) && word < lower->second) return false;
  }
  return true;
}

AnchorResult anchors_for(const CipherToken& token, const Wordbank& wb) {
  const auto [section, pos] = wb.position_of(token);
  const auto& map = entries(wb, section);
  if (const auto hit = map.find(pos); hit != map.end()) return ExactMatch{hit->second};

  int first = 0;
  int last = 0;
  if (section == Section::Table) {
    if (pos < wb.alpha_range.first) return EdgeCase::ProperNounSection;
    if (pos > wb.alpha_range.second) return EdgeCase::OutsideAlphabetic;
    first = wb.alpha_range.first - 1;
    last = wb.alpha_range.second + 1;
  } else {
    first = 0;
    last = std::max(wb.dict_extent, pos) + 1;
  }

  auto lo_it = map.lower_bound(first + 1);
  auto hi_it = map.upper_bound(last - 1);
  if (lo_it == hi_it) return EdgeCase::NoAnchors;

  AnchorPair pair;
  auto above = map.upper_bound(pos);
  if (above != map.end() && above->first < last) {
    pair.upper = {above->first, above->second};
  } else {
    pair.upper = {last, {}};
    pair.open_above = true;
  }
  auto below = map.lower_bound(pos);
  if (below != map.begin() && std::prev(below)->first > first) {
    --below;
    pair.lower = {below->first, below->second};
  } else {
    pair.lower = {first, {}};
    pair.open_below = true;
  }
  pair.m = static_cast<double>(pos - pair.lower.position) /
           static_cast<double>(pair.upper.position - pair.lower.position);
  return pair;
}

void write_wordbank(std::ostream& os, const Wordbank& wb) {
  os << "# bookcode wordbank v1\n";
  os << "# alpha_range\t" << wb.alpha_range.first << '\t' << wb.alpha_range.second << '\n';
  os << "# geometry\t" << wb.geometry.rows_per_column << '\t' << wb.geometry.columns << '\t'
     << wb.geometry.first_content_page << '\n';
  os << "# dict_extent\t" << wb.dict_extent << '\n';
  for (const auto& [pos, word] : wb.table_entries) os << "table\t" << pos << '\t' << word << '\n';
  for (const auto& [pos, word] : wb.dict_entries) os << "dict\t" << pos << '\t' << word << '\n';
}

Wordbank read_wordbank(std::istream& is) {
  Wordbank wb;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = line.find_first_not_of("# ");
      if (body == std::string::npos) continue;
      const auto fields = split_tabs(line.substr(body));
      if (fields[0] == "alpha_range" && fields.size() == 3) {
        wb.alpha_range = {to_int(fields[1], line_no), to_int(fields[2], line_no)};
      } else if (fields[0] == "geometry" && fields.size() == 4) {
        wb.geometry = {to_int(fields[1], line_no), to_int(fields[2], line_no),
                       to_int(fields[3], line_no)};
      } else if (fields[0] == "dict_extent" && fields.size() == 2) {
        wb.dict_extent = to_int(fields[1], line_no);
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw std::runtime_error("wordbank line " + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    }
    const int pos = to_int(fields[1], line_no);
    if (fields[0] == "table") {
      wb.table_entries[pos] = fields[2];
    } else if (fields[0] == "dict") {
      wb.dict_entries[pos] = fields[2];
    } else {
      throw std::runtime_error("wordbank line " + std::to_string(line_no) + ": unknown section '" +
                               fields[0] + "'");
    }
  }
  return wb;
}

}  // namespace bookcode
