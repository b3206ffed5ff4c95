#include "bookcode/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "bookcode/inflect.hpp"

namespace bookcode {

namespace {

double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  return x + std::log1p(std::exp(y - x));
}

double safe_log(double p) { return p > 0.0 ? std::max(std::log(p), kMinLogProb) : kMinLogProb; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Candidate> uniform_common(const LatticeConfig& cfg) {
  std::vector<Candidate> out;
  if (cfg.common_words.empty()) {
    out.push_back({cfg.proper_noun, 0.0, CandidateSource::EdgeCase, cfg.proper_noun});
    return out;
  }
  const double lp = -std::log(static_cast<double>(cfg.common_words.size()));
  out.reserve(cfg.common_words.size());
  for (const auto& w : cfg.common_words) out.push_back({w, lp, CandidateSource::EdgeCase, w});
  return out;
}

Segment fallback(const CipherToken& token, const LatticeConfig& cfg) {
  return {token, SegmentKind::EdgeCase, uniform_common(cfg)};
}

}  // namespace

ReferenceDict::ReferenceDict(std::vector<std::string> words) : words_(std::move(words)) {
  for (auto& w : words_) w = lowercase(w);
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  if (!words_.empty() && words_.front().empty()) words_.erase(words_.begin());
}

ReferenceDict ReferenceDict::load(std::istream& is) { return ReferenceDict(read_word_list(is)); }

bool ReferenceDict::contains(std::string_view word) const {
  return std::binary_search(words_.begin(), words_.end(), word);
}

std::span<const std::string> ReferenceDict::range(const std::optional<std::string>& lo,
                                                  const std::optional<std::string>& hi) const {
  auto first = lo ? std::upper_bound(words_.begin(), words_.end(), *lo) : words_.begin();
  auto last = hi ? std::lower_bound(words_.begin(), words_.end(), *hi) : words_.end();
  if (last < first) last = first;
  return {first, last};
}

std::vector<std::string> read_word_list(std::istream& is) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto end = line.find_last_not_of(" \t");
    out.push_back(line.substr(start, end - start + 1));
  }
  return out;
}

std::vector<std::string> candidates_between(const std::string& lo, const std::string& hi,
                                            const ReferenceDict& ref) {
  if (!(lo < hi)) {
    throw std::domain_error("candidates_between: '" + lo + "' does not precede '" + hi + "'");
  }
  const auto span = ref.range(lo, hi);
  return {span.begin(), span.end()};
}

const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::WordbankExact:
      return "WordbankExact";
    case CandidateSource::Interpolated:
      return "Interpolated";
    case CandidateSource::Inflection:
      return "Inflection";
    case CandidateSource::EdgeCase:
      return "EdgeCase";
    case CandidateSource::Literal:
      return "Literal";
  }
  return "?";
}

CandidateSource candidate_source_from_string(std::string_view s) {
  for (const auto c : {CandidateSource::WordbankExact, CandidateSource::Interpolated,
                       CandidateSource::Inflection, CandidateSource::EdgeCase,
                       CandidateSource::Literal}) {
    if (s == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown candidate source '" + std::string(s) + "'");
}

const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Literal:
      return "Literal";
    case SegmentKind::Exact:
      return "Exact";
    case SegmentKind::Interpolated:
      return "Interpolated";
    case SegmentKind::EdgeCase:
      return "EdgeCase";
  }
  return "?";
}

SegmentKind segment_kind_from_string(std::string_view s) {
  for (const auto k : {SegmentKind::Literal, SegmentKind::Exact, SegmentKind::Interpolated,
                       SegmentKind::EdgeCase}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown segment kind '" + std::string(s) + "'");
}

double Lattice::mean_candidates() const {
  if (segments.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& s : segments) total += s.candidates.size();
  return static_cast<double>(total) / static_cast<double>(segments.size());
}

std::vector<Candidate> expand_inflections(const std::vector<Candidate>& cands,
                                          const std::optional<std::string>& marker) {
  std::vector<Candidate> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& cand : cands) {
    std::vector<std::string> forms = inflections(cand.word);
    if (marker && !marker->empty()) {
      std::vector<std::string> matched;
      for (std::size_t i = 1; i < forms.size(); ++i) {
        if (forms[i].ends_with(*marker)) matched.push_back(forms[i]);
      }
      if (!matched.empty()) forms = std::move(matched);
    }
    const double share = cand.log_prob - std::log(static_cast<double>(forms.size()));
    for (auto& form : forms) {
      const auto [it, inserted] = index.emplace(form, out.size());
      if (inserted) {
        const auto source = form == cand.word ? cand.source : CandidateSource::Inflection;
        out.push_back({std::move(form), share, source, cand.base.empty() ? cand.word : cand.base});
      } else {
        out[it->second].log_prob = log_add(out[it->second].log_prob, share);
      }
    }
  }
  return out;
}

Segment build_segment(const CipherToken& token, const Wordbank& wb, const ReferenceDict& ref,
                      const LatticeConfig& cfg) {
  if (const auto* lit = std::get_if<Literal>(&token)) {
    const std::string w = lowercase(lit->text);
    return {token, SegmentKind::Literal, {{w, 0.0, CandidateSource::Literal, w}}};
  }
  if (std::holds_alternative<SentenceEnd>(token)) {
    return {token, SegmentKind::Literal, {{".", 0.0, CandidateSource::Literal, "."}}};
  }

  AnchorResult located;
  try {
    located = anchors_for(token, wb);
  } catch (const std::domain_error&) {
    return fallback(token, cfg);
  }
  const auto& marker = suffix_of(token);

  if (const auto* exact = std::get_if<ExactMatch>(&located)) {
    std::vector<Candidate> cands{{exact->word, 0.0, CandidateSource::WordbankExact, exact->word}};
    if (marker && cfg.inflect) cands = expand_inflections(cands, marker);
    return {token, SegmentKind::Exact, std::move(cands)};
  }

  if (const auto* edge = std::get_if<EdgeCase>(&located)) {
    if (*edge == EdgeCase::ProperNounSection) {
      return {token,
              SegmentKind::EdgeCase,
              {{cfg.proper_noun, 0.0, CandidateSource::EdgeCase, cfg.proper_noun}}};
    }
    return fallback(token, cfg);
  }

  const auto& pair = std::get<AnchorPair>(located);
  std::optional<std::string> lo;
  std::optional<std::string> hi;
  if (!pair.open_below) lo = pair.lower.word;
  if (!pair.open_above) hi = pair.upper.word;
  if (lo && hi && !(*lo < *hi)) return fallback(token, cfg);

  const auto words = ref.range(lo, hi);
  if (words.empty()) return fallback(token, cfg);

  const int M = static_cast<int>(words.size());
  const auto probs = beta_interval_probs(BetaParams{pair.m, cfg.sharpness}, M);
  std::vector<Candidate> cands;
  cands.reserve(words.size());
  for (int i = 0; i < M; ++i) {
    cands.push_back({words[i], safe_log(probs[i]), CandidateSource::Interpolated, words[i]});
  }
  if (cfg.inflect) cands = expand_inflections(cands, marker);
  return {token, SegmentKind::Interpolated, std::move(cands)};
}

Lattice build_lattice(std::span<const CipherToken> doc, const Wordbank& wb,
                      const ReferenceDict& ref, const LatticeConfig& cfg) {
  Lattice lattice;
  lattice.segments.resize(doc.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(cfg.jobs, 1)), 1,
                              std::max<std::size_t>(doc.size(), 1));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < doc.size(); i += workers) {
      lattice.segments[i] = build_segment(doc[i], wb, ref, cfg);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  return lattice;
}

void write_lattice_json(std::ostream& os, const Lattice& lattice) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& seg : lattice.segments) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : seg.candidates) {
      cands.push_back(
          {{"word", c.word}, {"logprob", c.log_prob}, {"source", to_string(c.source)}, {"base", c.base}});
    }
    out.push_back({{"cipher", render(seg.token)}, {"kind", to_string(seg.kind)}, {"candidates", cands}});
  }
  os << out.dump(1) << '\n';
}

Lattice read_lattice_json(std::istream& is) {
  const auto in = nlohmann::json::parse(is);
  if (!in.is_array()) throw std::runtime_error("lattice file: expected a JSON array of segments");
  Lattice lattice;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto& js = in[i];
    const auto tokens = parse_document(js.at("cipher").get<std::string>());
    if (tokens.size() != 1) {
      throw std::runtime_error("lattice segment " + std::to_string(i) + ": cipher must be one token");
    }
    Segment seg{tokens.front(), SegmentKind::Literal, {}};
    seg.kind = segment_kind_from_string(js.value("kind", std::string("Literal")));
    for (const auto& jc : js.at("candidates")) {
      Candidate c;
      c.word = jc.at("word").get<std::string>();
      c.log_prob = jc.at("logprob").get<double>();
      c.source = candidate_source_from_string(jc.at("source").get<std::string>());
      c.base = jc.value("base", c.word);
      seg.candidates.push_back(std::move(c));
    }
    if (seg.candidates.empty()) {
      throw std::runtime_error("lattice segment " + std::to_string(i) + " has no candidates");
    }
    lattice.segments.push_back(std::move(seg));
  }
  return lattice;
}

}  // namespace bookcode
