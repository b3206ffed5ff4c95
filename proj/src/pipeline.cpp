#include "bookcode/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "bookcode/inflect.hpp"

namespace bookcode {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool is_sentence_mark(char c) {
  return c == '.' || c == '!' || c == '?' || c == ';' || c == ':';
}

// Markers a clerk could plausibly write: the form extends (almost all of)
// the lemma, as in oblige/obliged or carry/carried.
bool natural_marker(const std::string& lemma, const std::string& form, const std::string& marker) {
  if (marker.empty()) return false;
  const std::size_t shared = form.size() - marker.size();
  return shared >= 2 && shared + 1 >= lemma.size();
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  const auto flush = [&] {
    while (!word.empty() && word.back() == '\'') word.pop_back();
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'' && !word.empty() && i + 1 < text.size() &&
               is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      word.push_back('\'');
    } else {
      flush();
      if (is_sentence_mark(static_cast<char>(c)) && !out.empty() && out.back() != ".") {
        out.emplace_back(".");
      }
    }
  }
  flush();
  return out;
}

std::vector<std::vector<std::string>> tokenize_paragraphs(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  std::string para;
  const auto flush = [&] {
    auto tokens = tokenize_text(para);
    if (!tokens.empty()) out.push_back(std::move(tokens));
    para.clear();
  };
  while (pos <= text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, nl - pos);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      flush();
    } else {
      para.append(line);
      para.push_back('\n');
    }
    pos = nl + 1;
  }
  flush();
  return out;
}

std::vector<std::string> most_common_words(std::span<const std::vector<std::string>> docs,
                                           std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : docs) {
    for (const auto& w : doc) {
      if (w != ".") ++counts[w];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sorted.size() && i < k; ++i) out.push_back(sorted[i].first);
  return out;
}

std::unordered_map<std::string, int> rank_map(std::span<const std::string> words) {
  std::unordered_map<std::string, int> out;
  for (std::size_t i = 0; i < words.size(); ++i) out.emplace(words[i], static_cast<int>(i));
  return out;
}

SynthKey::SynthKey(SynthConfig cfg) : cfg_(std::move(cfg)) {
  if (!std::is_sorted(cfg_.key_dictionary.begin(), cfg_.key_dictionary.end()) ||
      std::adjacent_find(cfg_.key_dictionary.begin(), cfg_.key_dictionary.end()) !=
          cfg_.key_dictionary.end()) {
    throw std::invalid_argument("key dictionary must be strictly sorted");
  }
  std::sort(cfg_.table_words.begin(), cfg_.table_words.end());
  cfg_.table_words.erase(std::unique(cfg_.table_words.begin(), cfg_.table_words.end()),
                         cfg_.table_words.end());
  const auto [lo, hi] = cfg_.alpha_range;
  if (static_cast<long>(cfg_.table_words.size()) > static_cast<long>(hi) - lo + 1) {
    throw std::invalid_argument("more table words than codes in the alphabetic range");
  }
  for (std::size_t i = 0; i < cfg_.table_words.size(); ++i) {
    table_code_.emplace(cfg_.table_words[i], lo + static_cast<int>(i));
  }
  for (std::size_t i = 0; i < cfg_.key_dictionary.size(); ++i) {
    dict_index_.emplace(cfg_.key_dictionary[i], static_cast<int>(i) + 1);
  }
  const auto add_forms = [](const std::vector<std::string>& lemmas,
                            std::unordered_map<std::string, std::string>& into) {
    for (const auto& lemma : lemmas) {
      for (const auto& form : inflections(lemma)) {
        if (form == lemma) continue;
        if (natural_marker(lemma, form, inflection_marker(lemma, form))) into.emplace(form, lemma);
      }
    }
  };
  add_forms(cfg_.table_words, table_lemma_);
  add_forms(cfg_.key_dictionary, dict_lemma_);
}

std::pair<CipherToken, GoldToken> SynthKey::encode(const std::string& word) const {
  if (word == ".") return {SentenceEnd{}, {".", "."}};
  if (const auto it = table_code_.find(word); it != table_code_.end()) {
    return {TableCode{it->second, std::nullopt}, {word, word}};
  }
  if (const auto it = dict_index_.find(word); it != dict_index_.end()) {
    return {dict_code_for_index(it->second, cfg_.geometry), {word, word}};
  }
  if (const auto it = table_lemma_.find(word); it != table_lemma_.end()) {
    return {TableCode{table_code_.at(it->second), inflection_marker(it->second, word)},
            {word, it->second}};
  }
  if (const auto it = dict_lemma_.find(word); it != dict_lemma_.end()) {
    DictCode code = dict_code_for_index(dict_index_.at(it->second), cfg_.geometry);
    code.suffix = inflection_marker(it->second, word);
    return {code, {word, it->second}};
  }
  return {Literal{word}, {word, word}};
}

SynthText SynthKey::encipher(std::span<const std::string> words) const {
  SynthText out;
  out.cipher.reserve(words.size());
  out.gold.reserve(words.size());
  for (const auto& w : words) {
    auto [token, gold] = encode(w);
    out.cipher.push_back(std::move(token));
    out.gold.push_back(std::move(gold));
  }
  return out;
}

Wordbank SynthKey::empty_wordbank() const {
  Wordbank wb;
  wb.alpha_range = cfg_.alpha_range;
  wb.geometry = cfg_.geometry;
  wb.dict_extent = static_cast<int>(cfg_.key_dictionary.size());
  return wb;
}

Wordbank SynthKey::full_wordbank() const {
  Wordbank wb = empty_wordbank();
  for (const auto& [w, code] : table_code_) wb.table_entries.emplace(code, w);
  for (const auto& [w, index] : dict_index_) wb.dict_entries.emplace(index, w);
  return wb;
}

std::vector<ParallelPair> parallel_prefix(const SynthText& text, std::size_t word_tokens) {
  std::vector<ParallelPair> out;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.cipher.size() && seen < word_tokens; ++i) {
    if (text.gold[i].surface == ".") continue;
    ++seen;
    if (is_code(text.cipher[i])) out.push_back({text.cipher[i], text.gold[i].lemma});
  }
  return out;
}

Metrics evaluate(const DecodePath& path, std::span<const std::string> gold, bool all_tokens) {
  if (gold.size() != path.steps.size()) {
    throw std::domain_error("path has " + std::to_string(path.steps.size()) + " tokens but gold has " +
                            std::to_string(gold.size()));
  }
  Metrics m;
  std::size_t correct = 0, exact = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& step = path.steps[i];
    if (!all_tokens && step.kind == SegmentKind::Literal) continue;
    ++m.code_tokens;
    if (normalize_plaintext(step.word) == normalize_plaintext(gold[i])) ++correct;
    if (step.kind == SegmentKind::Exact) ++exact;
  }
  if (m.code_tokens > 0) {
    m.token_accuracy = static_cast<double>(correct) / static_cast<double>(m.code_tokens);
    m.coverage = static_cast<double>(exact) / static_cast<double>(m.code_tokens);
  }
  return m;
}

std::vector<std::string> surfaces(std::span<const GoldToken> gold) {
  std::vector<std::string> out;
  out.reserve(gold.size());
  for (const auto& g : gold) out.push_back(g.surface);
  return out;
}

SelfLearnResult self_learn(std::span<const CipherToken> doc, Wordbank wb, const ReferenceDict& ref,
                           const Scorer& scorer, const LatticeConfig& lcfg,
                           const DecodeOptions& dopts, const SelfLearnConfig& cfg,
                           std::span<const std::string> gold) {
  if (cfg.iterations < 1) throw std::invalid_argument("self-learning needs at least one iteration");
  if (!(cfg.promote_fraction > 0.0 && cfg.promote_fraction <= 1.0)) {
    throw std::invalid_argument("promote fraction must be in (0, 1]");
  }
  SelfLearnResult result;
  const auto decode = [&](const Wordbank& bank) {
    return beam_decode(build_lattice(doc, bank, ref, lcfg), scorer, dopts);
  };
  const auto accuracy = [&](const DecodePath& path) {
    return gold.empty() ? std::numeric_limits<double>::quiet_NaN()
                        : evaluate(path, gold).token_accuracy;
  };

  DecodePath path = decode(wb);
  for (int round = 1; round <= cfg.iterations; ++round) {
    SelfLearnRound info;
    info.round = round;
    info.wordbank_size = wb.size();
    info.combined = path.combined;
    info.accuracy = accuracy(path);

    struct Proposal {
      double score;
      std::size_t index;
    };
    std::vector<Proposal> proposals;
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
      const auto& s = path.steps[i];
      if (s.kind != SegmentKind::Interpolated) continue;
      proposals.push_back({s.lm + dopts.lattice_weight * s.lattice, i});
    }
    std::sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
      return a.score != b.score ? a.score > b.score : a.index < b.index;
    });
    const auto quota = static_cast<std::size_t>(
        std::ceil(cfg.promote_fraction * static_cast<double>(proposals.size())));
    for (std::size_t k = 0; k < proposals.size() && info.promoted < quota; ++k) {
      if (proposals[k].score < cfg.min_confidence) break;
      const auto& step = path.steps[proposals[k].index];
      const auto& token = doc[proposals[k].index];
      if (!wb.lookup(token).empty()) continue;  // promoted earlier this round
      const auto [section, pos] = wb.position_of(token);
      const std::string word = normalize_plaintext(step.base.empty() ? step.word : step.base);
      if (word.empty() || !insertion_keeps_order(wb, section, pos, word)) {
        ++info.rejected;
        continue;
      }
      (section == Section::Table ? wb.table_entries : wb.dict_entries).emplace(pos, word);
      ++info.promoted;
    }
    result.rounds.push_back(info);
    if (info.promoted == 0) break;
    path = decode(wb);
  }
  result.final_accuracy = accuracy(path);
  result.path = std::move(path);
  result.wordbank = std::move(wb);
  return result;
}

EfficiencyReport data_efficiency(std::span<const std::size_t> sizes, const EfficiencyInputs& in) {
  if (in.key == nullptr || in.reference == nullptr || in.scorer == nullptr) {
    throw std::invalid_argument("data efficiency inputs are incomplete");
  }
  const SynthText train = in.key->encipher(in.parallel_words);
  const SynthText test = in.key->encipher(in.test_words);
  const auto gold = surfaces(test.gold);
  const auto ranks = rank_map(in.frequency_list);
  std::size_t available = 0;
  for (const auto& g : train.gold) available += g.surface != "." ? 1 : 0;

  EfficiencyReport report;
  report.rows.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    report.rows[i].requested_tokens = sizes[i];
    report.rows[i].parallel_tokens = std::min(sizes[i], available);
    if (sizes[i] > available) {
      report.warnings.push_back("requested " + std::to_string(sizes[i]) +
                                " parallel tokens; clamped to " + std::to_string(available));
    }
  }

  LatticeConfig lcfg = in.lattice;
  lcfg.jobs = 1;
  const auto run = [&](EfficiencyRow& row) {
    const auto start = std::chrono::steady_clock::now();
    const Wordbank wb =
        extract_wordbank(parallel_prefix(train, row.parallel_tokens), in.key->empty_wordbank()).wordbank;
    const Lattice lattice = build_lattice(test.cipher, wb, *in.reference, lcfg);
    const DecodePath path = beam_decode(lattice, *in.scorer, in.decode);
    const Metrics m = evaluate(path, gold);
    row.wordbank_size = wb.size();
    row.coverage = m.coverage;
    row.accuracy = m.token_accuracy;
    row.unigram_accuracy = evaluate(unigram_decode(lattice, ranks), gold).token_accuracy;
    row.oracle_accuracy = evaluate(oracle_decode(lattice, gold).path, gold).token_accuracy;
    row.mean_candidates = lattice.mean_candidates();
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const int jobs = in.scorer->thread_safe() ? std::max(1, in.jobs) : 1;
  if (jobs == 1 || report.rows.size() < 2) {
    for (auto& row : report.rows) run(row);
  } else {
    std::vector<std::exception_ptr> errors(report.rows.size());
    {
      std::vector<std::jthread> workers;
      const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), report.rows.size());
      for (std::size_t w = 0; w < n; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < report.rows.size(); i += n) {
            try {
              run(report.rows[i]);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return report;
}

void write_efficiency_tsv(std::ostream& os, const EfficiencyReport& report) {
  os << "parallel_tokens\twordbank_size\tcoverage\taccuracy\tunigram_accuracy\toracle_accuracy"
        "\tmean_candidates\n";
  const auto pct = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * v;
    return s.str();
  };
  for (const auto& r : report.rows) {
    std::ostringstream mc;
    mc << std::fixed << std::setprecision(1) << r.mean_candidates;
    os << r.parallel_tokens << '\t' << r.wordbank_size << '\t' << pct(r.coverage) << '\t'
       << pct(r.accuracy) << '\t' << pct(r.unigram_accuracy) << '\t' << pct(r.oracle_accuracy)
       << '\t' << mc.str() << '\n';
  }
}

void write_efficiency_json(std::ostream& os, const EfficiencyReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"requested_tokens", r.requested_tokens},
                    {"parallel_tokens", r.parallel_tokens},
                    {"wordbank_size", r.wordbank_size},
                    {"coverage", r.coverage},
                    {"accuracy", r.accuracy},
                    {"unigram_accuracy", r.unigram_accuracy},
                    {"oracle_accuracy", r.oracle_accuracy},
                    {"mean_candidates", r.mean_candidates}});
  }
  os << nlohmann::json{{"rows", rows}, {"warnings", report.warnings}}.dump(2) << '\n';
}

}  // namespace bookcode
