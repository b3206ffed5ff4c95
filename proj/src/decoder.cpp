#include "bookcode/decoder.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bookcode {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Trace {
  std::shared_ptr<const Trace> parent;
  std::uint32_t candidate = 0;
  double lm = 0.0;  // this step's LM contribution
};
using TracePtr = std::shared_ptr<const Trace>;

struct Hyp {
  ScorerState state;
  double lm = 0.0;
  double lattice = 0.0;
  double combined = 0.0;
  TracePtr trace;
};

// Candidate indices along a trace, oldest first.
std::vector<std::uint32_t> choices_of(const TracePtr& trace, std::size_t length) {
  std::vector<std::uint32_t> out(length);
  std::size_t i = length;
  for (const Trace* t = trace.get(); t != nullptr; t = t->parent.get()) out[--i] = t->candidate;
  return out;
}

bool words_less(const Lattice& lat, std::span<const std::uint32_t> a,
                std::span<const std::uint32_t> b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    const auto& wa = lat.segments[i].candidates[a[i]].word;
    const auto& wb = lat.segments[i].candidates[b[i]].word;
    if (wa != wb) return wa < wb;
  }
  return a.size() < b.size();
}

// Keeps the best k hypotheses; the worst sits at the heap front.
class TopK {
 public:
  TopK(std::size_t k, const Lattice& lat, std::size_t length) : k_(k), lat_(lat), length_(length) {}

  bool full() const { return heap_.size() >= k_; }
  double floor() const { return heap_.front().combined; }
  // False only when a hypothesis scoring `bound` or less can never enter.
  bool admits(double bound) const { return !full() || bound >= floor(); }

  void offer(Hyp h) {
    const auto better = [this](const Hyp& a, const Hyp& b) { return this->better(a, b); };
    if (!full()) {
      heap_.push_back(std::move(h));
      std::push_heap(heap_.begin(), heap_.end(), better);
      return;
    }
    if (!better(h, heap_.front())) return;
    std::pop_heap(heap_.begin(), heap_.end(), better);
    heap_.back() = std::move(h);
    std::push_heap(heap_.begin(), heap_.end(), better);
  }

  std::vector<Hyp> take_sorted() {
    std::sort(heap_.begin(), heap_.end(),
              [this](const Hyp& a, const Hyp& b) { return better(a, b); });
    return std::move(heap_);
  }

 private:
  bool better(const Hyp& a, const Hyp& b) const {
    if (a.combined != b.combined) return a.combined > b.combined;
    return words_less(lat_, choices_of(a.trace, length_), choices_of(b.trace, length_));
  }

  std::size_t k_;
  const Lattice& lat_;
  std::size_t length_;
  std::vector<Hyp> heap_;
};

class TokenCache {
 public:
  explicit TokenCache(const Scorer& scorer) : scorer_(scorer) {}
  const std::vector<TokenId>& operator()(const std::string& word) {
    auto it = cache_.find(word);
    if (it == cache_.end()) it = cache_.emplace(word, scorer_.tokenize(word)).first;
    return it->second;
  }

 private:
  const Scorer& scorer_;
  std::unordered_map<std::string, std::vector<TokenId>> cache_;
};

struct TrieNode {
  TokenId token = 0;
  double max_lp = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> children;   // by max_lp, best first
  std::vector<std::uint32_t> terminals;  // candidate indices, best first
};

std::vector<TrieNode> build_trie(const Segment& seg, TokenCache& tokens) {
  std::vector<TrieNode> nodes(1);
  std::unordered_map<std::uint64_t, std::uint32_t> edges;
  for (std::uint32_t j = 0; j < seg.candidates.size(); ++j) {
    const auto& cand = seg.candidates[j];
    std::uint32_t at = 0;
    nodes[at].max_lp = std::max(nodes[at].max_lp, cand.log_prob);
    for (const TokenId t : tokens(cand.word)) {
      const std::uint64_t key = (static_cast<std::uint64_t>(at) << 32) | static_cast<std::uint32_t>(t);
      auto [it, inserted] = edges.emplace(key, static_cast<std::uint32_t>(nodes.size()));
      if (inserted) {
        nodes[at].children.push_back(it->second);
        nodes.push_back(TrieNode{t, -std::numeric_limits<double>::infinity(), {}, {}});
      }
      at = it->second;
      nodes[at].max_lp = std::max(nodes[at].max_lp, cand.log_prob);
    }
    nodes[at].terminals.push_back(j);
  }
  for (auto& n : nodes) {
    std::sort(n.children.begin(), n.children.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (nodes[a].max_lp != nodes[b].max_lp) return nodes[a].max_lp > nodes[b].max_lp;
      return nodes[a].token < nodes[b].token;
    });
    std::sort(n.terminals.begin(), n.terminals.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto& ca = seg.candidates[a];
      const auto& cb = seg.candidates[b];
      if (ca.log_prob != cb.log_prob) return ca.log_prob > cb.log_prob;
      return ca.word < cb.word;
    });
  }
  return nodes;
}

class SegmentExpander {
 public:
  SegmentExpander(const Segment& seg, const std::vector<TrieNode>& trie, const Scorer& scorer,
                  double a, TopK& top)
      : seg_(seg), trie_(trie), scorer_(scorer), a_(a), top_(top) {}

  void expand(const Hyp& h) {
    h_ = &h;
    walk(0, h.state, h.lm, 0.0);
  }

 private:
  void walk(std::uint32_t at, const ScorerState& state, double lm, double step_lm) {
    const auto& node = trie_[at];
    std::vector<std::uint32_t> live;
    std::vector<TokenId> tokens;
    for (const std::uint32_t c : node.children) {
      // LM terms are never positive, so this bounds every completion below c.
      if (!top_.admits(lm + a_ * (h_->lattice + trie_[c].max_lp))) break;
      live.push_back(c);
      tokens.push_back(trie_[c].token);
    }
    if (live.empty()) return;
    const auto lps = scorer_.score_next(state, tokens);
    for (std::size_t k = 0; k < live.size(); ++k) {
      const auto& child = trie_[live[k]];
      const double lm2 = lm + lps[k];
      if (!top_.admits(lm2 + a_ * (h_->lattice + child.max_lp))) continue;
      const ScorerState next = scorer_.advance(state, child.token);
      for (const std::uint32_t j : child.terminals) {
        const double lat2 = h_->lattice + seg_.candidates[j].log_prob;
        const double combined = lm2 + a_ * lat2;
        if (!top_.admits(combined)) break;
        top_.offer(Hyp{next, lm2, lat2, combined,
                       std::make_shared<const Trace>(Trace{h_->trace, j, step_lm + lps[k]})});
      }
      if (!child.children.empty()) walk(live[k], next, lm2, step_lm + lps[k]);
    }
  }

  const Segment& seg_;
  const std::vector<TrieNode>& trie_;
  const Scorer& scorer_;
  double a_;
  TopK& top_;
  const Hyp* h_ = nullptr;
};

void expand_flat(const Segment& seg, const Hyp& h, const Scorer& scorer, TokenCache& tokens,
                 double a, TopK& top) {
  for (std::uint32_t j = 0; j < seg.candidates.size(); ++j) {
    ScorerState state = h.state;
    double lm = h.lm;
    double step_lm = 0.0;
    for (const TokenId t : tokens(seg.candidates[j].word)) {
      const double lp = scorer.score_next(state, std::span<const TokenId>(&t, 1)).front();
      lm += lp;
      step_lm += lp;
      state = scorer.advance(state, t);
    }
    const double lat = h.lattice + seg.candidates[j].log_prob;
    top.offer(Hyp{std::move(state), lm, lat, lm + a * lat,
                  std::make_shared<const Trace>(Trace{h.trace, j, step_lm})});
  }
}

PathStep make_step(const Segment& seg, std::uint32_t j, double lm) {
  const auto& c = seg.candidates[j];
  return PathStep{render(seg.token), c.word, c.base, c.source, seg.kind, lm, c.log_prob};
}

void check_segments(const Lattice& lat) {
  for (std::size_t i = 0; i < lat.segments.size(); ++i) {
    if (lat.segments[i].candidates.empty()) {
      throw std::invalid_argument("lattice segment " + std::to_string(i) + " has no candidates");
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<std::string> DecodePath::words() const {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.word);
  return out;
}

DecodePath beam_decode(const Lattice& lattice, const Scorer& scorer, const DecodeOptions& opts) {
  if (opts.beam < 1) throw std::invalid_argument("beam must be at least 1");
  if (!(opts.lattice_weight > 0.0)) throw std::invalid_argument("lattice weight must be positive");
  check_segments(lattice);
  const auto start = Clock::now();

  TokenCache tokens(scorer);
  std::vector<Hyp> beam{Hyp{scorer.begin(), 0.0, 0.0, 0.0, nullptr}};
  for (std::size_t i = 0; i < lattice.segments.size(); ++i) {
    const Segment& seg = lattice.segments[i];
    TopK top(opts.beam, lattice, i + 1);
    if (opts.use_trie) {
      const auto trie = build_trie(seg, tokens);
      SegmentExpander expander(seg, trie, scorer, opts.lattice_weight, top);
      for (const auto& h : beam) expander.expand(h);
    } else {
      for (const auto& h : beam) expand_flat(seg, h, scorer, tokens, opts.lattice_weight, top);
    }
    beam = top.take_sorted();
  }

  const Hyp& best = beam.front();
  DecodePath path;
  path.lm_score = best.lm;
  path.lattice_score = best.lattice;
  path.combined = best.combined;
  path.beam = opts.beam;
  path.lattice_weight = opts.lattice_weight;
  std::vector<const Trace*> chain;
  for (const Trace* t = best.trace.get(); t != nullptr; t = t->parent.get()) chain.push_back(t);
  std::reverse(chain.begin(), chain.end());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    path.steps.push_back(make_step(lattice.segments[i], chain[i]->candidate, chain[i]->lm));
  }
  path.runtime_seconds = seconds_since(start);
  return path;
}

DecodePath exhaustive_decode(const Lattice& lattice, const Scorer& scorer, double lattice_weight) {
  if (!(lattice_weight > 0.0)) throw std::invalid_argument("lattice weight must be positive");
  check_segments(lattice);
  double paths = 1.0;
  for (const auto& seg : lattice.segments) paths *= static_cast<double>(seg.candidates.size());
  if (paths > kExhaustiveLimit) {
    std::ostringstream msg;
    msg << "lattice has " << paths << " paths; exhaustive search is limited to "
        << kExhaustiveLimit;
    throw std::length_error(msg.str());
  }
  const auto start = Clock::now();
  TokenCache tokens(scorer);
  const std::size_t n = lattice.segments.size();

  std::vector<std::uint32_t> choice(n), best_choice;
  std::vector<double> step_lm(n), best_step_lm;
  double best_lm = 0.0, best_lattice = 0.0;
  double best_combined = -std::numeric_limits<double>::infinity();
  bool found = false;

  std::function<void(std::size_t, const ScorerState&, double, double)> dfs =
      [&](std::size_t i, const ScorerState& state, double lm, double lat) {
        if (i == n) {
          const double combined = lm + lattice_weight * lat;
          const bool better =
              !found || combined > best_combined ||
              (combined == best_combined && words_less(lattice, choice, best_choice));
          if (better) {
            found = true;
            best_combined = combined;
            best_lm = lm;
            best_lattice = lat;
            best_choice = choice;
            best_step_lm = step_lm;
          }
          return;
        }
        const Segment& seg = lattice.segments[i];
        for (std::uint32_t j = 0; j < seg.candidates.size(); ++j) {
          ScorerState st = state;
          double l = lm;
          double s = 0.0;
          for (const TokenId t : tokens(seg.candidates[j].word)) {
            const double lp = scorer.score_next(st, std::span<const TokenId>(&t, 1)).front();
            l += lp;
            s += lp;
            st = scorer.advance(st, t);
          }
          choice[i] = j;
          step_lm[i] = s;
          dfs(i + 1, st, l, lat + seg.candidates[j].log_prob);
        }
      };
  dfs(0, scorer.begin(), 0.0, 0.0);

  DecodePath path;
  path.lm_score = best_lm;
  path.lattice_score = best_lattice;
  path.combined = n == 0 ? 0.0 : best_combined;
  path.lattice_weight = lattice_weight;
  for (std::size_t i = 0; i < n; ++i) {
    path.steps.push_back(make_step(lattice.segments[i], best_choice[i], best_step_lm[i]));
  }
  path.runtime_seconds = seconds_since(start);
  return path;
}

DecodePath unigram_decode(const Lattice& lattice, const std::unordered_map<std::string, int>& rank) {
  check_segments(lattice);
  const auto rank_of = [&](const std::string& w) {
    const auto it = rank.find(w);
    return it == rank.end() ? std::numeric_limits<int>::max() : it->second;
  };
  DecodePath path;
  path.lattice_weight = 1.0;
  for (const auto& seg : lattice.segments) {
    std::uint32_t best = 0;
    for (std::uint32_t j = 1; j < seg.candidates.size(); ++j) {
      const auto& c = seg.candidates[j];
      const auto& b = seg.candidates[best];
      const int rc = rank_of(c.word), rb = rank_of(b.word);
      if (rc != rb ? rc < rb : c.log_prob != b.log_prob ? c.log_prob > b.log_prob : c.word < b.word) {
        best = j;
      }
    }
    path.steps.push_back(make_step(seg, best, 0.0));
    path.lattice_score += seg.candidates[best].log_prob;
  }
  path.combined = path.lattice_score;
  return path;
}

OracleResult oracle_decode(const Lattice& lattice, std::span<const std::string> gold) {
  if (gold.size() != lattice.segments.size()) {
    throw std::domain_error("gold has " + std::to_string(gold.size()) + " words for " +
                            std::to_string(lattice.segments.size()) + " segments");
  }
  check_segments(lattice);
  OracleResult out;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& seg = lattice.segments[i];
    std::uint32_t pick = 0;
    bool hit = false;
    for (std::uint32_t j = 0; j < seg.candidates.size(); ++j) {
      const auto& c = seg.candidates[j];
      if (c.word == gold[i]) {
        pick = j;
        hit = true;
        break;
      }
      const auto& b = seg.candidates[pick];
      if (c.log_prob > b.log_prob || (c.log_prob == b.log_prob && c.word < b.word)) pick = j;
    }
    hits += hit ? 1 : 0;
    out.path.steps.push_back(make_step(seg, pick, 0.0));
    out.path.lattice_score += seg.candidates[pick].log_prob;
  }
  out.path.combined = out.path.lattice_score;
  out.in_lattice_rate = gold.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gold.size());
  return out;
}

double rescore(const DecodePath& path, const Scorer& scorer, double lattice_weight) {
  double lattice = 0.0;
  for (const auto& s : path.steps) lattice += s.lattice;
  return score_sequence(scorer, path.words()) + lattice_weight * lattice;
}

void write_path_tsv(std::ostream& os, const DecodePath& path, bool with_runtime) {
  os << "# cipher\tword\tbase\tsource\tkind\tlm\tlattice\n";
  for (const auto& s : path.steps) {
    os << s.cipher << '\t' << s.word << '\t' << s.base << '\t' << to_string(s.source) << '\t'
       << to_string(s.kind) << '\t' << format_double(s.lm) << '\t' << format_double(s.lattice)
       << '\n';
  }
  os << "# lm_total\t" << format_double(path.lm_score) << '\n';
  os << "# lattice_total\t" << format_double(path.lattice_score) << '\n';
  os << "# combined\t" << format_double(path.combined) << '\n';
  os << "# beam\t" << path.beam << '\n';
  os << "# lattice_weight\t" << format_double(path.lattice_weight) << '\n';
  if (with_runtime) os << "# runtime_seconds\t" << format_double(path.runtime_seconds) << '\n';
}

DecodePath read_path_tsv(std::istream& is) {
  DecodePath path;
  std::string line;
  std::size_t lineno = 0;
  const auto fail = [&](const std::string& why) {
    throw std::runtime_error("path file line " + std::to_string(lineno) + ": " + why);
  };
  const auto number = [&](const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("bad number '" + s + "'");
    return v;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (line.front() == '#') {
      if (f.size() != 2) continue;
      const auto key = f[0].substr(f[0].find_first_not_of("# "));
      if (key == "lm_total") path.lm_score = number(f[1]);
      else if (key == "lattice_total") path.lattice_score = number(f[1]);
      else if (key == "combined") path.combined = number(f[1]);
      else if (key == "beam") path.beam = static_cast<std::size_t>(number(f[1]));
      else if (key == "lattice_weight") path.lattice_weight = number(f[1]);
      else if (key == "runtime_seconds") path.runtime_seconds = number(f[1]);
      continue;
    }
    if (f.size() != 7) fail("expected 7 tab-separated fields");
    try {
      path.steps.push_back(PathStep{f[0], f[1], f[2], candidate_source_from_string(f[3]),
                                    segment_kind_from_string(f[4]), number(f[5]), number(f[6])});
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return path;
}

}  // namespace bookcode
