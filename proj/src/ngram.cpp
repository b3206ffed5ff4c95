#include "bookcode/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace bookcode {

namespace {

constexpr const char* kMagic = "bookcode-ngram";
constexpr int kFormatVersion = 1;

}  // namespace

std::size_t NGramModel::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.size) * 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < k.size; ++i) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(k.ids[i])) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return h;
}

NGramModel::Key NGramModel::make_key(std::span<const TokenId> ids) {
  Key k;
  k.size = static_cast<int>(ids.size());
  std::copy(ids.begin(), ids.end(), k.ids.begin());
  return k;
}

NGramModel NGramModel::train(const std::vector<std::vector<std::string>>& corpus, int order,
                             double discount) {
  if (order < 1 || order > kMaxOrder) {
    throw std::domain_error("n-gram order must be in 1.." + std::to_string(kMaxOrder));
  }
  if (!(discount > 0.0 && discount < 1.0)) throw std::domain_error("discount must be in (0, 1)");
  std::size_t tokens = 0;
  for (const auto& doc : corpus) tokens += doc.size();
  if (tokens == 0) throw std::domain_error("cannot train an n-gram model on an empty corpus");

  NGramModel model;
  model.order_ = order;
  model.discount_ = discount;

  std::set<std::string> words{kSentenceEndToken};
  for (const auto& doc : corpus) words.insert(doc.begin(), doc.end());
  words.erase(kUnknownToken);
  model.vocab_.push_back(kUnknownToken);
  model.vocab_.insert(model.vocab_.end(), words.begin(), words.end());
  for (std::size_t i = 0; i < model.vocab_.size(); ++i) {
    model.index_.emplace(model.vocab_[i], static_cast<TokenId>(i));
  }

  model.counts_.assign(order, {});
  // Distinct j-grams (j >= 2) ending at real positions feed the
  // continuation counts of their (j-1)-suffixes.
  std::vector<std::unordered_set<Key, KeyHash>> seen(order + 1);
  const TokenId pad = model.sentence_end_id();
  for (const auto& doc : corpus) {
    std::vector<TokenId> ids(order - 1, pad);
    for (const auto& w : doc) ids.push_back(model.id(w));
    for (std::size_t i = order - 1; i < ids.size(); ++i) {
      const std::span<const TokenId> top(ids.data() + i + 1 - order, order);
      model.counts_[order - 1][make_key(top)] += 1.0;
      for (int j = 2; j < order; ++j) {
        seen[j].insert(make_key(std::span<const TokenId>(ids.data() + i + 1 - j, j)));
      }
      if (order >= 2) seen[order].insert(make_key(top));
    }
  }
  for (int j = 2; j <= order; ++j) {
    for (const Key& k : seen[j]) {
      Key suffix;
      suffix.size = j - 1;
      std::copy(k.ids.begin() + 1, k.ids.begin() + j, suffix.ids.begin());
      model.counts_[j - 2][suffix] += 1.0;
    }
  }
  model.build_context_stats();
  return model;
}

void NGramModel::build_context_stats() {
  context_.assign(order_, {});
  for (int k = 1; k <= order_; ++k) {
    for (const auto& [key, c] : counts_[k - 1]) {
      Key history;
      history.size = k - 1;
      std::copy(key.ids.begin(), key.ids.begin() + (k - 1), history.ids.begin());
      auto& stats = context_[k - 1][history];
      stats.total += c;
      stats.types += 1.0;
    }
  }
}

TokenId NGramModel::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? unknown_id() : it->second;
}

TokenId NGramModel::sentence_end_id() const { return id(kSentenceEndToken); }

double NGramModel::count(std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return 0.0;
  const auto& table = counts_[ngram.size() - 1];
  const auto it = table.find(make_key(ngram));
  return it == table.end() ? 0.0 : it->second;
}

double NGramModel::prob_at(int level, std::span<const TokenId> history, TokenId word) const {
  const double uniform = 1.0 / static_cast<double>(vocab_.size());
  const std::size_t used = std::min<std::size_t>(history.size(), static_cast<std::size_t>(level - 1));
  const auto h = history.subspan(history.size() - used);
  const double lower = level == 1 ? uniform : prob_at(level - 1, history, word);
  if (static_cast<int>(used) < level - 1) return lower;

  const auto stats = context_[level - 1].find(make_key(h));
  if (stats == context_[level - 1].end() || stats->second.total <= 0.0) return lower;

  Key full = make_key(h);
  full.ids[full.size++] = word;
  const auto c = counts_[level - 1].find(full);
  const double numerator = c == counts_[level - 1].end() ? 0.0 : std::max(c->second - discount_, 0.0);
  return (numerator + discount_ * stats->second.types * lower) / stats->second.total;
}

double NGramModel::prob(std::span<const TokenId> history, TokenId word) const {
  return prob_at(order_, history, word);
}

double NGramModel::log_prob(std::span<const TokenId> history, TokenId word) const {
  return std::log(prob(history, word));
}

void NGramModel::save(std::ostream& os) const {
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "order " << order_ << '\n';
  std::ostringstream d;
  d.precision(17);
  d << discount_;
  os << "discount " << d.str() << '\n';
  os << "vocab " << vocab_.size() << '\n';
  for (const auto& w : vocab_) os << w << '\n';
  for (int k = 1; k <= order_; ++k) {
    std::vector<std::pair<Key, double>> sorted(counts_[k - 1].begin(), counts_[k - 1].end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.first.ids.begin(), a.first.ids.begin() + a.first.size,
                                          b.first.ids.begin(), b.first.ids.begin() + b.first.size);
    });
    os << "ngrams " << k << ' ' << sorted.size() << '\n';
    for (const auto& [key, c] : sorted) {
      for (int i = 0; i < key.size; ++i) os << (i ? " " : "") << key.ids[i];
      os << '\t' << c << '\n';
    }
  }
}

NGramModel NGramModel::load(std::istream& is) {
  auto fail = [](const std::string& why) -> void {
    throw std::runtime_error("n-gram model file: " + why);
  };
  NGramModel model;
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kMagic) fail("missing header");
  if (version != kFormatVersion) fail("unsupported version " + std::to_string(version));

  std::string field;
  std::size_t vocab_size = 0;
  if (!(is >> field >> model.order_) || field != "order") fail("missing order");
  if (model.order_ < 1 || model.order_ > kMaxOrder) fail("bad order");
  if (!(is >> field >> model.discount_) || field != "discount") fail("missing discount");
  if (!(is >> field >> vocab_size) || field != "vocab") fail("missing vocab");
  std::string line;
  std::getline(is, line);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!std::getline(is, line)) fail("truncated vocabulary");
    model.index_.emplace(line, static_cast<TokenId>(model.vocab_.size()));
    model.vocab_.push_back(line);
  }
  model.counts_.assign(model.order_, {});
  for (int k = 1; k <= model.order_; ++k) {
    int level = 0;
    std::size_t n = 0;
    if (!(is >> field >> level >> n) || field != "ngrams" || level != k) fail("bad n-gram block");
    for (std::size_t e = 0; e < n; ++e) {
      Key key;
      key.size = k;
      for (int i = 0; i < k; ++i) {
        if (!(is >> key.ids[i])) fail("truncated n-gram block");
        if (key.ids[i] < 0 || static_cast<std::size_t>(key.ids[i]) >= vocab_size) fail("bad id");
      }
      double c = 0.0;
      if (!(is >> c)) fail("truncated n-gram block");
      model.counts_[k - 1][key] = c;
    }
  }
  model.build_context_stats();
  return model;
}

NGramScorer::NGramScorer(std::shared_ptr<const NGramModel> model) : model_(std::move(model)) {}

std::vector<TokenId> NGramScorer::tokenize(std::string_view word) const {
  std::vector<TokenId> out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    const auto start = word.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    const auto end = std::min(word.find(' ', start), word.size());
    out.push_back(model_->id(word.substr(start, end - start)));
    pos = end;
  }
  if (out.empty()) throw std::invalid_argument("cannot tokenize an empty word");
  return out;
}

ScorerState NGramScorer::begin() const {
  return {std::vector<TokenId>(model_->order() - 1, model_->sentence_end_id())};
}

ScorerState NGramScorer::advance(const ScorerState& state, TokenId token) const {
  ScorerState next;
  const std::size_t keep = static_cast<std::size_t>(model_->order() - 1);
  if (keep == 0) return next;
  const auto& ctx = state.context;
  const std::size_t from = ctx.size() + 1 > keep ? ctx.size() + 1 - keep : 0;
  next.context.assign(ctx.begin() + static_cast<std::ptrdiff_t>(std::min(from, ctx.size())), ctx.end());
  next.context.push_back(token);
  return next;
}

std::pair<ScorerState, double> NGramScorer::extend(const ScorerState& state, TokenId token) const {
  return {advance(state, token), model_->log_prob(state.context, token)};
}

double perplexity(const NGramModel& model, const std::vector<std::vector<std::string>>& docs) {
  const NGramScorer scorer(std::shared_ptr<const NGramModel>(&model, [](const NGramModel*) {}));
  double nll = 0.0;
  std::size_t n = 0;
  for (const auto& doc : docs) {
    ScorerState state = scorer.begin();
    for (const auto& w : doc) {
      auto [next, lp] = scorer.extend(state, model.id(w));
      nll -= lp;
      ++n;
      state = std::move(next);
    }
  }
  if (n == 0) throw std::domain_error("perplexity of an empty text");
  return std::exp(nll / static_cast<double>(n));
}

}  // namespace bookcode
