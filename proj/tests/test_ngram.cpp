#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "bookcode/io.hpp"
#include "bookcode/ngram.hpp"
#include "bookcode/pipeline.hpp"

using namespace bookcode;

namespace {

using Gram = std::vector<std::string>;

// Textbook interpolated Kneser-Ney from raw string n-gram counts.
class CountOracle {
 public:
  CountOracle(const std::vector<std::vector<std::string>>& docs, int order, double d)
      : order_(order), d_(d) {
    vocab_.insert("<unk>");
    vocab_.insert(".");
    for (const auto& doc : docs) {
      Gram padded(order - 1, ".");
      padded.insert(padded.end(), doc.begin(), doc.end());
      vocab_.insert(doc.begin(), doc.end());
      for (std::size_t i = order - 1; i < padded.size(); ++i) {
        top_[Gram(padded.begin() + i + 1 - order, padded.begin() + i + 1)] += 1;
        for (int j = 2; j <= order; ++j) distinct_.insert(Gram(padded.begin() + i + 1 - j, padded.begin() + i + 1));
      }
    }
  }

  double prob(const Gram& history, const std::string& w) const { return p(order_, history, w); }

 private:
  // Count used at level k: raw for the top order, continuation otherwise.
  double c(const Gram& g) const {
    if (static_cast<int>(g.size()) == order_) {
      auto it = top_.find(g);
      return it == top_.end() ? 0 : it->second;
    }
    double n = 0;
    for (const auto& x : distinct_) {
      if (x.size() == g.size() + 1 && std::equal(g.begin(), g.end(), x.begin() + 1)) n += 1;
    }
    return n;
  }

  double p(int k, const Gram& history, const std::string& w) const {
    const double lower = k == 1 ? 1.0 / vocab_.size() : p(k - 1, history, w);
    if (static_cast<int>(history.size()) < k - 1) return lower;
    const Gram h(history.end() - (k - 1), history.end());
    double total = 0, types = 0;
    for (const auto& v : vocab_) {
      Gram g = h;
      g.push_back(v);
      const double n = c(g);
      total += n;
      types += n > 0;
    }
    if (total == 0) return lower;
    Gram g = h;
    g.push_back(w);
    return (std::max(c(g) - d_, 0.0) + d_ * types * lower) / total;
  }

  int order_;
  double d_;
  std::set<std::string> vocab_;
  std::map<Gram, double> top_;
  std::set<Gram> distinct_;
};

const std::vector<std::vector<std::string>> kToy = {{"a", "b", ".", "a", "b", ".", "a", "c", "."}};

std::vector<TokenId> ids(const NGramModel& m, const Gram& words) {
  std::vector<TokenId> out;
  for (const auto& w : words) out.push_back(m.id(w));
  return out;
}

const std::vector<std::vector<std::string>>& letters() {
  static const auto docs = tokenize_paragraphs(read_text_file(BOOKCODE_DATA_DIR "/corpus/letters_lm.txt"));
  return docs;
}

// Paragraphs long enough to draw contexts from.
std::vector<std::vector<std::string>> long_paragraphs(std::size_t n) {
  std::vector<std::vector<std::string>> out;
  for (const auto& d : letters()) {
    if (d.size() >= 40) out.push_back(d);
    if (out.size() == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("toy bigram by hand") {
  const auto m = NGramModel::train(kToy, 2);
  CHECK(m.vocab_size() == 5);
  // Unsmoothed relative frequency is 2/3; P_kn(b) = (0.25 + 0.75 * 4 / 5) / 5.
  const double p1b = (0.25 + 0.75 * 4.0 / 5.0) / 5.0;
  CHECK(p1b == doctest::Approx(0.17));
  const double expected = (2 - 0.75 + 0.75 * 2 * p1b) / 3;
  CHECK(m.prob(ids(m, {"a"}), m.id("b")) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(m.count(ids(m, {"a", "b"})) == 2);
}

TEST_CASE("toy models agree with the count oracle") {
  for (int order : {1, 2, 3, 4}) {
    const auto m = NGramModel::train(kToy, order);
    const CountOracle oracle(kToy, order, 0.75);
    const Gram words = {"<unk>", ".", "a", "b", "c", "zz"};
    for (const auto& h1 : words)
      for (const auto& h2 : words)
        for (const auto& w : words) {
          const Gram h = {h1, h2};
          CHECK(m.prob(ids(m, h), m.id(w)) == doctest::Approx(oracle.prob(h, w == "zz" ? "<unk>" : w)).epsilon(1e-9));
        }
  }
}

TEST_CASE("letter corpus trigram agrees with the count oracle") {
  const auto docs = long_paragraphs(6);
  const auto m = NGramModel::train(docs, 3);
  const CountOracle oracle(docs, 3, 0.75);
  std::mt19937 rng(2);
  const auto& v = m.vocabulary();
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  for (int n = 0; n < 60; ++n) {
    const Gram h = {v[pick(rng)], v[pick(rng)]};
    const auto w = v[pick(rng)];
    CHECK(m.prob(ids(m, h), m.id(w)) == doctest::Approx(oracle.prob(h, w)).epsilon(1e-9));
  }
  // Seen trigrams exercise the discounted branch.
  const auto& d = docs[0];
  for (std::size_t i = 2; i < 30; ++i) {
    const Gram h = {d[i - 2], d[i - 1]};
    CHECK(m.prob(ids(m, h), m.id(d[i])) == doctest::Approx(oracle.prob(h, d[i])).epsilon(1e-9));
  }
}

TEST_CASE("distributions are normalized") {
  const auto m1 = NGramModel::train({{"one", "sentence", "of", "one", "kind", "."}}, 1);
  double s = 0;
  for (std::size_t w = 0; w < m1.vocab_size(); ++w) s += m1.prob({}, static_cast<TokenId>(w));
  CHECK(s == doctest::Approx(1.0).epsilon(1e-6));

  const auto m = NGramModel::train(letters(), 3);
  const auto paras = long_paragraphs(50);
  std::mt19937 rng(9);
  std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(m.vocab_size() - 1));
  for (int n = 0; n < 100; ++n) {
    std::vector<TokenId> h = {pick(rng), pick(rng)};
    if (n % 2) {
      // A context that occurs in the corpus.
      const auto& doc = paras[n % paras.size()];
      const std::size_t i = 2 + (n * 13) % (doc.size() - 2);
      h = ids(m, {doc[i - 2], doc[i - 1]});
    }
    double total = 0;
    for (std::size_t w = 0; w < m.vocab_size(); ++w) total += m.prob(h, static_cast<TokenId>(w));
    CHECK(std::abs(total - 1.0) <= 1e-6);
  }
}

TEST_CASE("scorer interface") {
  auto model = std::make_shared<const NGramModel>(NGramModel::train(kToy, 2));
  const NGramScorer scorer(model);
  CHECK(scorer.tokenize("b") == std::vector<TokenId>{model->id("b")});
  CHECK(scorer.tokenize("a b").size() == 2);
  CHECK(scorer.tokenize("sorry") == std::vector<TokenId>{model->unknown_id()});
  CHECK_THROWS_AS(scorer.tokenize(""), std::invalid_argument);
  CHECK(score_sequence(scorer, {}) == 0.0);

  const auto s0 = scorer.begin();
  const auto [s1, lp1] = scorer.extend(s0, model->id("a"));
  const auto [s1b, lp1b] = scorer.extend(s0, model->id("a"));
  CHECK(s1 == s1b);
  CHECK(lp1 == lp1b);
  CHECK(scorer.advance(s0, model->id("a")) == s1);
  const auto [s2, lp2] = scorer.extend(s1, model->id("b"));
  CHECK(lp2 == doctest::Approx(std::log(model->prob(ids(*model, {"a"}), model->id("b")))));
  CHECK(score_sequence(scorer, {"a", "b"}) == doctest::Approx(lp1 + lp2));
  const std::vector<TokenId> next = {0, 1, 2, 3, 4};
  const auto batch = scorer.score_next(s1, next);
  for (std::size_t i = 0; i < next.size(); ++i) {
    CHECK(batch[i] == scorer.extend(s1, next[i]).second);
    CHECK(batch[i] <= 0.0);
    CHECK(std::isfinite(batch[i]));
  }
}

TEST_CASE("save and load") {
  const auto m = NGramModel::train(letters(), 3);
  std::stringstream ss;
  m.save(ss);
  const auto back = NGramModel::load(ss);
  CHECK(back.vocabulary() == m.vocabulary());
  CHECK(back.order() == 3);
  std::mt19937 rng(4);
  std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(m.vocab_size() - 1));
  for (int n = 0; n < 500; ++n) {
    const std::vector<TokenId> h = {pick(rng), pick(rng)};
    const TokenId w = pick(rng);
    CHECK(back.prob(h, w) == m.prob(h, w));
  }
  std::istringstream bad("bookcode-ngram 9\n");
  CHECK_THROWS(NGramModel::load(bad));
  CHECK_THROWS_AS(NGramModel::train({}, 3), std::domain_error);
  CHECK_THROWS_AS(NGramModel::train(kToy, 0), std::domain_error);
}

TEST_CASE("held-out perplexity beats the uniform model") {
  const auto m = NGramModel::train(letters(), 3);
  const auto held = tokenize_paragraphs(read_text_file(BOOKCODE_DATA_DIR "/corpus/letters_heldout.txt"));
  const double ppl = perplexity(m, held);
  MESSAGE("held-out perplexity " << ppl << ", vocabulary " << m.vocab_size());
  CHECK(ppl < static_cast<double>(m.vocab_size()));
  CHECK(ppl > 1.0);
}
