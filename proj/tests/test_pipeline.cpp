#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "bookcode/io.hpp"
#include "bookcode/ngram.hpp"
#include "bookcode/pipeline.hpp"

using namespace bookcode;

namespace {

std::string data(const std::string& rel) { return std::string(BOOKCODE_DATA_DIR "/") + rel; }

struct Fixture {
  SynthKey key{{read_word_file(data("key_dictionary.txt")), {}, table_words(), {160, 1218}}};
  ReferenceDict reference{read_word_file(data("reference_dictionary.txt"))};
  std::vector<std::vector<std::string>> lm_docs = tokenize_paragraphs(read_text_file(data("corpus/letters_lm.txt")));
  NGramScorer scorer{std::make_shared<const NGramModel>(NGramModel::train(lm_docs, 3))};
  std::vector<std::string> common = most_common_words(lm_docs, 1000);
  std::vector<std::string> parallel = tokenize_text(read_text_file(data("corpus/letters_parallel.txt")));
  std::vector<std::string> heldout = tokenize_text(read_text_file(data("corpus/letters_heldout.txt")));

  static std::vector<std::string> table_words() {
    auto w = read_word_file(data("table_words.txt"));
    w.resize(1000);
    return w;
  }

  LatticeConfig lattice_config() const {
    LatticeConfig cfg;
    cfg.common_words = common;
    return cfg;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::vector<std::string> first_words(const std::vector<std::string>& words, std::size_t n) {
  return {words.begin(), words.begin() + static_cast<std::ptrdiff_t>(std::min(n, words.size()))};
}

}  // namespace

TEST_CASE("text tokenization") {
  CHECK(tokenize_text("Sir, I have the Honor!  Yours &c.") ==
        std::vector<std::string>{"sir", "i", "have", "the", "honor", ".", "yours", "c", "."});
  CHECK(tokenize_text("... don't; wait:") == std::vector<std::string>{"don't", ".", "wait", "."});
  CHECK(tokenize_text("").empty());
  CHECK(tokenize_paragraphs("one two.\n\n\nthree\n").size() == 2);
  const std::vector<std::vector<std::string>> docs = {{"b", "a", ".", "b"}, {"c", "a", "b"}};
  CHECK(most_common_words(docs, 2) == std::vector<std::string>{"b", "a"});
  CHECK(most_common_words(docs, 10) == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("synthetic key encodes by position") {
  std::vector<std::string> dict;
  for (int i = 0; i < 3000; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "w%04d", i);
    dict.push_back(buf);
  }
  const SynthKey key({dict, {}, {"the", "and", "a"}, {160, 1218}});
  CHECK(render(key.encode("w1304").first) == "29.[29]-");
  CHECK(key.encode("a").first == CipherToken{TableCode{160, {}}});
  CHECK(key.encode("and").first == CipherToken{TableCode{161, {}}});
  CHECK(key.encode("the").first == CipherToken{TableCode{162, {}}});
  CHECK(key.encode("natchez").first == CipherToken{Literal{"natchez"}});
  CHECK(key.encode(".").first == CipherToken{SentenceEnd{}});
  CHECK(key.full_wordbank().size() == 3003);
  CHECK(check_monotonic(key.full_wordbank()).empty());
  CHECK_THROWS_AS(SynthKey({{"b", "a"}, {}, {}, {160, 1218}}), std::invalid_argument);
}

TEST_CASE("inflected forms carry a marker") {
  const SynthKey key({{"answer", "be", "find"}, {}, {}, {160, 1218}});
  const auto [tok, gold] = key.encode("answers");
  CHECK(tok == CipherToken{DictCode{7, 1, 1, "s"}});
  CHECK(gold == GoldToken{"answers", "answer"});
  CHECK(std::get<DictCode>(key.encode("being").first).suffix == "ing");
}

TEST_CASE("enciphered text survives rendering and parsing") {
  const auto& f = fixture();
  const auto text = f.key.encipher(f.heldout);
  CHECK(parse_document(render_document(text.cipher)) == text.cipher);
  CHECK(text.gold.size() == f.heldout.size());
}

TEST_CASE("full key deciphers every in-dictionary token") {
  const auto& f = fixture();
  const auto text = f.key.encipher(f.heldout);
  const auto path = beam_decode(build_lattice(text.cipher, f.key.full_wordbank(), f.reference, f.lattice_config()),
                                f.scorer);
  std::size_t in_dict = 0, marked = 0, marked_right = 0;
  for (std::size_t i = 0; i < text.gold.size(); ++i) {
    if (!is_code(text.cipher[i])) {
      CHECK(path.steps[i].word == text.gold[i].surface);
      continue;
    }
    if (text.gold[i].surface == text.gold[i].lemma) {
      ++in_dict;
      CHECK(path.steps[i].word == text.gold[i].surface);
    } else {
      ++marked;
      marked_right += path.steps[i].word == text.gold[i].surface;
    }
  }
  CHECK(in_dict > 500);
  MESSAGE(in_dict << " in-dictionary tokens; " << marked_right << " of " << marked
                  << " marker-inflected tokens recovered");
}

TEST_CASE("evaluate counts") {
  DecodePath p;
  const auto step = [](std::string w, SegmentKind k) {
    PathStep s;
    s.word = std::move(w);
    s.kind = k;
    return s;
  };
  p.steps = {step("a", SegmentKind::Exact), step("b", SegmentKind::Interpolated),
             step("c", SegmentKind::Interpolated), step("x", SegmentKind::Interpolated),
             step("natchez", SegmentKind::Literal)};
  const std::vector<std::string> gold = {"a", "b", "c", "d", "natchez"};
  const auto m = evaluate(p, gold);
  CHECK(m.code_tokens == 4);
  CHECK(m.token_accuracy == 0.75);
  CHECK(m.coverage == 0.25);
  CHECK(evaluate(p, gold, true).token_accuracy == doctest::Approx(0.8));
  CHECK(evaluate(p, p.words()).token_accuracy == 1.0);
  CHECK_THROWS_AS(evaluate(p, std::vector<std::string>{"a"}), std::domain_error);
}

TEST_CASE("parallel prefix extraction is nested") {
  const auto& f = fixture();
  const auto text = f.key.encipher(f.parallel);
  std::size_t prev = 0;
  Wordbank prev_wb = f.key.empty_wordbank();
  for (std::size_t n : {0, 50, 500, 1000, 2000, 100000}) {
    const auto pairs = parallel_prefix(text, n);
    const auto r = extract_wordbank(pairs, f.key.empty_wordbank());
    CHECK(r.conflicts.empty());
    CHECK(check_monotonic(r.wordbank).empty());
    CHECK(r.wordbank.size() >= prev);
    for (const auto& [code, w] : prev_wb.dict_entries) CHECK(r.wordbank.dict_entries.at(code) == w);
    for (const auto& [code, w] : prev_wb.table_entries) CHECK(r.wordbank.table_entries.at(code) == w);
    for (const auto& p : pairs) CHECK(r.wordbank.lookup(p.token) == p.plaintext);
    prev = r.wordbank.size();
    prev_wb = r.wordbank;
  }
}

TEST_CASE("gold words appear between their anchors") {
  const auto& f = fixture();
  const auto train = f.key.encipher(f.parallel);
  const auto wb = extract_wordbank(parallel_prefix(train, 1000), f.key.empty_wordbank()).wordbank;
  const auto test = f.key.encipher(f.heldout);
  const auto lat = build_lattice(test.cipher, wb, f.reference, f.lattice_config());
  std::size_t checked = 0;
  for (std::size_t i = 0; i < lat.segments.size(); ++i) {
    const auto& s = lat.segments[i];
    if (s.kind != SegmentKind::Interpolated) continue;
    const auto& lemma = test.gold[i].lemma;
    if (!f.reference.contains(lemma)) continue;
    const auto& ap = std::get<AnchorPair>(anchors_for(test.cipher[i], wb));
    if ((!ap.open_below && !(ap.lower.word < lemma)) || (!ap.open_above && !(lemma < ap.upper.word))) continue;
    ++checked;
    const bool present = std::any_of(s.candidates.begin(), s.candidates.end(),
                                     [&](const Candidate& c) { return c.word == test.gold[i].surface; });
    CAPTURE(test.gold[i].surface);
    CHECK(present);
  }
  CHECK(checked > 50);
}

TEST_CASE("self-learning contract") {
  const auto& f = fixture();
  const auto train = f.key.encipher(f.parallel);
  const auto test = f.key.encipher(first_words(f.heldout, 600));
  const auto gold = surfaces(test.gold);
  const auto wb = extract_wordbank(parallel_prefix(train, 500), f.key.empty_wordbank()).wordbank;
  SelfLearnConfig cfg;
  cfg.iterations = 3;
  const auto r = self_learn(test.cipher, wb, f.reference, f.scorer, f.lattice_config(), {}, cfg, gold);
  REQUIRE(!r.rounds.empty());
  CHECK(r.rounds.size() <= 3);
  CHECK(r.rounds[0].wordbank_size == wb.size());
  for (std::size_t i = 1; i < r.rounds.size(); ++i) {
    CHECK(r.rounds[i].wordbank_size >= r.rounds[i - 1].wordbank_size);
    CHECK(r.rounds[i].wordbank_size == r.rounds[i - 1].wordbank_size + r.rounds[i - 1].promoted);
  }
  CHECK(r.wordbank.size() >= wb.size());
  for (const auto& [code, w] : wb.dict_entries) CHECK(r.wordbank.dict_entries.at(code) == w);
  CHECK(check_monotonic(r.wordbank).empty());
  CHECK(std::isfinite(r.final_accuracy));
  CHECK(r.final_accuracy >= r.rounds[0].accuracy - 0.01);
}

TEST_CASE("self-learning stops at a covered fixpoint") {
  const auto& f = fixture();
  const auto test = f.key.encipher(first_words(f.heldout, 200));
  const auto full = f.key.full_wordbank();
  const auto r = self_learn(test.cipher, full, f.reference, f.scorer, f.lattice_config(), {}, {});
  CHECK(r.rounds.size() == 1);
  CHECK(r.rounds[0].promoted == 0);
  CHECK(r.wordbank == full);
}

TEST_CASE("data efficiency trends") {
  const auto& f = fixture();
  EfficiencyInputs in;
  in.key = &f.key;
  in.parallel_words = f.parallel;
  in.test_words = f.heldout;
  in.reference = &f.reference;
  in.scorer = &f.scorer;
  in.lattice = f.lattice_config();
  in.frequency_list = f.common;
  in.jobs = 3;
  const std::vector<std::size_t> sizes = {100, 500, 2000, 1000000};
  const auto report = data_efficiency(sizes, in);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.warnings.size() == 1);
  CHECK(report.rows[3].parallel_tokens < 1000000);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i].wordbank_size >= report.rows[i - 1].wordbank_size);
    CHECK(report.rows[i].coverage >= report.rows[i - 1].coverage);
  }
  for (const auto& r : report.rows) {
    CHECK(r.oracle_accuracy >= r.accuracy);
    CHECK(r.accuracy >= r.coverage);
  }
  // Sequential and threaded runs agree.
  in.jobs = 1;
  const auto serial = data_efficiency(sizes, in);
  for (std::size_t i = 0; i < sizes.size(); ++i) CHECK(serial.rows[i].accuracy == report.rows[i].accuracy);

  std::ostringstream tsv, json;
  write_efficiency_tsv(tsv, report);
  write_efficiency_json(json, report);
  CHECK(tsv.str().rfind("parallel_tokens\twordbank_size\tcoverage\taccuracy", 0) == 0);
  CHECK(json.str().find("\"coverage\"") != std::string::npos);
}
