// Command-line front end for the book-code solver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bookcode/decoder.hpp"
#include "bookcode/external_scorer.hpp"
#include "bookcode/io.hpp"
#include "bookcode/lattice.hpp"
#include "bookcode/ngram.hpp"
#include "bookcode/pipeline.hpp"
#include "bookcode/transcript.hpp"
#include "bookcode/wordbank.hpp"

namespace bc = bookcode;

namespace {

struct Output {
  std::string path;

  // stdout when no path was given.
  std::ostream& stream() {
    if (path.empty() || path == "-") return std::cout;
    if (!file_) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    }
    return *file_;
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::unique_ptr<bc::Scorer> make_scorer(const std::string& desc) {
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : desc.substr(colon + 1);
  if (kind == "ngram" && !arg.empty()) {
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open '" + arg + "'");
    try {
      return std::make_unique<bc::NGramScorer>(
          std::make_shared<const bc::NGramModel>(bc::NGramModel::load(in)));
    } catch (const std::exception& e) {
      throw std::runtime_error(arg + ": " + e.what());
    }
  }
  if (kind == "external" && !arg.empty()) return std::make_unique<bc::ExternalScorer>(arg);
  throw std::runtime_error("scorer must be ngram:<model-file> or external:<command>, got '" + desc +
                           "'");
}

bc::Wordbank load_wordbank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return bc::read_wordbank(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

bc::Lattice load_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return bc::read_lattice_json(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::vector<bc::GoldToken> load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return bc::read_gold(in, path);
}

std::vector<std::string> text_words(const std::string& path) {
  return bc::tokenize_text(bc::read_text_file(path));
}

struct LatticeOptions {
  std::string wordbank;
  std::string reference;
  std::string common_words;
  double beta = 5.0;
  std::string proper_noun = "america";
  bool no_inflect = false;

  void add(CLI::App* app, bool required = true) {
    app->add_option("--wordbank", wordbank, "Wordbank TSV")->required(required);
    app->add_option("--reference", reference, "Reference dictionary, one lemma per line")
        ->required(required);
    app->add_option("--common-words", common_words,
                    "Fallback words for codes outside the alphabetic sections");
    app->add_option("--beta", beta, "Sharpness of the interpolation distribution")
        ->check(CLI::Range(2.0, 1e6));
    app->add_option("--proper-noun", proper_noun, "Placeholder for the proper-noun table section");
    app->add_flag("--no-inflect", no_inflect, "Do not expand candidates with inflections");
  }

  bc::LatticeConfig config(int jobs) const {
    bc::LatticeConfig cfg;
    cfg.sharpness = beta;
    cfg.proper_noun = proper_noun;
    cfg.inflect = !no_inflect;
    cfg.jobs = jobs;
    if (!common_words.empty()) cfg.common_words = bc::read_word_file(common_words);
    return cfg;
  }
};

struct DecodeFlags {
  std::size_t beam = 4;
  double lattice_weight = 1.0;
  std::string scorer;

  void add(CLI::App* app) {
    app->add_option("--beam", beam, "Beam size")->check(CLI::PositiveNumber);
    app->add_option("--lattice-weight,-a", lattice_weight, "Weight of lattice log probabilities")
        ->check(CLI::PositiveNumber);
    app->add_option("--scorer", scorer, "ngram:<model-file> or external:<command>")->required();
  }
};

void print_wordbank_report(const bc::ExtractResult& r) {
  for (const auto& c : r.conflicts) {
    std::cerr << "conflict: " << bc::to_string(c.section) << ' ' << c.position << " kept '" << c.kept
              << "', rejected '" << c.rejected << "'\n";
  }
  for (const auto& v : bc::check_monotonic(r.wordbank)) {
    std::cerr << "order violation: " << bc::to_string(v.section) << ' ' << v.lower_position << " '"
              << v.lower_word << "' > " << v.upper_position << " '" << v.upper_word << "'\n";
  }
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const auto v = std::stoull(item, &pos);
    if (pos != item.size() || v == 0) throw std::runtime_error("bad size '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::runtime_error("no sizes given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Known-plaintext solver for dictionary book codes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "bookcode 1.0");
  unsigned seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "Random seed (every stage is deterministic)");
  app.add_option("--jobs,-j", jobs, "Worker threads for lattice building and trials")
      ->check(CLI::Range(1, 256));

  // parse
  auto* parse = app.add_subcommand("parse", "Parse a cipher transcription");
  std::string parse_in;
  bool parse_index = false;
  Output parse_out;
  parse->add_option("input", parse_in, "Transcription file")->required();
  parse->add_flag("--index", parse_index, "Add the section and position of each code");
  parse->add_option("-o,--output", parse_out.path, "Output file (default stdout)");
  parse->callback([&] {
    const auto tokens = bc::read_cipher_file(parse_in);
    auto& os = parse_out.stream();
    const bc::Wordbank layout;
    for (const auto& t : tokens) {
      os << bc::render(t);
      if (parse_index && bc::is_code(t)) {
        const auto [section, pos] = layout.position_of(t);
        os << '\t' << bc::to_string(section) << '\t' << pos;
      }
      os << '\n';
    }
  });

  // wordbank
  auto* wordbank = app.add_subcommand("wordbank", "Extract a wordbank from aligned pairs");
  std::string wb_in;
  Output wb_out;
  int alpha_lo = 160, alpha_hi = 1218, first_page = 7, dict_extent = 44892;
  wordbank->add_option("input", wb_in, "Aligned cipher<TAB>plaintext file")->required();
  wordbank->add_option("-o,--output", wb_out.path, "Wordbank TSV (default stdout)");
  wordbank->add_option("--alpha-lo", alpha_lo, "First code of the alphabetic table section");
  wordbank->add_option("--alpha-hi", alpha_hi, "Last code of the alphabetic table section");
  wordbank->add_option("--first-page", first_page, "First content page of the dictionary");
  wordbank->add_option("--dict-extent", dict_extent, "Number of words in the dictionary");
  wordbank->callback([&] {
    std::ifstream in(wb_in);
    if (!in) throw std::runtime_error("cannot open '" + wb_in + "'");
    bc::Wordbank base;
    base.alpha_range = {alpha_lo, alpha_hi};
    base.geometry.first_content_page = first_page;
    base.dict_extent = dict_extent;
    const auto result = bc::extract_wordbank(bc::read_parallel(in, wb_in), base);
    print_wordbank_report(result);
    bc::write_wordbank(wb_out.stream(), result.wordbank);
  });

  // lattice
  auto* lattice = app.add_subcommand("lattice", "Build the decipherment lattice");
  std::string lat_cipher;
  LatticeOptions lat_opts;
  Output lat_out;
  lattice->add_option("--cipher", lat_cipher, "Transcription file")->required();
  lat_opts.add(lattice);
  lattice->add_option("-o,--output", lat_out.path, "Lattice JSON (default stdout)");
  lattice->callback([&] {
    const auto lat = bc::build_lattice(bc::read_cipher_file(lat_cipher),
                                       load_wordbank(lat_opts.wordbank),
                                       bc::ReferenceDict(bc::read_word_file(lat_opts.reference)),
                                       lat_opts.config(jobs));
    bc::write_lattice_json(lat_out.stream(), lat);
    std::cerr << lat.segments.size() << " segments, " << lat.mean_candidates()
              << " candidates per segment on average\n";
  });

  // decode
  auto* decode = app.add_subcommand("decode", "Extract the best path through a lattice");
  std::string dec_lattice, dec_cipher;
  LatticeOptions dec_lat_opts;
  DecodeFlags dec_flags;
  bool dec_timing = false, dec_exhaustive = false, dec_no_trie = false;
  Output dec_out;
  decode->add_option("--lattice", dec_lattice, "Lattice JSON");
  decode->add_option("--cipher", dec_cipher, "Transcription file (builds the lattice first)");
  dec_lat_opts.add(decode, false);
  dec_flags.add(decode);
  decode->add_flag("--timing", dec_timing, "Append the runtime to the footer");
  decode->add_flag("--exhaustive", dec_exhaustive, "Enumerate every path (small lattices only)");
  decode->add_flag("--no-trie", dec_no_trie, "Score candidates one by one");
  decode->add_option("-o,--output", dec_out.path, "Path TSV (default stdout)");
  decode->callback([&] {
    if (dec_lattice.empty() == dec_cipher.empty()) {
      throw std::runtime_error("decode needs exactly one of --lattice or --cipher");
    }
    bc::Lattice lat;
    if (!dec_lattice.empty()) {
      lat = load_lattice(dec_lattice);
    } else {
      if (dec_lat_opts.wordbank.empty() || dec_lat_opts.reference.empty()) {
        throw std::runtime_error("--cipher needs --wordbank and --reference");
      }
      lat = bc::build_lattice(bc::read_cipher_file(dec_cipher), load_wordbank(dec_lat_opts.wordbank),
                              bc::ReferenceDict(bc::read_word_file(dec_lat_opts.reference)),
                              dec_lat_opts.config(jobs));
    }
    const auto scorer = make_scorer(dec_flags.scorer);
    bc::DecodePath path;
    if (dec_exhaustive) {
      path = bc::exhaustive_decode(lat, *scorer, dec_flags.lattice_weight);
    } else {
      path = bc::beam_decode(lat, *scorer,
                             {dec_flags.beam, dec_flags.lattice_weight, !dec_no_trie});
    }
    bc::write_path_tsv(dec_out.stream(), path, dec_timing);
  });

  // self-learn
  auto* learn = app.add_subcommand("self-learn", "Iteratively grow the wordbank from decodings");
  std::string sl_cipher, sl_gold, sl_wb_out;
  LatticeOptions sl_lat_opts;
  DecodeFlags sl_flags;
  bc::SelfLearnConfig sl_cfg;
  Output sl_out;
  learn->add_option("--cipher", sl_cipher, "Transcription file")->required();
  sl_lat_opts.add(learn);
  sl_flags.add(learn);
  learn->add_option("--iterations", sl_cfg.iterations, "Maximum rounds")->check(CLI::PositiveNumber);
  learn->add_option("--promote-fraction", sl_cfg.promote_fraction,
                    "Fraction of interpolated tokens promoted per round")
      ->check(CLI::Range(1e-9, 1.0));
  learn->add_option("--min-confidence", sl_cfg.min_confidence,
                    "Lowest per-token score (lm + a * lattice) that may be promoted");
  learn->add_option("--gold", sl_gold, "Gold file; reports accuracy per round");
  learn->add_option("--wordbank-out", sl_wb_out, "Write the grown wordbank here");
  learn->add_option("-o,--output", sl_out.path, "Final path TSV (default stdout)");
  learn->callback([&] {
    const auto doc = bc::read_cipher_file(sl_cipher);
    std::vector<std::string> gold;
    if (!sl_gold.empty()) gold = bc::surfaces(load_gold(sl_gold));
    const auto scorer = make_scorer(sl_flags.scorer);
    const auto result = bc::self_learn(
        doc, load_wordbank(sl_lat_opts.wordbank),
        bc::ReferenceDict(bc::read_word_file(sl_lat_opts.reference)), *scorer,
        sl_lat_opts.config(jobs), {sl_flags.beam, sl_flags.lattice_weight, true}, sl_cfg, gold);
    for (const auto& r : result.rounds) {
      std::cerr << "round " << r.round << ": wordbank " << r.wordbank_size << ", promoted "
                << r.promoted << ", rejected " << r.rejected;
      if (!gold.empty()) std::cerr << ", accuracy " << r.accuracy;
      std::cerr << '\n';
    }
    if (!gold.empty()) std::cerr << "final accuracy " << result.final_accuracy << '\n';
    if (!sl_wb_out.empty()) {
      std::ofstream wb(sl_wb_out);
      if (!wb) throw std::runtime_error("cannot write '" + sl_wb_out + "'");
      bc::write_wordbank(wb, result.wordbank);
    }
    bc::write_path_tsv(sl_out.stream(), result.path);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Encipher plain text with a synthetic key");
  std::string sy_text, sy_key, sy_table, sy_gold, sy_parallel, sy_full_key;
  std::size_t sy_table_size = 1000, sy_parallel_tokens = 0;
  Output sy_out;
  synth->add_option("--text", sy_text, "Plain text to encipher")->required();
  synth->add_option("--key-dictionary", sy_key, "Sorted word list shared by the correspondents")
      ->required();
  synth->add_option("--table-words", sy_table, "Frequency-ordered word list for the table")
      ->required();
  synth->add_option("--table-size", sy_table_size, "Number of table words");
  synth->add_option("--gold", sy_gold, "Write the gold alignment here");
  synth->add_option("--parallel", sy_parallel, "Write aligned pairs for the first N word tokens");
  synth->add_option("--parallel-tokens", sy_parallel_tokens, "N for --parallel (default: all)");
  synth->add_option("--full-key", sy_full_key, "Write the complete key as a wordbank");
  synth->add_option("-o,--output", sy_out.path, "Transcription (default stdout)");
  synth->callback([&] {
    auto table = bc::read_word_file(sy_table);
    if (table.size() > sy_table_size) table.resize(sy_table_size);
    const bc::SynthKey key({bc::read_word_file(sy_key), {}, table, {160, 1218}});
    const auto text = key.encipher(text_words(sy_text));
    sy_out.stream() << bc::render_document(text.cipher) << '\n';
    const auto write = [](const std::string& path, auto&& fn) {
      std::ofstream os(path);
      if (!os) throw std::runtime_error("cannot write '" + path + "'");
      fn(os);
    };
    if (!sy_gold.empty()) write(sy_gold, [&](std::ostream& os) { bc::write_gold(os, text.gold); });
    if (!sy_parallel.empty()) {
      const auto n = sy_parallel_tokens == 0 ? text.gold.size() : sy_parallel_tokens;
      write(sy_parallel, [&](std::ostream& os) { bc::write_parallel(os, bc::parallel_prefix(text, n)); });
    }
    if (!sy_full_key.empty()) {
      write(sy_full_key, [&](std::ostream& os) { bc::write_wordbank(os, key.full_wordbank()); });
    }
  });

  // data-efficiency
  auto* eff = app.add_subcommand("data-efficiency",
                                 "Accuracy as a function of the amount of parallel text");
  std::string ef_parallel, ef_test, ef_key, ef_table, ef_sizes = "500,1000,2000", ef_json,
                                                            ef_freq;
  std::size_t ef_table_size = 1000;
  LatticeOptions ef_lat_opts;
  DecodeFlags ef_flags;
  Output ef_out;
  eff->add_option("--parallel-text", ef_parallel, "Text whose prefix is known in both forms")
      ->required();
  eff->add_option("--test-text", ef_test, "Held-out text to decipher")->required();
  eff->add_option("--key-dictionary", ef_key, "Sorted word list shared by the correspondents")
      ->required();
  eff->add_option("--table-words", ef_table, "Frequency-ordered word list for the table")
      ->required();
  eff->add_option("--table-size", ef_table_size, "Number of table words");
  eff->add_option("--reference", ef_lat_opts.reference, "Reference dictionary")->required();
  eff->add_option("--common-words", ef_lat_opts.common_words,
                  "Fallback words; also the unigram baseline ranking unless --frequency-list");
  eff->add_option("--frequency-list", ef_freq, "Frequency-ordered list for the unigram baseline");
  eff->add_option("--beta", ef_lat_opts.beta, "Sharpness")->check(CLI::Range(2.0, 1e6));
  ef_flags.add(eff);
  eff->add_option("--sizes", ef_sizes, "Comma-separated parallel token counts");
  eff->add_option("--json", ef_json, "Write a JSON metrics blob here");
  eff->add_option("-o,--output", ef_out.path, "Report TSV (default stdout)");
  eff->callback([&] {
    auto table = bc::read_word_file(ef_table);
    if (table.size() > ef_table_size) table.resize(ef_table_size);
    const bc::SynthKey key({bc::read_word_file(ef_key), {}, table, {160, 1218}});
    const auto parallel = text_words(ef_parallel);
    const auto test = text_words(ef_test);
    const bc::ReferenceDict ref(bc::read_word_file(ef_lat_opts.reference));
    const auto scorer = make_scorer(ef_flags.scorer);
    bc::EfficiencyInputs in;
    in.key = &key;
    in.parallel_words = parallel;
    in.test_words = test;
    in.reference = &ref;
    in.scorer = scorer.get();
    in.lattice = ef_lat_opts.config(1);
    in.decode = {ef_flags.beam, ef_flags.lattice_weight, true};
    in.frequency_list = ef_freq.empty() ? in.lattice.common_words : bc::read_word_file(ef_freq);
    in.jobs = jobs;
    const auto sizes = parse_sizes(ef_sizes);
    const auto report = bc::data_efficiency(sizes, in);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    bc::write_efficiency_tsv(ef_out.stream(), report);
    if (!ef_json.empty()) {
      std::ofstream os(ef_json);
      if (!os) throw std::runtime_error("cannot write '" + ef_json + "'");
      bc::write_efficiency_json(os, report);
    }
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a decoded path against gold");
  std::string ev_path, ev_gold;
  bool ev_all = false;
  evaluate->add_option("--path", ev_path, "Path TSV")->required();
  evaluate->add_option("--gold", ev_gold, "Gold file")->required();
  evaluate->add_flag("--all-tokens", ev_all, "Count literal and sentence-end tokens too");
  evaluate->callback([&] {
    std::ifstream in(ev_path);
    if (!in) throw std::runtime_error("cannot open '" + ev_path + "'");
    const auto path = bc::read_path_tsv(in);
    const auto m = bc::evaluate(path, bc::surfaces(load_gold(ev_gold)), ev_all);
    std::cout << nlohmann::json{{"token_accuracy", m.token_accuracy},
                                {"coverage", m.coverage},
                                {"tokens", m.code_tokens}}
                     .dump(2)
              << '\n';
  });

  // train-lm
  auto* train = app.add_subcommand("train-lm", "Train the built-in n-gram language model");
  std::vector<std::string> tr_corpus;
  int tr_order = 3;
  std::string tr_common;
  std::size_t tr_top = 1000;
  Output tr_out;
  train->add_option("corpus", tr_corpus, "Plain-text training files")->required();
  train->add_option("--order", tr_order, "N-gram order")->check(CLI::Range(1, bc::NGramModel::kMaxOrder));
  train->add_option("--common-words", tr_common, "Also write the most frequent words here");
  train->add_option("--top", tr_top, "How many words --common-words lists");
  train->add_option("-o,--output", tr_out.path, "Model file (default stdout)");
  train->callback([&] {
    std::vector<std::vector<std::string>> docs;
    for (const auto& f : tr_corpus) {
      auto paras = bc::tokenize_paragraphs(bc::read_text_file(f));
      docs.insert(docs.end(), paras.begin(), paras.end());
    }
    const auto model = bc::NGramModel::train(docs, tr_order);
    model.save(tr_out.stream());
    if (!tr_common.empty()) {
      std::ofstream os(tr_common);
      if (!os) throw std::runtime_error("cannot write '" + tr_common + "'");
      for (const auto& w : bc::most_common_words(docs, tr_top)) os << w << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "bookcode: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
