#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kBin = BOOKCODE_BIN;
const std::string kData = BOOKCODE_DATA_DIR;

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (const auto n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int st = pclose(p);
  return {WEXITSTATUS(st), out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workdir {
  fs::path dir = fs::temp_directory_path() / ("bookcode_cli_" + std::to_string(::getpid()));
  Workdir() { fs::create_directories(dir); }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

// Enciphers the held-out letters, extracts a wordbank from 500 parallel
// tokens and trains the model: everything decode needs.
void prepare(const Workdir& w) {
  const std::string key = " --key-dictionary " + kData + "/key_dictionary.txt --table-words " + kData +
                          "/table_words.txt";
  REQUIRE(run("train-lm " + kData + "/corpus/letters_lm.txt -o " + (w / "lm.txt") + " --common-words " +
              (w / "common.txt"))
              .status == 0);
  REQUIRE(run("synth --text " + kData + "/corpus/letters_heldout.txt" + key + " -o " + (w / "test.txt") +
              " --gold " + (w / "gold.tsv"))
              .status == 0);
  REQUIRE(run("synth --text " + kData + "/corpus/letters_parallel.txt" + key + " -o " + (w / "par.txt") +
              " --parallel " + (w / "par.tsv") + " --parallel-tokens 500")
              .status == 0);
  REQUIRE(run("wordbank " + (w / "par.tsv") + " --dict-extent 43126 -o " + (w / "wb.tsv")).status == 0);
  REQUIRE(run("lattice --cipher " + (w / "test.txt") + " --wordbank " + (w / "wb.tsv") + " --reference " +
              kData + "/reference_dictionary.txt --common-words " + (w / "common.txt") + " -o " +
              (w / "lat.json"))
              .status == 0);
}

double combined(const std::string& tsv) {
  const auto at = tsv.find("# combined\t");
  REQUIRE(at != std::string::npos);
  return std::stod(tsv.substr(at + 11));
}

}  // namespace

TEST_CASE("end to end through the command line") {
  const Workdir w;
  prepare(w);
  const std::string decode = "decode --lattice " + (w / "lat.json") + " --scorer ngram:" + (w / "lm.txt");

  const auto a = run(decode + " --beam 4 --lattice-weight 1.0 --seed 0");
  const auto b = run(decode + " --seed 0");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("# cipher\tword", 0) == 0);

  const double c1 = combined(run(decode + " --beam 1").out);
  const double c16 = combined(run(decode + " --beam 16").out);
  CHECK(c1 <= c16);

  std::ofstream(w / "path.tsv") << a.out;
  const auto ev = run("evaluate --path " + (w / "path.tsv") + " --gold " + (w / "gold.tsv"));
  REQUIRE(ev.status == 0);
  const auto m = nlohmann::json::parse(ev.out);
  CHECK(m["token_accuracy"].get<double>() > m["coverage"].get<double>());

  // A gold file built from the path itself scores perfectly.
  std::ofstream self(w / "self.tsv");
  std::istringstream lines(a.out);
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    self << line.substr(t1 + 1, t2 - t1 - 1) << '\n';
  }
  self.close();
  const auto perfect = nlohmann::json::parse(run("evaluate --path " + (w / "path.tsv") + " --gold " + (w / "self.tsv")).out);
  CHECK(perfect["token_accuracy"].get<double>() == 1.0);

  const auto sl = run("self-learn --cipher " + (w / "test.txt") + " --wordbank " + (w / "wb.tsv") +
                      " --reference " + kData + "/reference_dictionary.txt --common-words " + (w / "common.txt") +
                      " --scorer ngram:" + (w / "lm.txt") + " --iterations 2 --gold " + (w / "gold.tsv") +
                      " --wordbank-out " + (w / "wb2.tsv") + " -o " + (w / "sl.tsv"));
  CHECK(sl.status == 0);
  CHECK(sl.out.find("round 1") != std::string::npos);
  CHECK(fs::file_size(w / "wb2.tsv") >= fs::file_size(w / "wb.tsv"));

  const auto parse = run("parse " + (w / "test.txt") + " --index");
  CHECK(parse.status == 0);
  CHECK(parse.out.find("\tdict\t") != std::string::npos);
}

TEST_CASE("data efficiency report") {
  const Workdir w;
  REQUIRE(run("train-lm " + kData + "/corpus/letters_lm.txt -o " + (w / "lm.txt") + " --common-words " +
              (w / "common.txt"))
              .status == 0);
  const std::string args = "data-efficiency --parallel-text " + kData + "/corpus/letters_parallel.txt --test-text " +
                           kData + "/corpus/letters_heldout.txt --key-dictionary " + kData +
                           "/key_dictionary.txt --table-words " + kData + "/table_words.txt --reference " + kData +
                           "/reference_dictionary.txt --common-words " + (w / "common.txt") + " --scorer ngram:" +
                           (w / "lm.txt") + " --sizes 200,800 --json " + (w / "m.json") + " -j 2";
  const auto r = run(args);
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("parallel_tokens\twordbank_size\tcoverage\taccuracy", 0) == 0);
  std::istringstream lines(r.out);
  std::string header, row1, row2;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK(row1.rfind("200\t", 0) == 0);
  CHECK(row2.rfind("800\t", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(w.dir / "m.json")).is_object());
  CHECK(run(args).out == r.out);
}

TEST_CASE("errors name the file and position") {
  const Workdir w;
  std::ofstream(w / "bad.txt") << "[1]^ [2]^\n[3]^ 9.[x]-\n";
  const auto r = run("parse " + (w / "bad.txt"));
  CHECK(r.status != 0);
  CHECK(r.out.find("bookcode: error: ") != std::string::npos);
  CHECK(r.out.find("bad.txt:2:") != std::string::npos);

  const auto missing = run("parse " + (w / "absent.txt"));
  CHECK(missing.status != 0);
  CHECK(missing.out.find("absent.txt") != std::string::npos);

  CHECK(run("decode --lattice x --scorer ngram:y --beam 0").status != 0);
  CHECK(run("decode --lattice x --scorer bogus").status != 0);
  CHECK(run("lattice --cipher x --wordbank y --reference z --beta 1.5").status != 0);
  CHECK(run("").status != 0);
  CHECK(run("decode --help").out.find("--lattice-weight") != std::string::npos);
}
