#include <doctest.h>

#include <random>
#include <tuple>

#include "bookcode/transcript.hpp"

using namespace bookcode;

namespace {

struct Published {
  const char* cipher;
  int index;
};

// Deciphered dictionary wordbank: code and its position in the dictionary.
constexpr Published kDictionaryWordbank[] = {
    {"7.[24]-", 24},     {"15.[21]-", 485},   {"29.[29]-", 1305}, {"44.[28]-", 2174},
    {"47.[21]-", 2341},  {"59.[19]-", 3035},  {"65.[17]=", 3410}, {"75.[29]-", 3973},
    {"103.[40]=", 5637}, {"113.[4]-", 6152},  {"114.[20]-", 6226}};

}  // namespace

TEST_CASE("published dictionary indices") {
  for (const auto& [cipher, index] : kDictionaryWordbank) {
    CAPTURE(cipher);
    const auto tok = parse_token(cipher);
    REQUIRE(std::holds_alternative<DictCode>(tok));
    CHECK(dict_index(std::get<DictCode>(tok)) == index);
  }
  CHECK(dict_index(29, 29, 1) == 1305);
  CHECK(dict_index(65, 17, 2) == 3410);
  CHECK(dict_index(7, 24, 1) == 24);
}

TEST_CASE("parse single tokens") {
  CHECK(parse_token("390.[10]=") == CipherToken{DictCode{390, 10, 2, {}}});
  CHECK(parse_token("[664]^") == CipherToken{TableCode{664, {}}});
  CHECK(parse_token("natchez") == CipherToken{Literal{"natchez"}});
  CHECK(parse_token("|") == CipherToken{SentenceEnd{}});
}

TEST_CASE("parse documents with markers") {
  CHECK(parse_document("[229]^ +ing") == std::vector<CipherToken>{TableCode{229, "ing"}});
  CHECK(parse_document("[1235]^ +y 4.[6]-") ==
        std::vector<CipherToken>{TableCode{1235, "y"}, DictCode{4, 6, 1, {}}});
  CHECK(parse_document("").empty());
  CHECK(parse_document("# heading\n  \n[1]^ |\n").size() == 2);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_token("[12^"), ParseError);
  CHECK_THROWS_AS(parse_token("[]^"), ParseError);
  CHECK_THROWS_AS(parse_token("3.[4]"), ParseError);
  CHECK_THROWS_AS(parse_token("0.[4]-"), ParseError);
  CHECK_THROWS_AS(parse_token("3.[0]-"), ParseError);
  CHECK_THROWS_AS(parse_token("[5]^x"), ParseError);
  CHECK_THROWS_AS(parse_document("+ing [5]^"), ParseError);
  CHECK_THROWS_AS(parse_document("natchez +s"), ParseError);
  try {
    parse_document("[1]^\n[2]^ 9.[x]-");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.offset() == 13);  // the 'x'
  }
}

TEST_CASE("render and parse round trip") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> kind(0, 3), num(1, 900), col(1, 2), sfx(0, 2);
  const char* suffixes[] = {"", "ing", "s"};
  for (int n = 0; n < 2000; ++n) {
    CipherToken tok;
    std::optional<std::string> suffix;
    if (const int s = sfx(rng); s) suffix = suffixes[s];
    switch (kind(rng)) {
      case 0: tok = TableCode{num(rng), suffix}; break;
      case 1: tok = DictCode{num(rng), num(rng) % 60 + 1, col(rng), suffix}; break;
      case 2: tok = Literal{"word" + std::to_string(num(rng))}; break;
      default: tok = SentenceEnd{};
    }
    const auto doc = parse_document(render(tok));
    REQUIRE(doc.size() == 1);
    CHECK(doc[0] == tok);
  }
}

TEST_CASE("dict_index increases with page, column, row") {
  std::vector<std::tuple<int, int, int>> keys;
  for (int p = 7; p < 12; ++p)
    for (int c = 1; c <= 2; ++c)
      for (int r = 1; r <= 29; ++r) keys.emplace_back(p, c, r);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const auto [p0, c0, r0] = keys[i - 1];
    const auto [p1, c1, r1] = keys[i];
    CHECK(dict_index(p0, r0, c0) < dict_index(p1, r1, c1));
  }
  CHECK_THROWS_AS(dict_index(6, 1, 1), std::domain_error);
}

TEST_CASE("dict_code_for_index inverts dict_index") {
  for (int idx = 1; idx < 5000; idx += 7) {
    const auto code = dict_code_for_index(idx);
    CHECK(dict_index(code) == idx);
  }
  CHECK(render(dict_code_for_index(1305)) == "29.[29]-");
  const DictGeometry other{40, 3, 2};
  CHECK(dict_index(dict_code_for_index(777, other), other) == 777);
}
