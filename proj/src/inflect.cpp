#include "bookcode/inflect.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace bookcode {

namespace {

struct IrregularVerb {
  const char* base;
  const char* past;        // '/'-separated alternatives
  const char* participle;  // '/'-separated alternatives
};

// Base, past, past participle.
constexpr IrregularVerb kIrregularVerbs[] = {
    {"abide", "abode/abided", "abode/abided"},
    {"arise", "arose", "arisen"},
    {"awake", "awoke", "awoken"},
    {"bear", "bore", "borne/born"},
    {"beat", "beat", "beaten"},
    {"become", "became", "become"},
    {"befall", "befell", "befallen"},
    {"beget", "begot", "begotten"},
    {"begin", "began", "begun"},
    {"behold", "beheld", "beheld"},
    {"bend", "bent", "bent"},
    {"beset", "beset", "beset"},
    {"bet", "bet", "bet"},
    {"bid", "bade/bid", "bidden/bid"},
    {"bind", "bound", "bound"},
    {"bite", "bit", "bitten"},
    {"bleed", "bled", "bled"},
    {"blow", "blew", "blown"},
    {"break", "broke", "broken"},
    {"breed", "bred", "bred"},
    {"bring", "brought", "brought"},
    {"build", "built", "built"},
    {"burn", "burnt/burned", "burnt/burned"},
    {"burst", "burst", "burst"},
    {"buy", "bought", "bought"},
    {"cast", "cast", "cast"},
    {"catch", "caught", "caught"},
    {"choose", "chose", "chosen"},
    {"cling", "clung", "clung"},
    {"come", "came", "come"},
    {"cost", "cost", "cost"},
    {"creep", "crept", "crept"},
    {"cut", "cut", "cut"},
    {"deal", "dealt", "dealt"},
    {"dig", "dug", "dug"},
    {"draw", "drew", "drawn"},
    {"dream", "dreamt/dreamed", "dreamt/dreamed"},
    {"drink", "drank", "drunk"},
    {"drive", "drove", "driven"},
    {"dwell", "dwelt", "dwelt"},
    {"eat", "ate", "eaten"},
    {"fall", "fell", "fallen"},
    {"feed", "fed", "fed"},
    {"feel", "felt", "felt"},
    {"fight", "fought", "fought"},
    {"find", "found", "found"},
    {"flee", "fled", "fled"},
    {"fling", "flung", "flung"},
    {"fly", "flew", "flown"},
    {"forbear", "forbore", "forborne"},
    {"forbid", "forbade", "forbidden"},
    {"forecast", "forecast", "forecast"},
    {"foresee", "foresaw", "foreseen"},
    {"foretell", "foretold", "foretold"},
    {"forget", "forgot", "forgotten"},
    {"forgive", "forgave", "forgiven"},
    {"forsake", "forsook", "forsaken"},
    {"freeze", "froze", "frozen"},
    {"get", "got", "got/gotten"},
    {"give", "gave", "given"},
    {"grind", "ground", "ground"},
    {"grow", "grew", "grown"},
    {"hang", "hung/hanged", "hung/hanged"},
    {"hear", "heard", "heard"},
    {"hide", "hid", "hidden"},
    {"hit", "hit", "hit"},
    {"hold", "held", "held"},
    {"hurt", "hurt", "hurt"},
    {"keep", "kept", "kept"},
    {"kneel", "knelt", "knelt"},
    {"know", "knew", "known"},
    {"lay", "laid", "laid"},
    {"lead", "led", "led"},
    {"lean", "leant/leaned", "leant/leaned"},
    {"leap", "leapt/leaped", "leapt/leaped"},
    {"learn", "learnt/learned", "learnt/learned"},
    {"leave", "left", "left"},
    {"lend", "lent", "lent"},
    {"let", "let", "let"},
    {"lie", "lay", "lain"},
    {"light", "lit/lighted", "lit/lighted"},
    {"lose", "lost", "lost"},
    {"make", "made", "made"},
    {"mean", "meant", "meant"},
    {"meet", "met", "met"},
    {"mislead", "misled", "misled"},
    {"mistake", "mistook", "mistaken"},
    {"misunderstand", "misunderstood", "misunderstood"},
    {"mow", "mowed", "mown"},
    {"overcome", "overcame", "overcome"},
    {"overhear", "overheard", "overheard"},
    {"overtake", "overtook", "overtaken"},
    {"overthrow", "overthrew", "overthrown"},
    {"pay", "paid", "paid"},
    {"prove", "proved", "proven/proved"},
    {"put", "put", "put"},
    {"quit", "quit", "quit"},
    {"read", "read", "read"},
    {"rend", "rent", "rent"},
    {"rid", "rid", "rid"},
    {"ride", "rode", "ridden"},
    {"ring", "rang", "rung"},
    {"rise", "rose", "risen"},
    {"run", "ran", "run"},
    {"saw", "sawed", "sawn"},
    {"say", "said", "said"},
    {"see", "saw", "seen"},
    {"seek", "sought", "sought"},
    {"sell", "sold", "sold"},
    {"send", "sent", "sent"},
    {"set", "set", "set"},
    {"sew", "sewed", "sewn"},
    {"shake", "shook", "shaken"},
    {"shear", "sheared", "shorn"},
    {"shed", "shed", "shed"},
    {"shine", "shone", "shone"},
    {"shoot", "shot", "shot"},
    {"show", "showed", "shown"},
    {"shrink", "shrank", "shrunk"},
    {"shut", "shut", "shut"},
    {"sing", "sang", "sung"},
    {"sink", "sank", "sunk"},
    {"sit", "sat", "sat"},
    {"slay", "slew", "slain"},
    {"sleep", "slept", "slept"},
    {"slide", "slid", "slid"},
    {"sling", "slung", "slung"},
    {"slit", "slit", "slit"},
    {"smite", "smote", "smitten"},
    {"sow", "sowed", "sown"},
    {"speak", "spoke", "spoken"},
    {"speed", "sped", "sped"},
    {"spell", "spelt/spelled", "spelt/spelled"},
    {"spend", "spent", "spent"},
    {"spill", "spilt/spilled", "spilt/spilled"},
    {"spin", "spun", "spun"},
    {"spit", "spat", "spat"},
    {"split", "split", "split"},
    {"spoil", "spoilt/spoiled", "spoilt/spoiled"},
    {"spread", "spread", "spread"},
    {"spring", "sprang", "sprung"},
    {"stand", "stood", "stood"},
    {"steal", "stole", "stolen"},
    {"stick", "stuck", "stuck"},
    {"sting", "stung", "stung"},
    {"stink", "stank", "stunk"},
    {"stride", "strode", "stridden"},
    {"strike", "struck", "struck/stricken"},
    {"string", "strung", "strung"},
    {"strive", "strove", "striven"},
    {"swear", "swore", "sworn"},
    {"sweep", "swept", "swept"},
    {"swell", "swelled", "swollen"},
    {"swim", "swam", "swum"},
    {"swing", "swung", "swung"},
    {"take", "took", "taken"},
    {"teach", "taught", "taught"},
    {"tear", "tore", "torn"},
    {"tell", "told", "told"},
    {"think", "thought", "thought"},
    {"thrive", "throve/thrived", "thriven/thrived"},
    {"throw", "threw", "thrown"},
    {"thrust", "thrust", "thrust"},
    {"tread", "trod", "trodden"},
    {"undergo", "underwent", "undergone"},
    {"understand", "understood", "understood"},
    {"undertake", "undertook", "undertaken"},
    {"undo", "undid", "undone"},
    {"uphold", "upheld", "upheld"},
    {"upset", "upset", "upset"},
    {"wake", "woke", "woken"},
    {"wear", "wore", "worn"},
    {"weave", "wove", "woven"},
    {"weep", "wept", "wept"},
    {"wet", "wet", "wet"},
    {"win", "won", "won"},
    {"wind", "wound", "wound"},
    {"withdraw", "withdrew", "withdrawn"},
    {"withhold", "withheld", "withheld"},
    {"withstand", "withstood", "withstood"},
    {"wring", "wrung", "wrung"},
    {"write", "wrote", "written"},
};

// Verbs whose whole paradigm is listed verbatim.
const std::unordered_map<std::string, std::vector<std::string>>& suppletive() {
  static const std::unordered_map<std::string, std::vector<std::string>> table{
      {"be", {"be", "is", "am", "are", "was", "were", "been", "being"}},
      {"have", {"have", "has", "had", "having"}},
      {"do", {"do", "does", "did", "done", "doing"}},
      {"go", {"go", "goes", "went", "gone", "going"}},
  };
  return table;
}

const std::unordered_set<std::string>& closed_class() {
  static const std::unordered_set<std::string> words{
      "a", "an", "the", "and", "or", "but", "nor", "of", "in", "on", "at", "by", "for", "with",
      "from", "to", "into", "onto", "upon", "about", "above", "across", "after", "against",
      "along", "among", "amongst", "around", "before", "behind", "below", "beneath", "beside",
      "besides", "between", "beyond", "during", "except", "inside", "near", "off", "over",
      "since", "through", "throughout", "till", "toward", "towards", "under", "until", "unto",
      "within", "without", "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself",
      "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
      "we", "us", "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves",
      "this", "that", "these", "those", "who", "whom", "whose", "which", "what", "whatever",
      "whoever", "if", "then", "than", "because", "although", "though", "while", "whilst",
      "whether", "unless", "so", "as", "not", "no", "yes", "very", "also", "too", "there",
      "here", "where", "when", "why", "how", "all", "any", "each", "every", "some", "such",
      "both", "either", "neither", "shall", "should", "will", "would", "can", "could", "may",
      "might", "must", "ought", "am", "is", "are", "was", "were", "been", "being", "has", "had",
      "does", "did", "o", "oh", "nor", "yet", "hence", "thus", "therefore", "however"};
  return words;
}

const std::unordered_map<std::string, std::vector<std::string>>& irregular_plurals() {
  static const std::unordered_map<std::string, std::vector<std::string>> table{
      {"man", {"men"}},       {"woman", {"women"}},   {"child", {"children"}},
      {"foot", {"feet"}},     {"tooth", {"teeth"}},   {"goose", {"geese"}},
      {"mouse", {"mice"}},    {"ox", {"oxen"}},       {"wife", {"wives"}},
      {"life", {"lives"}},    {"knife", {"knives"}},  {"wolf", {"wolves"}},
      {"half", {"halves"}},   {"leaf", {"leaves"}},   {"self", {"selves"}},
      {"shelf", {"shelves"}}, {"thief", {"thieves"}}, {"loaf", {"loaves"}},
      {"calf", {"calves"}},   {"sheaf", {"sheaves"}},
  };
  return table;
}

const std::unordered_map<std::string, std::vector<std::string>>& irregular_degrees() {
  static const std::unordered_map<std::string, std::vector<std::string>> table{
      {"good", {"better", "best"}},
      {"well", {"better", "best"}},
      {"bad", {"worse", "worst"}},
      {"ill", {"worse", "worst"}},
      {"far", {"farther", "farthest", "further", "furthest"}},
      {"little", {"less", "least"}},
      {"much", {"more", "most"}},
      {"many", {"more", "most"}},
  };
  return table;
}

const std::unordered_set<std::string>& gradable_adjectives() {
  static const std::unordered_set<std::string> words{
      "able",   "big",    "black",  "bold",    "brave",  "bright", "broad",  "busy",  "calm",
      "cheap",  "clean",  "clear",  "close",   "cold",   "cool",   "cruel",  "dark",  "dear",
      "deep",   "dry",    "dull",   "early",   "easy",   "empty",  "fair",   "fast",  "few",
      "fierce", "fine",   "firm",   "fit",     "free",   "fresh",  "full",   "gentle", "glad",
      "grand",  "great",  "hard",   "happy",   "harsh",  "heavy",  "high",   "hot",   "huge",
      "humble", "keen",   "kind",   "large",   "late",   "light",  "long",   "loose", "loud",
      "low",    "mad",    "mean",   "mild",    "narrow", "neat",   "new",    "nice",  "noble",
      "old",    "plain",  "poor",   "proud",   "pure",   "quick",  "quiet",  "rare",  "rich",
      "rough",  "rude",   "sad",    "safe",    "severe", "sharp",  "short",  "simple", "slow",
      "small",  "smart",  "soft",   "sore",    "sound",  "steep",  "strange", "strict", "strong",
      "sure",   "sweet",  "tall",   "thick",   "thin",   "tight",  "tiny",   "true",  "ugly",
      "warm",   "weak",   "wet",    "white",   "wide",   "wild",   "wise",   "worthy", "young",
      "heavy",  "lucky",  "likely", "ready",   "speedy", "steady", "wealthy", "worthy"};
  return words;
}

// Stress falls on the final syllable, so the consonant doubles.
const std::unordered_set<std::string>& final_stress() {
  static const std::unordered_set<std::string> words{
      "admit",   "commit", "permit", "submit", "omit",   "emit",  "transmit", "regret",
      "occur",   "refer",  "prefer", "confer", "defer",  "deter", "incur",    "recur",
      "compel",  "expel",  "repel",  "propel", "control", "patrol", "equip",   "acquit",
      "abet",    "allot",  "annul",  "rebel",  "excel",  "dispel", "impel",   "distil",
      "instil",  "fulfil", "enrol",  "extol",  "infer",  "transfer", "unpin",  "upset"};
  return words;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool all_lower_alpha(std::string_view w) {
  return !w.empty() &&
         std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

int vowel_groups(std::string_view w) {
  int groups = 0;
  bool in_group = false;
  for (const char c : w) {
    const bool v = is_vowel(c) || (c == 'y' && in_group);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

bool doubles_final(std::string_view w) {
  if (final_stress().count(std::string(w)) != 0) return true;
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  if (is_vowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  return is_vowel(w[n - 2]) && !is_vowel(w[n - 3]) && vowel_groups(w) == 1;
}

bool consonant_y(std::string_view w) {
  return w.size() >= 2 && w.back() == 'y' && !is_vowel(w[w.size() - 2]);
}

std::string s_form(const std::string& w) {
  if (w.ends_with("s") || w.ends_with("x") || w.ends_with("z") || w.ends_with("ch") ||
      w.ends_with("sh")) {
    return w + "es";
  }
  if (consonant_y(w)) return w.substr(0, w.size() - 1) + "ies";
  return w + "s";
}

std::string ed_form(const std::string& w) {
  if (w.ends_with("e")) return w + "d";
  if (consonant_y(w)) return w.substr(0, w.size() - 1) + "ied";
  if (doubles_final(w)) return w + w.back() + "ed";
  return w + "ed";
}

std::string ing_form(const std::string& w) {
  if (w.ends_with("ie")) return w.substr(0, w.size() - 2) + "ying";
  if (w.ends_with("e") && !w.ends_with("ee") && !w.ends_with("ye") && !w.ends_with("oe") &&
      w.size() > 2) {
    return w.substr(0, w.size() - 1) + "ing";
  }
  if (doubles_final(w)) return w + w.back() + "ing";
  return w + "ing";
}

std::pair<std::string, std::string> degree_forms(const std::string& w) {
  if (w.ends_with("e")) return {w + "r", w + "st"};
  if (consonant_y(w)) {
    const std::string stem = w.substr(0, w.size() - 1);
    return {stem + "ier", stem + "iest"};
  }
  if (doubles_final(w)) return {w + w.back() + "er", w + w.back() + "est"};
  return {w + "er", w + "est"};
}

void split_into(std::string_view alternatives, std::vector<std::string>& out) {
  std::size_t start = 0;
  while (start <= alternatives.size()) {
    const auto slash = alternatives.find('/', start);
    out.emplace_back(alternatives.substr(start, slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
}

const IrregularVerb* find_irregular(std::string_view w) {
  static const auto index = [] {
    std::unordered_map<std::string, const IrregularVerb*> m;
    for (const auto& v : kIrregularVerbs) m.emplace(v.base, &v);
    return m;
  }();
  const auto it = index.find(std::string(w));
  return it == index.end() ? nullptr : it->second;
}

}  // namespace

std::vector<std::string> inflections(std::string_view base_view) {
  const std::string base(base_view);
  if (!all_lower_alpha(base) || base.size() < 2 || closed_class().count(base) != 0) {
    return {base};
  }
  if (const auto it = suppletive().find(base); it != suppletive().end()) return it->second;

  std::vector<std::string> forms{base};
  if (const auto it = irregular_plurals().find(base); it != irregular_plurals().end()) {
    forms.insert(forms.end(), it->second.begin(), it->second.end());
  } else {
    forms.push_back(s_form(base));
  }

  if (const IrregularVerb* v = find_irregular(base)) {
    split_into(v->past, forms);
    split_into(v->participle, forms);
  } else {
    forms.push_back(ed_form(base));
  }
  forms.push_back(ing_form(base));

  if (const auto it = irregular_degrees().find(base); it != irregular_degrees().end()) {
    forms.insert(forms.end(), it->second.begin(), it->second.end());
  } else if (gradable_adjectives().count(base) != 0) {
    auto [comparative, superlative] = degree_forms(base);
    forms.push_back(std::move(comparative));
    forms.push_back(std::move(superlative));
  }

  std::vector<std::string> unique;
  unique.reserve(forms.size());
  for (auto& f : forms) {
    if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(std::move(f));
  }
  return unique;
}

std::string inflection_marker(std::string_view lemma, std::string_view form) {
  std::size_t common = 0;
  while (common < lemma.size() && common < form.size() && lemma[common] == form[common]) {
    ++common;
  }
  return std::string(form.substr(common));
}

}  // namespace bookcode
