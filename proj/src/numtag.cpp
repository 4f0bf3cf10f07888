#include "cardex/numtag.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cardex/errors.hpp"

namespace cardex {

namespace {

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), ascii_digit);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), ascii_digit);
}

std::optional<std::int64_t> parse_digits(const std::string& s) {
  if (!all_digits(s) || s.size() > 15) return std::nullopt;
  return std::stoll(s);
}

bool clock_pattern(const std::string& s) {
  // d:dd or dd:dd, optional :dd seconds
  std::size_t colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon > 2) return false;
  if (!all_digits(s.substr(0, colon))) return false;
  std::string rest = s.substr(colon + 1);
  std::size_t colon2 = rest.find(':');
  if (colon2 == std::string::npos) return rest.size() == 2 && all_digits(rest);
  return colon2 == 2 && all_digits(rest.substr(0, 2)) && rest.substr(3).size() == 2 &&
         all_digits(rest.substr(3));
}

// "28th" -> 28, "1st" -> 1
std::optional<std::int64_t> digit_ordinal(const std::string& s) {
  if (s.size() < 3) return std::nullopt;
  std::string suffix = s.substr(s.size() - 2);
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return std::nullopt;
  return parse_digits(s.substr(0, s.size() - 2));
}

}  // namespace

const NumTagRuleSet& NumTagRuleSet::defaults() {
  static const NumTagRuleSet rules = [] {
    NumTagRuleSet r;
    r.month_names = {"january", "february", "march", "april",   "may",      "june",
                     "july",    "august",   "september", "october", "november", "december",
                     "jan",     "feb",      "mar",   "apr",     "jun",      "jul",
                     "aug",     "sep",      "sept",  "oct",     "nov",      "dec"};
    r.currency_markers = {"$",    "€",     "£",      "¥",     "usd",    "eur",
                          "gbp",  "dollar", "dollars", "euro",  "euros",  "pound",
                          "pounds", "cent",  "cents",  "yen",   "franc",  "francs"};
    r.percent_markers = {"%", "percent"};
    r.temporal_units = {"year",   "month",  "week",   "day",     "hour",
                        "minute", "second", "decade", "century", "millennium"};
    r.number_words = {{"zero", 0},     {"one", 1},       {"two", 2},      {"three", 3},
                      {"four", 4},     {"five", 5},      {"six", 6},      {"seven", 7},
                      {"eight", 8},    {"nine", 9},      {"ten", 10},     {"eleven", 11},
                      {"twelve", 12},  {"thirteen", 13}, {"fourteen", 14}, {"fifteen", 15},
                      {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
                      {"twenty", 20},  {"thirty", 30},   {"forty", 40},   {"fifty", 50},
                      {"sixty", 60},   {"seventy", 70},  {"eighty", 80},  {"ninety", 90},
                      {"hundred", 100}, {"thousand", 1000}, {"million", 1000000}};
    r.ordinal_words = {{"first", 1},      {"second", 2},     {"third", 3},
                       {"fourth", 4},     {"fifth", 5},      {"sixth", 6},
                       {"seventh", 7},    {"eighth", 8},     {"ninth", 9},
                       {"tenth", 10},     {"eleventh", 11},  {"twelfth", 12},
                       {"thirteenth", 13}, {"fourteenth", 14}, {"fifteenth", 15},
                       {"sixteenth", 16}, {"seventeenth", 17}, {"eighteenth", 18},
                       {"nineteenth", 19}, {"twentieth", 20}, {"thirtieth", 30},
                       {"fortieth", 40},  {"fiftieth", 50},  {"sixtieth", 60},
                       {"seventieth", 70}, {"eightieth", 80}, {"ninetieth", 90},
                       {"hundredth", 100}, {"thousandth", 1000}};
    r.count_words = {{"twin", 2},        {"twins", 2},        {"triplets", 3},
                     {"triplet", 3},     {"quadruplets", 4},  {"quintuplets", 5},
                     {"duo", 2},         {"trio", 3},         {"quartet", 4},
                     {"quintet", 5},     {"trilogy", 3},      {"tetralogy", 4},
                     {"pentalogy", 5},   {"duology", 2},      {"dozen", 12},
                     {"pair", 2},        {"pairs", 2}};
    r.function_words = {
        "a",     "an",    "the",   "this",  "that",   "these", "those", "he",
        "she",   "it",    "they",  "we",    "i",      "you",   "me",    "him",
        "her",   "them",  "us",    "who",   "whom",   "which", "what",  "whose",
        "its",   "his",   "their", "our",   "my",     "your",  "of",    "in",
        "on",    "at",    "by",    "for",   "with",   "from",  "to",    "into",
        "over",  "under", "after", "before", "during", "between", "among", "around",
        "against", "about", "as",  "than",  "and",    "or",    "but",   "nor",
        "so",    "yet",   "if",    "while", "when",   "where", "because", "since",
        "be",    "have",  "do",    "will",  "would",  "shall", "should", "can",
        "could", "may",   "might", "must",  "not",    "no",    "any",   "never",
        "only",  "also",  "too",   "very",  "just",   "more",  "most",  "other",
        "such",  "each",  "per",   "both",  "all",    "some",  "many",  "few",
        "several", "own", "same",  "there", "here",   "now",   "then",  "later",
        "again", "once",  "ever",  "still", "well",   "together"};
    r.verb_lemmas = {
        "have",  "be",     "do",      "go",      "get",     "make",    "take",
        "give",  "know",   "think",   "see",     "come",    "want",    "use",
        "find",  "tell",   "become",  "leave",   "live",    "die",     "serve",
        "lead",  "hold",   "play",    "win",     "lose",    "marry",   "remarry",
        "divorce", "wed",  "date",    "bear",    "father",  "adopt",   "raise",
        "write", "direct", "produce", "release", "publish", "record",  "sign",
        "score", "span",   "begin",   "start",   "end",     "found",   "establish",
        "move",  "retire", "graduate", "attend", "join",    "say",     "work",
        "earn",  "receive", "appear", "feature", "elect",   "appoint", "name",
        "bury",  "survive", "include", "contain", "consist", "comprise", "remain",
        "meet",  "bring",  "run",     "grow",    "call",    "keep",    "visit"};
    r.year_min = 1000;
    r.year_max = 2199;
    return r;
  }();
  return rules;
}

std::optional<std::int64_t> parse_number_word(const std::string& surface,
                                              const NumTagRuleSet& rules) {
  if (surface.empty()) return std::nullopt;
  std::string s = lower_ascii(surface);

  if (has_digit(s)) {
    std::string digits;
    digits.reserve(s.size());
    bool comma_form = true;
    for (char c : s) {
      if (ascii_digit(c)) {
        digits += c;
      } else if (c == ',') {
        continue;
      } else {
        comma_form = false;
        break;
      }
    }
    if (comma_form) return parse_digits(digits);
    return digit_ordinal(s);
  }

  if (auto it = rules.number_words.find(s); it != rules.number_words.end()) return it->second;
  if (auto it = rules.ordinal_words.find(s); it != rules.ordinal_words.end()) return it->second;
  if (auto it = rules.count_words.find(s); it != rules.count_words.end()) return it->second;

  const std::size_t hyphen = s.find('-');
  if (hyphen != std::string::npos && hyphen + 1 < s.size() &&
      s.find('-', hyphen + 1) == std::string::npos) {
    const std::string left = s.substr(0, hyphen);
    const std::string right = s.substr(hyphen + 1);
    auto lit = rules.number_words.find(left);
    if (lit != rules.number_words.end()) {
      const std::int64_t lv = lit->second;
      if (lv >= 20 && lv <= 90 && lv % 10 == 0) {
        if (auto rit = rules.number_words.find(right);
            rit != rules.number_words.end() && rit->second >= 1 && rit->second <= 9) {
          return lv + rit->second;
        }
        if (auto rit = rules.ordinal_words.find(right);
            rit != rules.ordinal_words.end() && rit->second >= 1 && rit->second <= 9) {
          return lv + rit->second;
        }
      }
      if (right == "hundred" || right == "thousand" || right == "million") {
        return lv * rules.number_words.at(right);
      }
    }
  }
  return std::nullopt;
}

namespace {

bool numeric_surface(const std::string& surface, const NumTagRuleSet& rules) {
  return has_digit(surface) || parse_number_word(surface, rules).has_value();
}

bool in_set(const std::set<std::string>& set, const Token& t) {
  return set.count(lower_ascii(t.surface)) > 0 || set.count(t.lemma) > 0;
}

}  // namespace

void classify_numbers(Sentence& sentence, const NumTagRuleSet& rules) {
  auto& tokens = sentence.tokens;
  const std::size_t n = tokens.size();
  auto marker_adjacent = [&](const std::set<std::string>& set, std::size_t i) {
    return (i > 0 && in_set(set, tokens[i - 1])) || (i + 1 < n && in_set(set, tokens[i + 1]));
  };

  for (std::size_t i = 0; i < n; ++i) {
    Token& tok = tokens[i];
    tok.num_tag = NumTag::NONE;
    tok.num_value.reset();
    if (!numeric_surface(tok.surface, rules)) continue;

    const std::string low = lower_ascii(tok.surface);

    // temporal unit within one token to the right
    std::size_t unit_pos = n;
    for (std::size_t j = i + 1; j <= i + 2 && j < n; ++j) {
      if (rules.temporal_units.count(tokens[j].lemma) > 0) {
        unit_pos = j;
        break;
      }
    }

    const bool four_digit_year =
        all_digits(low) && low.size() == 4 && *parse_digits(low) >= rules.year_min &&
        *parse_digits(low) <= rules.year_max;
    const bool decade = low.size() == 5 && low.back() == 's' && all_digits(low.substr(0, 4)) &&
                        *parse_digits(low.substr(0, 4)) >= rules.year_min &&
                        *parse_digits(low.substr(0, 4)) <= rules.year_max;

    if (marker_adjacent(rules.percent_markers, i)) {
      tok.num_tag = NumTag::PERCENT;
    } else if (marker_adjacent(rules.currency_markers, i)) {
      tok.num_tag = NumTag::MONEY;
    } else if (four_digit_year || decade || marker_adjacent(rules.month_names, i)) {
      tok.num_tag = NumTag::DATE;
    } else if (clock_pattern(low)) {
      tok.num_tag = NumTag::TIME;
    } else if (unit_pos < n) {
      bool set_context = false;
      const std::size_t from = i >= 2 ? i - 2 : 0;
      for (std::size_t j = from; j <= unit_pos + 1 && j < n; ++j) {
        const std::string& lemma = tokens[j].lemma;
        if (lemma == "per" || lemma == "each") set_context = true;
      }
      tok.num_tag = set_context ? NumTag::SET : NumTag::DURATION;
    } else if (digit_ordinal(low).has_value() || rules.ordinal_words.count(low) > 0 ||
               (low.find('-') != std::string::npos &&
                rules.ordinal_words.count(low.substr(low.find('-') + 1)) > 0)) {
      tok.num_tag = NumTag::ORDINAL;
      tok.num_value = parse_number_word(tok.surface, rules);
    } else {
      tok.num_tag = NumTag::NUMBER;
      tok.num_value = parse_number_word(tok.surface, rules);
    }
  }
}

void classify_document(Document& doc, const NumTagRuleSet& rules) {
  for (Sentence& s : doc.sentences) classify_numbers(s, rules);
}

bool is_candidate(const Token& token) {
  return token.num_tag == NumTag::NUMBER && token.num_value.has_value();
}

bool is_noun_like(const Token& token, const NumTagRuleSet& rules) {
  if (token.num_tag != NumTag::NONE) return false;
  if (token.surface.empty()) return false;
  const unsigned char first = static_cast<unsigned char>(token.surface.front());
  if (!(ascii_alpha(static_cast<char>(first)) || first >= 0x80)) return false;
  if (numeric_surface(token.surface, rules)) return false;
  if (rules.function_words.count(token.lemma) > 0 ||
      rules.function_words.count(lower_ascii(token.surface)) > 0) {
    return false;
  }
  if (rules.verb_lemmas.count(token.lemma) > 0) return false;
  return true;
}

bool is_nummod(const Sentence& sentence, std::size_t index, const NumTagRuleSet& rules) {
  const auto& tokens = sentence.tokens;
  if (index >= tokens.size()) {
    throw std::out_of_range("is_nummod: token index " + std::to_string(index) +
                            " out of range for sentence of " + std::to_string(tokens.size()) +
                            " tokens");
  }
  if (!is_candidate(tokens[index])) return false;
  if (index + 1 < tokens.size() && tokens[index + 1].lemma == "of") return false;
  for (std::size_t j = index + 1; j <= index + 2 && j < tokens.size(); ++j) {
    if (is_noun_like(tokens[j], rules)) return true;
  }
  return false;
}

std::vector<ZeroOneAnnotation> translate_zero_one(const Sentence& sentence,
                                                  const NumTagRuleSet& rules) {
  std::vector<ZeroOneAnnotation> out;
  const auto& tokens = sentence.tokens;
  const std::size_t n = tokens.size();
  auto noun_at = [&](std::size_t j) { return j < n && is_noun_like(tokens[j], rules); };
  auto verb_at = [&](std::size_t j) {
    return j < n && rules.verb_lemmas.count(tokens[j].lemma) > 0;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string low = lower_ascii(tokens[i].surface);
    if (low == "never" && (verb_at(i + 1) || verb_at(i + 2))) {
      out.push_back({i, 0});
    } else if (low == "no" && noun_at(i + 1)) {
      out.push_back({i, 0});
    } else if (tokens[i].lemma == "not") {
      for (std::size_t k = i + 1; k <= i + 3 && k < n; ++k) {
        if (lower_ascii(tokens[k].surface) == "any" && (noun_at(k + 1) || noun_at(k + 2))) {
          out.push_back({i, 0});
          break;
        }
      }
    } else if ((low == "a" || low == "an") && noun_at(i + 1)) {
      out.push_back({i, 1});
    } else if (low == "only" && noun_at(i + 1)) {
      out.push_back({i, 1});
    }
  }
  return out;
}

namespace {

void write_lexicon(std::ostream& out, const char* kind, const std::set<std::string>& entries) {
  for (const auto& e : entries) out << kind << '\t' << e << '\n';
}

void write_lexicon(std::ostream& out, const char* kind,
                   const std::map<std::string, std::int64_t>& entries) {
  for (const auto& [word, value] : entries) out << kind << '\t' << word << '\t' << value << '\n';
}

}  // namespace

void NumTagRuleSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open rules file for writing: " + path);
  out << "# cardex numeric tagging lexicons: kind<TAB>entry[<TAB>value]\n";
  out << "yearrange\t" << year_min << '\t' << year_max << '\n';
  write_lexicon(out, "month", month_names);
  write_lexicon(out, "currency", currency_markers);
  write_lexicon(out, "percent", percent_markers);
  write_lexicon(out, "unit", temporal_units);
  write_lexicon(out, "numword", number_words);
  write_lexicon(out, "ordword", ordinal_words);
  write_lexicon(out, "countword", count_words);
  write_lexicon(out, "funcword", function_words);
  write_lexicon(out, "verb", verb_lemmas);
}

NumTagRuleSet NumTagRuleSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rules file: " + path);
  NumTagRuleSet r;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    auto need_value = [&]() -> std::int64_t {
      if (fields.size() != 3 || !all_digits(fields[2])) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected kind<TAB>word<TAB>value");
      }
      return std::stoll(fields[2]);
    };
    const std::string& kind = fields[0];
    if (kind == "yearrange") {
      if (fields.size() != 3 || !all_digits(fields[1]) || !all_digits(fields[2])) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected yearrange<TAB>min<TAB>max");
      }
      r.year_min = std::stoll(fields[1]);
      r.year_max = std::stoll(fields[2]);
      if (r.year_min > r.year_max) {
        throw DataError(path + ":" + std::to_string(lineno) + ": yearrange bounds out of order");
      }
      continue;
    }
    if (fields.size() < 2 || fields[1].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected kind<TAB>entry");
    }
    const std::string& word = fields[1];
    if (kind == "month") {
      r.month_names.insert(word);
    } else if (kind == "currency") {
      r.currency_markers.insert(word);
    } else if (kind == "percent") {
      r.percent_markers.insert(word);
    } else if (kind == "unit") {
      r.temporal_units.insert(word);
    } else if (kind == "numword") {
      r.number_words[word] = need_value();
    } else if (kind == "ordword") {
      r.ordinal_words[word] = need_value();
    } else if (kind == "countword") {
      r.count_words[word] = need_value();
    } else if (kind == "funcword") {
      r.function_words.insert(word);
    } else if (kind == "verb") {
      r.verb_lemmas.insert(word);
    } else {
      throw DataError(path + ":" + std::to_string(lineno) + ": unknown lexicon kind \"" + kind +
                      "\"");
    }
  }
  if (r.number_words.empty() || r.month_names.empty()) {
    throw DataError(path + ": rule file is missing required lexicons");
  }
  return r;
}

}  // namespace cardex
