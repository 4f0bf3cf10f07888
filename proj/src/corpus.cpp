#include "cardex/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cardex/errors.hpp"

namespace cardex {

namespace {

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool ascii_space(unsigned char c) { return std::isspace(c) != 0; }

// Word bytes: ASCII letters plus any non-ASCII UTF-8 byte.
bool word_byte(unsigned char c) { return ascii_alpha(static_cast<char>(c)) || c >= 0x80; }

std::size_t utf8_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xe) return 3;
  if ((c >> 3) == 0x1e) return 4;
  return 1;
}

std::string lower_ascii(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const std::set<std::string>& hyphen_tens() {
  static const std::set<std::string> tens = {"twenty", "thirty", "forty",  "fifty",
                                             "sixty",  "seventy", "eighty", "ninety"};
  return tens;
}

const std::set<std::string>& hyphen_units() {
  static const std::set<std::string> units = {
      "one",   "two",    "three", "four",  "five",  "six",   "seven", "eight", "nine",
      "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth"};
  return units;
}

const std::unordered_map<std::string, std::string>& lemma_exceptions() {
  static const std::unordered_map<std::string, std::string> ex = {
      {"children", "child"}, {"wives", "wife"},     {"lives", "life"},
      {"men", "man"},        {"women", "woman"},    {"people", "people"},
      {"feet", "foot"},      {"teeth", "tooth"},    {"mice", "mouse"},
      {"series", "series"},  {"species", "species"},
      {"has", "have"},       {"had", "have"},       {"having", "have"},
      {"is", "be"},          {"are", "be"},         {"was", "be"},
      {"were", "be"},        {"been", "be"},        {"being", "be"},
      {"am", "be"},          {"does", "do"},        {"did", "do"},
      {"done", "do"},        {"gave", "give"},      {"given", "give"},
      {"went", "go"},        {"gone", "go"},        {"got", "get"},
      {"made", "make"},      {"took", "take"},      {"taken", "take"},
      {"bore", "bear"},      {"born", "bear"},      {"borne", "bear"},
      {"won", "win"},        {"wrote", "write"},    {"written", "write"},
      {"said", "say"},       {"left", "leave"},     {"led", "lead"},
      {"held", "hold"},      {"became", "become"},  {"began", "begin"},
      {"begun", "begin"},    {"came", "come"},      {"saw", "see"},
      {"seen", "see"},       {"knew", "know"},      {"known", "know"},
      {"found", "find"},     {"met", "meet"},       {"died", "die"},
      {"dying", "die"},      {"divorced", "divorce"}, {"divorcing", "divorce"},
      {"raised", "raise"},   {"received", "receive"}, {"named", "name"},
      {"married", "marry"},  {"remarried", "remarry"}, {"buried", "bury"}};
  return ex;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && ascii_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> abbr = {
      "mr.",  "mrs.", "ms.",  "dr.",   "prof.", "st.",  "no.",  "jr.",
      "sr.",  "vs.",  "etc.", "e.g.",  "i.e.",  "inc.", "ltd.", "co.",
      "mt.",  "gen.", "col.", "capt.", "ca.",   "approx.", "a.m.", "p.m."};
  return abbr;
}

}  // namespace

const char* to_string(NumTag tag) {
  switch (tag) {
    case NumTag::NONE: return "NONE";
    case NumTag::DATE: return "DATE";
    case NumTag::TIME: return "TIME";
    case NumTag::DURATION: return "DURATION";
    case NumTag::SET: return "SET";
    case NumTag::MONEY: return "MONEY";
    case NumTag::PERCENT: return "PERCENT";
    case NumTag::NUMBER: return "NUMBER";
    case NumTag::ORDINAL: return "ORDINAL";
  }
  return "NONE";
}

std::optional<NumTag> numtag_from_string(const std::string& name) {
  static const std::unordered_map<std::string, NumTag> table = {
      {"NONE", NumTag::NONE},     {"DATE", NumTag::DATE},       {"TIME", NumTag::TIME},
      {"DURATION", NumTag::DURATION}, {"SET", NumTag::SET},     {"MONEY", NumTag::MONEY},
      {"PERCENT", NumTag::PERCENT},   {"NUMBER", NumTag::NUMBER}, {"ORDINAL", NumTag::ORDINAL}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  auto push = [&](std::size_t b, std::size_t e) {
    Token t;
    t.surface = text.substr(b, e - b);
    t.index = tokens.size();
    t.char_start = b;
    t.char_end = e;
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (ascii_space(c)) {
      ++i;
      continue;
    }
    if (ascii_digit(text[i])) {
      std::size_t j = i + 1;
      while (j < n) {
        if (ascii_digit(text[j])) {
          ++j;
        } else if ((text[j] == ',' || text[j] == '.' || text[j] == ':') && j + 1 < n &&
                   ascii_digit(text[j + 1])) {
          ++j;  // separator between digits stays inside the token
        } else {
          break;
        }
      }
      while (j < n && ascii_alpha(text[j])) ++j;  // "28th", "1980s"
      push(i, j);
      i = j;
    } else if (word_byte(c)) {
      std::size_t j = i;
      while (j < n) {
        const unsigned char b = static_cast<unsigned char>(text[j]);
        if (word_byte(b)) {
          j = std::min(j + (b >= 0x80 ? utf8_len(b) : 1), n);
        } else if (b == '\'' && j + 1 < n &&
                   word_byte(static_cast<unsigned char>(text[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
      // "twenty-one" / "twenty-first" stay one token
      if (j < n && text[j] == '-' && j + 1 < n && ascii_alpha(text[j + 1]) &&
          hyphen_tens().count(lower_ascii(text.substr(i, j - i))) > 0) {
        std::size_t k = j + 1;
        while (k < n && ascii_alpha(text[k])) ++k;
        if (hyphen_units().count(lower_ascii(text.substr(j + 1, k - j - 1))) > 0) j = k;
      }
      push(i, j);
      i = j;
    } else {
      std::size_t j = i + utf8_len(c);
      if (j > n) j = n;
      push(i, j);
      i = j;
    }
  }
  return tokens;
}

std::string lemmatize(const std::string& surface) {
  std::string s = lower_ascii(surface);
  const auto& ex = lemma_exceptions();
  if (auto it = ex.find(s); it != ex.end()) return it->second;

  const bool all_alpha = !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return ascii_alpha(c);
  });
  if (!all_alpha) return s;

  auto ends_with = [&](const char* suffix) {
    const std::size_t len = std::char_traits<char>::length(suffix);
    return s.size() >= len && s.compare(s.size() - len, len, suffix) == 0;
  };
  auto drop_doubled = [](std::string stem) {
    static const std::string doubling = "bdgmnprt";
    if (stem.size() >= 3 && stem.back() == stem[stem.size() - 2] &&
        doubling.find(stem.back()) != std::string::npos) {
      stem.pop_back();
    }
    return stem;
  };

  const std::size_t n = s.size();
  if (n > 4 && ends_with("ies")) return s.substr(0, n - 3) + "y";
  if (n > 4 && ends_with("ied")) return s.substr(0, n - 3) + "y";
  if (n > 3 && (ends_with("ches") || ends_with("shes") || ends_with("xes") ||
                ends_with("zes") || ends_with("sses"))) {
    return s.substr(0, n - 2);
  }
  if (n > 4 && ends_with("ing")) return drop_doubled(s.substr(0, n - 3));
  if (n > 3 && ends_with("ed")) return drop_doubled(s.substr(0, n - 2));
  if (n > 2 && ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
    return s.substr(0, n - 1);
  }
  return s;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    if (j >= n || !ascii_space(static_cast<unsigned char>(text[j]))) continue;
    std::size_t k = j;
    while (k < n && ascii_space(static_cast<unsigned char>(text[k]))) ++k;
    if (k >= n) break;
    const unsigned char next = static_cast<unsigned char>(text[k]);
    if (!(std::isupper(next) || std::isdigit(next))) continue;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !ascii_space(static_cast<unsigned char>(text[w - 1]))) --w;
      if (abbreviations().count(lower_ascii(text.substr(w, i - w + 1))) > 0) continue;
    }
    std::string sentence = trim(text.substr(start, i + 1 - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = k;
  }
  if (start < n) {
    std::string tail = trim(text.substr(start));
    if (!tail.empty()) out.push_back(std::move(tail));
  }
  return out;
}

Sentence make_sentence(const std::string& text) {
  Sentence s;
  s.text = text;
  s.tokens = tokenize(text);
  for (Token& t : s.tokens) t.lemma = lemmatize(t.surface);
  return s;
}

std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::vector<Document> docs;
  std::set<SubjectPredicate> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed JSON record");
    }
    if (!record.is_object() || !record.contains("subject") || !record["subject"].is_string() ||
        !record.contains("predicate") || !record["predicate"].is_string() ||
        !record.contains("text") || !record["text"].is_string()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected an object with string fields subject, predicate, text");
    }
    Document doc;
    doc.subject_id = record["subject"].get<std::string>();
    doc.predicate_id = record["predicate"].get<std::string>();
    if (doc.subject_id.empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": empty subject");
    }
    if (!seen.insert({doc.subject_id, doc.predicate_id}).second) {
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate subject/predicate pair " +
                      doc.subject_id + "/" + doc.predicate_id);
    }
    for (const std::string& stext : split_sentences(record["text"].get<std::string>())) {
      doc.sentences.push_back(make_sentence(stext));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open corpus file for writing: " + path);
  for (const Document& doc : docs) {
    std::string text;
    for (const Sentence& s : doc.sentences) {
      if (!text.empty()) text += ' ';
      text += s.text;
    }
    nlohmann::json record = {
        {"subject", doc.subject_id}, {"predicate", doc.predicate_id}, {"text", text}};
    out << record.dump() << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
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
  return fields;
}

}  // namespace

KBStore load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open KB file: " + path);
  std::map<SubjectPredicate, std::set<std::string>> objects;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected subject<TAB>predicate<TAB>object");
    }
    objects[{fields[0], fields[1]}].insert(fields[2]);
  }
  KBStore kb;
  for (const auto& [pair, objs] : objects) {
    kb.counts[pair] = static_cast<std::int64_t>(objs.size());
  }
  return kb;
}

std::map<SubjectPredicate, std::int64_t> load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gold count file: " + path);
  std::map<SubjectPredicate, std::int64_t> gold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected subject<TAB>predicate<TAB>count");
    }
    const std::string& raw = fields[2];
    if (raw.empty() || !std::all_of(raw.begin(), raw.end(), ascii_digit)) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": count must be a non-negative integer, got \"" + raw + "\"");
    }
    if (raw.size() > 15) {
      throw DataError(path + ":" + std::to_string(lineno) + ": count out of range");
    }
    SubjectPredicate pair{fields[0], fields[1]};
    if (gold.count(pair) > 0) {
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate gold entry for " +
                      fields[0] + "/" + fields[1]);
    }
    gold[pair] = std::stoll(raw);
  }
  return gold;
}

}  // namespace cardex
