#ifndef CARDEX_CORPUS_HPP
#define CARDEX_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cardex {

enum class NumTag { NONE, DATE, TIME, DURATION, SET, MONEY, PERCENT, NUMBER, ORDINAL };

const char* to_string(NumTag tag);
std::optional<NumTag> numtag_from_string(const std::string& name);

struct Token {
  std::string surface;
  std::string lemma;
  std::size_t index = 0;       // 0-based position within the sentence
  std::size_t char_start = 0;  // byte offsets into the sentence text
  std::size_t char_end = 0;
  NumTag num_tag = NumTag::NONE;
  std::optional<std::int64_t> num_value;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string text;
  std::vector<Token> tokens;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string subject_id;
  std::string predicate_id;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

using SubjectPredicate = std::pair<std::string, std::string>;

/// Per-(subject, predicate) object counts loaded from triple rows. Every
/// stored count is >= 1; gold_counts come from a separate manual file and
/// may contain 0.
struct KBStore {
  std::map<SubjectPredicate, std::int64_t> counts;
  std::map<SubjectPredicate, std::int64_t> gold_counts;
};

/// Deterministic split on whitespace and punctuation. Digit groups with
/// internal commas/periods/colons stay one token ("1,234", "3.14", "7:30"),
/// as do digit+suffix forms ("28th") and hyphenated tens+units number words
/// ("twenty-one"). Byte offsets into `text` are recorded on every token.
std::vector<Token> tokenize(const std::string& text);

/// Lowercases, applies an exception lexicon for irregular forms
/// (children -> child, has -> have, ...) and strips regular plural/verb
/// suffixes. Unmatched tokens pass through lowercased.
std::string lemmatize(const std::string& surface);

/// Splits on terminal punctuation followed by whitespace and an
/// uppercase/digit start; a bundled abbreviation list ("Mr.", "St.", "No.",
/// ...) suppresses false boundaries.
std::vector<std::string> split_sentences(const std::string& text);

/// tokenize + lemmatize; numeric tags are left NONE for numtag to fill.
Sentence make_sentence(const std::string& text);

std::vector<Document> load_corpus(const std::string& path);
void save_corpus(const std::vector<Document>& docs, const std::string& path);
KBStore load_kb(const std::string& path);
std::map<SubjectPredicate, std::int64_t> load_gold(const std::string& path);

}  // namespace cardex

#endif  // CARDEX_CORPUS_HPP
