#ifndef CARDEX_NUMTAG_HPP
#define CARDEX_NUMTAG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cardex/corpus.hpp"

namespace cardex {

/// Lexicons driving numeric-token classification. defaults() is the bundled
/// rule set; load() reads the same content from a plain-text config so
/// deployments can override it.
struct NumTagRuleSet {
  std::set<std::string> month_names;
  std::set<std::string> currency_markers;
  std::set<std::string> percent_markers;
  std::set<std::string> temporal_units;  // matched on lemmas
  std::map<std::string, std::int64_t> number_words;
  std::map<std::string, std::int64_t> ordinal_words;
  std::map<std::string, std::int64_t> count_words;
  std::set<std::string> function_words;  // never noun-like
  std::set<std::string> verb_lemmas;     // never noun-like; anchor negation frames
  std::int64_t year_min = 1000;
  std::int64_t year_max = 2199;

  bool operator==(const NumTagRuleSet&) const = default;

  static const NumTagRuleSet& defaults();
  static NumTagRuleSet load(const std::string& path);
  void save(const std::string& path) const;
};

/// Assigns exactly one tag to every numeric token (digit tokens and
/// number-word/count-word/ordinal-word lexicon hits). First match wins:
/// PERCENT -> MONEY -> DATE -> TIME -> DURATION/SET -> ORDINAL -> NUMBER.
/// NUMBER and ORDINAL tokens get num_value via parse_number_word.
void classify_numbers(Sentence& sentence, const NumTagRuleSet& rules = NumTagRuleSet::defaults());
void classify_document(Document& doc, const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Digit strings (commas stripped), digit ordinals ("28th"), number words,
/// hyphenated tens+units, count words, ordinal words. Total function;
/// non-numbers map to nullopt.
std::optional<std::int64_t> parse_number_word(const std::string& surface,
                                              const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Candidate cardinality mention: tagged NUMBER with a parsed value.
bool is_candidate(const Token& token);

/// Content word that can head a count phrase: alphabetic, not a function
/// word, not a known verb lemma, not numeric.
bool is_noun_like(const Token& token, const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Adjacency stand-in for the number->noun dependency edge: a noun-like
/// token within the next two positions, with "of" right after the number
/// blocking ("one of the reasons"). Requires classify_numbers to have run;
/// throws std::out_of_range for a bad index.
bool is_nummod(const Sentence& sentence, std::size_t index,
               const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// A virtual count assertion derived from a negation or indefinite frame,
/// anchored at `position` without rewriting the sentence.
struct ZeroOneAnnotation {
  std::size_t position = 0;
  std::int64_t value = 0;  // 0 or 1

  bool operator==(const ZeroOneAnnotation&) const = default;
};

/// Negation frames ("never VERB", "no NOUN", "not ... any NOUN") -> 0;
/// indefinite frames ("a/an NOUN", "only NOUN") -> 1.
std::vector<ZeroOneAnnotation> translate_zero_one(
    const Sentence& sentence, const NumTagRuleSet& rules = NumTagRuleSet::defaults());

}  // namespace cardex

#endif  // CARDEX_NUMTAG_HPP
