#ifndef CARDEX_EVAL_HPP
#define CARDEX_EVAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cardex/corpus.hpp"
#include "cardex/extract.hpp"
#include "cardex/numtag.hpp"

namespace cardex {

/// Precision counts predictions made (abstentions excluded); recall counts
/// all evaluated subjects. A prediction is correct only on exact count
/// match.
struct EvalReport {
  std::string predicate_id;
  std::size_t n_subjects = 0;
  std::size_t n_predicted = 0;
  std::size_t n_correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Scores predictions against gold counts. Throws DataError for a
/// prediction whose (subject, predicate) is not in gold, or for duplicate
/// predictions of the same pair.
EvalReport evaluate(const std::vector<Prediction>& predictions,
                    const std::map<SubjectPredicate, std::int64_t>& gold);

struct TagCensus {
  std::map<NumTag, std::size_t> counts;
  std::map<NumTag, double> frequencies;  // relative, sum to 1 when total > 0
  std::size_t total = 0;                 // tokens with num_tag != NONE
  std::vector<std::pair<std::string, std::size_t>> nouns_after_number;  // sorted desc
};

/// Runs classify_numbers over every sentence and reports the tag
/// distribution plus the nouns most often following NUMBER tokens.
TagCensus analyze_corpus(const std::vector<Document>& docs,
                         const NumTagRuleSet& rules = NumTagRuleSet::defaults());

}  // namespace cardex

#endif  // CARDEX_EVAL_HPP
