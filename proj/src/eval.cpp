#include "cardex/eval.hpp"

#include <algorithm>
#include <set>

#include "cardex/errors.hpp"

namespace cardex {

EvalReport evaluate(const std::vector<Prediction>& predictions,
                    const std::map<SubjectPredicate, std::int64_t>& gold) {
  EvalReport report;
  report.n_subjects = gold.size();

  std::set<std::string> predicates;
  for (const auto& [pair, count] : gold) predicates.insert(pair.second);
  report.predicate_id = predicates.size() == 1 ? *predicates.begin() : "all";

  std::set<SubjectPredicate> seen;
  for (const Prediction& p : predictions) {
    const SubjectPredicate pair{p.subject_id, p.predicate_id};
    auto it = gold.find(pair);
    if (it == gold.end()) {
      throw DataError("prediction for unknown subject/predicate: " + p.subject_id + "/" +
                      p.predicate_id);
    }
    if (!seen.insert(pair).second) {
      throw DataError("duplicate prediction for " + p.subject_id + "/" + p.predicate_id);
    }
    ++report.n_predicted;
    if (p.count == it->second) ++report.n_correct;
  }

  const double correct = static_cast<double>(report.n_correct);
  report.precision = report.n_predicted > 0 ? correct / static_cast<double>(report.n_predicted) : 0.0;
  report.recall = report.n_subjects > 0 ? correct / static_cast<double>(report.n_subjects) : 0.0;
  report.f1 = report.precision + report.recall > 0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  return report;
}

TagCensus analyze_corpus(const std::vector<Document>& docs, const NumTagRuleSet& rules) {
  TagCensus census;
  std::map<std::string, std::size_t> nouns;
  for (const Document& doc : docs) {
    for (const Sentence& original : doc.sentences) {
      Sentence sentence = original;
      classify_numbers(sentence, rules);
      const auto& tokens = sentence.tokens;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].num_tag == NumTag::NONE) continue;
        ++census.counts[tokens[i].num_tag];
        ++census.total;
        if (tokens[i].num_tag != NumTag::NUMBER) continue;
        for (std::size_t j = i + 1; j <= i + 2 && j < tokens.size(); ++j) {
          if (is_noun_like(tokens[j], rules)) {
            ++nouns[tokens[j].lemma];
            break;
          }
        }
      }
    }
  }
  if (census.total > 0) {
    for (const auto& [tag, count] : census.counts) {
      census.frequencies[tag] =
          static_cast<double>(count) / static_cast<double>(census.total);
    }
  }
  census.nouns_after_number.assign(nouns.begin(), nouns.end());
  std::sort(census.nouns_after_number.begin(), census.nouns_after_number.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return census;
}

}  // namespace cardex
