#ifndef CARDEX_SUPERVISE_HPP
#define CARDEX_SUPERVISE_HPP

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cardex/corpus.hpp"
#include "cardex/label.hpp"
#include "cardex/numtag.hpp"

namespace cardex {

enum class SupervisionMode { VANILLA, ONLY_NUMMOD, RESILIENT, COMPOSITIONAL };

const char* to_string(SupervisionMode mode);

/// Per-token labels for one sentence; length equals the token count and
/// CARD only appears at candidate positions.
struct LabelSequence {
  std::vector<Label> labels;
  SupervisionMode mode = SupervisionMode::VANILLA;

  bool operator==(const LabelSequence&) const = default;
};

struct SupervisionConfig {
  SupervisionMode mode = SupervisionMode::VANILLA;
  std::int64_t min_kb_count = 1;  // ground-truth popularity filter, >= 1
  bool use_gold = false;          // substitute manual gold counts for KB counts
};

/// Maximal runs of candidate positions separated only by connector tokens
/// (",", "and", noun-like/adjective words). `keep` restricts which candidate
/// positions participate; runs of length 1 are included.
std::vector<std::vector<std::size_t>> candidate_runs(
    const Sentence& sentence, const NumTagRuleSet& rules = NumTagRuleSet::defaults(),
    const std::function<bool(std::size_t)>& keep = nullptr);

/// Core labeling rule shared by the public per-mode entry points, with the
/// relation count supplied directly.
std::vector<LabelSequence> label_with_count(const Document& doc, std::int64_t count,
                                            SupervisionMode mode,
                                            const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Candidate number equal to the KB count -> CARD; everything else O.
/// Throws DataError when the KB has no count for the document's pair.
std::vector<LabelSequence> label_vanilla(const Document& doc, const KBStore& kb,
                                         const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// As vanilla, additionally requiring the nummod adjacency test.
std::vector<LabelSequence> label_only_nummod(const Document& doc, const KBStore& kb,
                                             const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Candidate number >= the KB count -> CARD (incompleteness-resilient).
std::vector<LabelSequence> label_resilient(const Document& doc, const KBStore& kb,
                                           const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Runs of connector-separated candidates summing to the KB count -> all
/// CARD, plus single-number equality (union of both rules).
std::vector<LabelSequence> label_compositional(const Document& doc, const KBStore& kb,
                                               const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Pairs passing the popularity filter (count >= min_kb_count); with
/// use_gold, only pairs that also appear in gold_counts.
std::set<SubjectPredicate> filter_subjects(const KBStore& kb, const SupervisionConfig& config);

}  // namespace cardex

#endif  // CARDEX_SUPERVISE_HPP
