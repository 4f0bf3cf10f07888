#ifndef CARDEX_EXTRACT_HPP
#define CARDEX_EXTRACT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cardex/corpus.hpp"
#include "cardex/crf.hpp"
#include "cardex/numtag.hpp"

namespace cardex {

enum class PredictionMode { SINGLE, SUM, TRANSLATED, BASELINE };

const char* to_string(PredictionMode mode);
std::optional<PredictionMode> prediction_mode_from_string(const std::string& name);

/// Token span evidence, inclusive on both ends.
struct Evidence {
  std::size_t sentence = 0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;

  bool operator==(const Evidence&) const = default;
};

struct Prediction {
  std::string subject_id;
  std::string predicate_id;
  std::int64_t count = 0;
  double confidence = 1.0;  // in (0, 1]
  Evidence evidence;
  PredictionMode mode = PredictionMode::SINGLE;
};

struct PredictConfig {
  double marginal_threshold = 0.1;  // strict greater-than gate
  bool enable_compositional = false;
  bool enable_zero_one = false;
};

/// Highest CARD marginal among candidates strictly above the threshold;
/// ties go to the earliest (sentence, token) position. Abstains (nullopt)
/// when nothing qualifies. The document must be numtag-classified.
std::optional<Prediction> predict_count(const CrfModel& model, const Document& doc,
                                        const PredictConfig& config = {},
                                        const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Sums connector-separated runs of qualifying candidates; answers compete
/// by their weakest member marginal, with longer runs, earlier spans, and
/// smaller counts breaking ties in that order. mode SUM when a run of
/// length >= 2 wins.
std::optional<Prediction> predict_compositional(
    const CrfModel& model, const Document& doc, const PredictConfig& config = {},
    const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// MAX_MARGINAL consolidation: highest confidence wins; ties prefer the
/// smaller count, then the earlier evidence span.
std::optional<Prediction> consolidate(const std::vector<Prediction>& predictions,
                                      const PredictConfig& config = {});

/// Zero/one linguistic translation as a fallback answer (confidence 0.5,
/// mode TRANSLATED). Returns nullopt unless config.enable_zero_one.
std::optional<Prediction> apply_zero_one(const Document& doc, const PredictConfig& config,
                                         const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Uniform choice from the candidate-number pool with a seeded PRNG;
/// confidence is 1/pool-size. Bit-reproducible for a fixed seed.
std::optional<Prediction> baseline_random(const Document& doc, std::uint64_t seed,
                                          const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Pipeline rule: compositional or plain CRF prediction, then the zero/one
/// translation only if the CRF abstained.
std::optional<Prediction> predict_document(const CrfModel& model, const Document& doc,
                                           const PredictConfig& config = {},
                                           const NumTagRuleSet& rules = NumTagRuleSet::defaults());

}  // namespace cardex

#endif  // CARDEX_EXTRACT_HPP
