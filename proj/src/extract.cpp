#include "cardex/extract.hpp"

#include <random>

#include "cardex/supervise.hpp"

namespace cardex {

const char* to_string(PredictionMode mode) {
  switch (mode) {
    case PredictionMode::SINGLE: return "SINGLE";
    case PredictionMode::SUM: return "SUM";
    case PredictionMode::TRANSLATED: return "TRANSLATED";
    case PredictionMode::BASELINE: return "BASELINE";
  }
  return "SINGLE";
}

std::optional<PredictionMode> prediction_mode_from_string(const std::string& name) {
  if (name == "SINGLE") return PredictionMode::SINGLE;
  if (name == "SUM") return PredictionMode::SUM;
  if (name == "TRANSLATED") return PredictionMode::TRANSLATED;
  if (name == "BASELINE") return PredictionMode::BASELINE;
  return std::nullopt;
}

namespace {

constexpr int kCardIdx = static_cast<int>(Label::CARD);

Prediction make_prediction(const Document& doc, std::int64_t count, double confidence,
                           Evidence evidence, PredictionMode mode) {
  Prediction p;
  p.subject_id = doc.subject_id;
  p.predicate_id = doc.predicate_id;
  p.count = count;
  p.confidence = confidence;
  p.evidence = evidence;
  p.mode = mode;
  return p;
}

}  // namespace

std::optional<Prediction> predict_count(const CrfModel& model, const Document& doc,
                                        const PredictConfig& config, const NumTagRuleSet& rules) {
  std::optional<Prediction> best;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence& sentence = doc.sentences[si];
    if (sentence.tokens.empty()) continue;
    const FeatureSequence seq = make_feature_sequence(sentence, rules);
    const Posterior post = forward_backward(model, seq);
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      const Token& tok = sentence.tokens[i];
      if (!is_candidate(tok)) continue;
      const double marginal = post.marginals(static_cast<Eigen::Index>(i), kCardIdx);
      if (!(marginal > config.marginal_threshold)) continue;
      if (!best || marginal > best->confidence) {
        best = make_prediction(doc, *tok.num_value, marginal, {si, i, i},
                               PredictionMode::SINGLE);
      }
    }
  }
  return best;
}

std::optional<Prediction> predict_compositional(const CrfModel& model, const Document& doc,
                                                const PredictConfig& config,
                                                const NumTagRuleSet& rules) {
  struct Answer {
    double confidence;
    std::size_t members;
    std::size_t sentence, begin, end;
    std::int64_t count;
  };
  std::optional<Answer> best;
  auto better = [](const Answer& a, const Answer& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.members != b.members) return a.members > b.members;
    if (a.sentence != b.sentence) return a.sentence < b.sentence;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.count < b.count;
  };
  auto offer = [&](const Answer& a) {
    if (!best || better(a, *best)) best = a;
  };

  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence& sentence = doc.sentences[si];
    if (sentence.tokens.empty()) continue;
    const FeatureSequence seq = make_feature_sequence(sentence, rules);
    const Posterior post = forward_backward(model, seq);
    auto marginal = [&](std::size_t i) {
      return post.marginals(static_cast<Eigen::Index>(i), kCardIdx);
    };
    auto qualifies = [&](std::size_t i) {
      return marginal(i) > config.marginal_threshold;
    };

    for (const auto& run : candidate_runs(sentence, rules, qualifies)) {
      if (run.size() >= 2) {
        std::int64_t sum = 0;
        double weakest = 1.0;
        for (std::size_t pos : run) {
          sum += *sentence.tokens[pos].num_value;
          weakest = std::min(weakest, marginal(pos));
        }
        offer({weakest, run.size(), si, run.front(), run.back(), sum});
      }
      for (std::size_t pos : run) {
        offer({marginal(pos), 1, si, pos, pos, *sentence.tokens[pos].num_value});
      }
    }
  }

  if (!best) return std::nullopt;
  return make_prediction(doc, best->count, best->confidence,
                         {best->sentence, best->begin, best->end},
                         best->members >= 2 ? PredictionMode::SUM : PredictionMode::SINGLE);
}

std::optional<Prediction> consolidate(const std::vector<Prediction>& predictions,
                                      const PredictConfig&) {
  const Prediction* best = nullptr;
  for (const Prediction& p : predictions) {
    if (!best) {
      best = &p;
      continue;
    }
    if (p.confidence != best->confidence) {
      if (p.confidence > best->confidence) best = &p;
      continue;
    }
    if (p.count != best->count) {
      if (p.count < best->count) best = &p;
      continue;
    }
    const auto key = [](const Prediction& q) {
      return std::make_tuple(q.evidence.sentence, q.evidence.span_begin, q.evidence.span_end);
    };
    if (key(p) < key(*best)) best = &p;
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<Prediction> apply_zero_one(const Document& doc, const PredictConfig& config,
                                         const NumTagRuleSet& rules) {
  if (!config.enable_zero_one) return std::nullopt;
  std::vector<Prediction> translated;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    for (const ZeroOneAnnotation& ann : translate_zero_one(doc.sentences[si], rules)) {
      translated.push_back(make_prediction(doc, ann.value, 0.5,
                                           {si, ann.position, ann.position},
                                           PredictionMode::TRANSLATED));
    }
  }
  return consolidate(translated, config);
}

std::optional<Prediction> baseline_random(const Document& doc, std::uint64_t seed,
                                          const NumTagRuleSet&) {
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const auto& tokens = doc.sentences[si].tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (is_candidate(tokens[i])) pool.emplace_back(si, i);
    }
  }
  if (pool.empty()) return std::nullopt;
  std::mt19937_64 gen(seed);
  const auto [si, i] = pool[static_cast<std::size_t>(gen() % pool.size())];
  const Token& tok = doc.sentences[si].tokens[i];
  return make_prediction(doc, *tok.num_value, 1.0 / static_cast<double>(pool.size()), {si, i, i},
                         PredictionMode::BASELINE);
}

std::optional<Prediction> predict_document(const CrfModel& model, const Document& doc,
                                           const PredictConfig& config,
                                           const NumTagRuleSet& rules) {
  std::optional<Prediction> prediction = config.enable_compositional
                                             ? predict_compositional(model, doc, config, rules)
                                             : predict_count(model, doc, config, rules);
  if (!prediction && config.enable_zero_one) {
    prediction = apply_zero_one(doc, config, rules);
  }
  return prediction;
}

}  // namespace cardex
