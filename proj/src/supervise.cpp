#include "cardex/supervise.hpp"

#include <numeric>

#include "cardex/errors.hpp"

namespace cardex {

const char* to_string(SupervisionMode mode) {
  switch (mode) {
    case SupervisionMode::VANILLA: return "VANILLA";
    case SupervisionMode::ONLY_NUMMOD: return "ONLY_NUMMOD";
    case SupervisionMode::RESILIENT: return "RESILIENT";
    case SupervisionMode::COMPOSITIONAL: return "COMPOSITIONAL";
  }
  return "VANILLA";
}

namespace {

bool is_run_connector(const Token& token, const NumTagRuleSet& rules) {
  return token.surface == "," || token.lemma == "and" || is_noun_like(token, rules);
}

std::int64_t lookup_count(const Document& doc, const KBStore& kb) {
  auto it = kb.counts.find({doc.subject_id, doc.predicate_id});
  if (it == kb.counts.end()) {
    throw DataError("no KB count for subject=" + doc.subject_id +
                    " predicate=" + doc.predicate_id);
  }
  return it->second;
}

}  // namespace

std::vector<std::vector<std::size_t>> candidate_runs(
    const Sentence& sentence, const NumTagRuleSet& rules,
    const std::function<bool(std::size_t)>& keep) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (is_candidate(sentence.tokens[i]) && (!keep || keep(i))) positions.push_back(i);
  }

  std::vector<std::vector<std::size_t>> runs;
  std::vector<std::size_t> current;
  for (std::size_t pos : positions) {
    if (current.empty()) {
      current.push_back(pos);
      continue;
    }
    bool connected = true;
    for (std::size_t j = current.back() + 1; j < pos; ++j) {
      if (!is_run_connector(sentence.tokens[j], rules)) {
        connected = false;
        break;
      }
    }
    if (connected) {
      current.push_back(pos);
    } else {
      runs.push_back(std::move(current));
      current = {pos};
    }
  }
  if (!current.empty()) runs.push_back(std::move(current));
  return runs;
}

std::vector<LabelSequence> label_with_count(const Document& doc, std::int64_t count,
                                            SupervisionMode mode, const NumTagRuleSet& rules) {
  std::vector<LabelSequence> out;
  out.reserve(doc.sentences.size());
  for (const Sentence& sentence : doc.sentences) {
    LabelSequence seq;
    seq.mode = mode;
    seq.labels.assign(sentence.tokens.size(), Label::O);
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      const Token& tok = sentence.tokens[i];
      if (!is_candidate(tok)) continue;
      const std::int64_t value = *tok.num_value;
      switch (mode) {
        case SupervisionMode::VANILLA:
          if (value == count) seq.labels[i] = Label::CARD;
          break;
        case SupervisionMode::ONLY_NUMMOD:
          if (value == count && is_nummod(sentence, i, rules)) seq.labels[i] = Label::CARD;
          break;
        case SupervisionMode::RESILIENT:
          if (value >= count) seq.labels[i] = Label::CARD;
          break;
        case SupervisionMode::COMPOSITIONAL:
          if (value == count) seq.labels[i] = Label::CARD;
          break;
      }
    }
    if (mode == SupervisionMode::COMPOSITIONAL) {
      for (const auto& run : candidate_runs(sentence, rules)) {
        if (run.size() < 2) continue;
        std::int64_t sum = 0;
        for (std::size_t pos : run) sum += *sentence.tokens[pos].num_value;
        if (sum == count) {
          for (std::size_t pos : run) seq.labels[pos] = Label::CARD;
        }
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<LabelSequence> label_vanilla(const Document& doc, const KBStore& kb,
                                         const NumTagRuleSet& rules) {
  return label_with_count(doc, lookup_count(doc, kb), SupervisionMode::VANILLA, rules);
}

std::vector<LabelSequence> label_only_nummod(const Document& doc, const KBStore& kb,
                                             const NumTagRuleSet& rules) {
  return label_with_count(doc, lookup_count(doc, kb), SupervisionMode::ONLY_NUMMOD, rules);
}

std::vector<LabelSequence> label_resilient(const Document& doc, const KBStore& kb,
                                           const NumTagRuleSet& rules) {
  return label_with_count(doc, lookup_count(doc, kb), SupervisionMode::RESILIENT, rules);
}

std::vector<LabelSequence> label_compositional(const Document& doc, const KBStore& kb,
                                               const NumTagRuleSet& rules) {
  return label_with_count(doc, lookup_count(doc, kb), SupervisionMode::COMPOSITIONAL, rules);
}

std::set<SubjectPredicate> filter_subjects(const KBStore& kb, const SupervisionConfig& config) {
  if (config.min_kb_count < 1) {
    throw DataError("min_kb_count must be >= 1");
  }
  std::set<SubjectPredicate> kept;
  for (const auto& [pair, count] : kb.counts) {
    if (count < config.min_kb_count) continue;
    if (config.use_gold && kb.gold_counts.count(pair) == 0) continue;
    kept.insert(pair);
  }
  return kept;
}

}  // namespace cardex
