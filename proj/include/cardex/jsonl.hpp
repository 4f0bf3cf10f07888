#ifndef CARDEX_JSONL_HPP
#define CARDEX_JSONL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cardex/crf.hpp"
#include "cardex/extract.hpp"
#include "cardex/label.hpp"

namespace cardex {

/// One labeled sentence as emitted by `annotate` and consumed by `train`:
/// the label sequence plus the observation view needed to featurize it.
struct LabeledRecord {
  std::string subject_id;
  std::string predicate_id;
  std::size_t sentence_idx = 0;
  FeatureSequence x;
  std::vector<Label> labels;

  bool operator==(const LabeledRecord&) const = default;
};

void write_labeled_record(std::ostream& out, const LabeledRecord& record);
std::vector<LabeledRecord> load_labeled(const std::string& path);

void write_prediction_record(std::ostream& out, const Prediction& prediction);
std::vector<Prediction> load_predictions(const std::string& path);

}  // namespace cardex

#endif  // CARDEX_JSONL_HPP
