#include "cardex/jsonl.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "cardex/errors.hpp"

namespace cardex {

namespace {

using nlohmann::json;

json flags_to_json(const std::vector<std::uint8_t>& flags) {
  json arr = json::array();
  for (std::uint8_t f : flags) arr.push_back(f ? 1 : 0);
  return arr;
}

std::vector<std::uint8_t> flags_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw DataError(where + ": expected an array of 0/1 flags");
  std::vector<std::uint8_t> flags;
  flags.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      throw DataError(where + ": flags must be 0 or 1");
    }
    flags.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return flags;
}

}  // namespace

void write_labeled_record(std::ostream& out, const LabeledRecord& record) {
  json labels = json::array();
  for (Label l : record.labels) labels.push_back(to_string(l));
  json obj = {{"subject", record.subject_id},
              {"predicate", record.predicate_id},
              {"sentence_idx", record.sentence_idx},
              {"labels", labels},
              {"lemmas", record.x.lemmas},
              {"candidate", flags_to_json(record.x.candidate)},
              {"nummod", flags_to_json(record.x.nummod)}};
  out << obj.dump() << '\n';
}

std::vector<LabeledRecord> load_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labeled file: " + path);
  std::vector<LabeledRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception&) {
      throw DataError(where + ": malformed JSON record");
    }
    if (!obj.is_object() || !obj.contains("subject") || !obj["subject"].is_string() ||
        !obj.contains("predicate") || !obj["predicate"].is_string() ||
        !obj.contains("sentence_idx") || !obj["sentence_idx"].is_number_integer() ||
        !obj.contains("labels") || !obj["labels"].is_array() || !obj.contains("lemmas") ||
        !obj["lemmas"].is_array() || !obj.contains("candidate") || !obj.contains("nummod")) {
      throw DataError(where +
                      ": expected fields subject, predicate, sentence_idx, labels, lemmas, "
                      "candidate, nummod");
    }
    LabeledRecord record;
    record.subject_id = obj["subject"].get<std::string>();
    record.predicate_id = obj["predicate"].get<std::string>();
    record.sentence_idx = obj["sentence_idx"].get<std::size_t>();
    for (const auto& l : obj["labels"]) {
      if (!l.is_string()) throw DataError(where + ": labels must be strings");
      auto label = label_from_string(l.get<std::string>());
      if (!label) throw DataError(where + ": unknown label \"" + l.get<std::string>() + "\"");
      record.labels.push_back(*label);
    }
    for (const auto& l : obj["lemmas"]) {
      if (!l.is_string()) throw DataError(where + ": lemmas must be strings");
      record.x.lemmas.push_back(l.get<std::string>());
    }
    record.x.candidate = flags_from_json(obj["candidate"], where);
    record.x.nummod = flags_from_json(obj["nummod"], where);
    if (record.labels.size() != record.x.lemmas.size() ||
        record.x.candidate.size() != record.x.lemmas.size() ||
        record.x.nummod.size() != record.x.lemmas.size()) {
      throw DataError(where + ": labels, lemmas, candidate, nummod must have equal length");
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_prediction_record(std::ostream& out, const Prediction& prediction) {
  json obj = {{"subject", prediction.subject_id},
              {"predicate", prediction.predicate_id},
              {"count", prediction.count},
              {"confidence", prediction.confidence},
              {"mode", to_string(prediction.mode)},
              {"evidence",
               {{"sentence", prediction.evidence.sentence},
                {"span", {prediction.evidence.span_begin, prediction.evidence.span_end}}}}};
  out << obj.dump() << '\n';
}

std::vector<Prediction> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions file: " + path);
  std::vector<Prediction> predictions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception&) {
      throw DataError(where + ": malformed JSON record");
    }
    if (!obj.is_object() || !obj.contains("subject") || !obj["subject"].is_string() ||
        !obj.contains("predicate") || !obj["predicate"].is_string() || !obj.contains("count") ||
        !obj["count"].is_number_integer()) {
      throw DataError(where + ": expected fields subject, predicate, count");
    }
    Prediction p;
    p.subject_id = obj["subject"].get<std::string>();
    p.predicate_id = obj["predicate"].get<std::string>();
    p.count = obj["count"].get<std::int64_t>();
    if (p.count < 0) throw DataError(where + ": count must be non-negative");
    if (obj.contains("confidence")) {
      if (!obj["confidence"].is_number()) throw DataError(where + ": confidence must be a number");
      p.confidence = obj["confidence"].get<double>();
    }
    if (obj.contains("mode")) {
      if (!obj["mode"].is_string()) throw DataError(where + ": mode must be a string");
      auto mode = prediction_mode_from_string(obj["mode"].get<std::string>());
      if (!mode) throw DataError(where + ": unknown mode \"" + obj["mode"].get<std::string>() + "\"");
      p.mode = *mode;
    }
    if (obj.contains("evidence") && obj["evidence"].is_object()) {
      const auto& ev = obj["evidence"];
      if (ev.contains("sentence") && ev["sentence"].is_number_integer()) {
        p.evidence.sentence = ev["sentence"].get<std::size_t>();
      }
      if (ev.contains("span") && ev["span"].is_array() && ev["span"].size() == 2) {
        p.evidence.span_begin = ev["span"][0].get<std::size_t>();
        p.evidence.span_end = ev["span"][1].get<std::size_t>();
      }
    }
    predictions.push_back(std::move(p));
  }
  return predictions;
}

}  // namespace cardex
