#include "cardex/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardex/corpus.hpp"
#include "cardex/errors.hpp"
#include "cardex/eval.hpp"
#include "cardex/extract.hpp"
#include "cardex/jsonl.hpp"
#include "cardex/numtag.hpp"
#include "cardex/supervise.hpp"

namespace cardex {

namespace {

NumTagRuleSet resolve_rules(const std::string& rules_path) {
  if (rules_path.empty()) return NumTagRuleSet::defaults();
  return NumTagRuleSet::load(rules_path);
}

// "-" means stdout.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (path == "-") {
      stream_ = &std::cout;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("cannot open output file: " + path);
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void run_analyze(const std::string& corpus_path, const std::string& rules_path, bool as_json) {
  const NumTagRuleSet rules = resolve_rules(rules_path);
  const std::vector<Document> docs = load_corpus(corpus_path);
  const TagCensus census = analyze_corpus(docs, rules);

  if (as_json) {
    nlohmann::json freqs = nlohmann::json::object();
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [tag, freq] : census.frequencies) freqs[to_string(tag)] = freq;
    for (const auto& [tag, count] : census.counts) counts[to_string(tag)] = count;
    nlohmann::json nouns = nlohmann::json::array();
    for (const auto& [noun, count] : census.nouns_after_number) {
      nouns.push_back({{"noun", noun}, {"count", count}});
    }
    nlohmann::json out = {{"total", census.total},
                          {"counts", counts},
                          {"frequencies", freqs},
                          {"nouns_after_number", nouns}};
    std::cout << out.dump() << '\n';
    return;
  }

  std::printf("%-10s %8s %10s\n", "tag", "count", "frequency");
  for (const auto& [tag, count] : census.counts) {
    std::printf("%-10s %8zu %10.4f\n", to_string(tag), count, census.frequencies.at(tag));
  }
  std::printf("total numeric tokens: %zu\n", census.total);
  if (!census.nouns_after_number.empty()) {
    std::printf("top nouns after NUMBER tokens:\n");
    const std::size_t limit = std::min<std::size_t>(10, census.nouns_after_number.size());
    for (std::size_t i = 0; i < limit; ++i) {
      std::printf("  %-16s %6zu\n", census.nouns_after_number[i].first.c_str(),
                  census.nouns_after_number[i].second);
    }
  }
}

void run_annotate(const std::string& corpus_path, const std::string& kb_path,
                  SupervisionMode mode, std::int64_t min_count, const std::string& gold_path,
                  const std::string& rules_path, const std::string& out_path) {
  const NumTagRuleSet rules = resolve_rules(rules_path);
  std::vector<Document> docs = load_corpus(corpus_path);
  KBStore kb = load_kb(kb_path);
  SupervisionConfig config;
  config.mode = mode;
  config.min_kb_count = min_count;
  config.use_gold = !gold_path.empty();
  if (config.use_gold) kb.gold_counts = load_gold(gold_path);

  const std::set<SubjectPredicate> kept = filter_subjects(kb, config);
  OutputFile out(out_path);
  for (Document& doc : docs) {
    classify_document(doc, rules);
    const SubjectPredicate pair{doc.subject_id, doc.predicate_id};
    if (kept.count(pair) == 0) {
      std::cerr << "warning: skipping " << doc.subject_id << "/" << doc.predicate_id
                << " (no usable KB count)\n";
      continue;
    }
    const std::int64_t count = config.use_gold ? kb.gold_counts.at(pair) : kb.counts.at(pair);
    const std::vector<LabelSequence> sequences = label_with_count(doc, count, mode, rules);
    for (std::size_t si = 0; si < sequences.size(); ++si) {
      LabeledRecord record;
      record.subject_id = doc.subject_id;
      record.predicate_id = doc.predicate_id;
      record.sentence_idx = si;
      record.x = make_feature_sequence(doc.sentences[si], rules);
      record.labels = sequences[si].labels;
      write_labeled_record(out.stream(), record);
    }
  }
}

void run_train(const std::string& labeled_path, const std::string& out_path,
               const TrainConfig& config) {
  const std::vector<LabeledRecord> records = load_labeled(labeled_path);
  std::vector<TrainExample> dataset;
  dataset.reserve(records.size());
  for (const LabeledRecord& record : records) {
    dataset.push_back({record.x, record.labels});
  }
  const CrfModel model = train(dataset, config);
  save_model(model, out_path);
}

void run_predict(const std::string& corpus_path, const std::string& model_path,
                 const PredictConfig& config, const std::string& rules_path,
                 const std::string& out_path) {
  const NumTagRuleSet rules = resolve_rules(rules_path);
  const CrfModel model = load_model(model_path);
  std::vector<Document> docs = load_corpus(corpus_path);
  OutputFile out(out_path);
  for (Document& doc : docs) {
    classify_document(doc, rules);
    if (auto prediction = predict_document(model, doc, config, rules)) {
      write_prediction_record(out.stream(), *prediction);
    }
  }
}

void run_baseline(const std::string& corpus_path, std::uint64_t seed,
                  const std::string& rules_path, const std::string& out_path) {
  const NumTagRuleSet rules = resolve_rules(rules_path);
  std::vector<Document> docs = load_corpus(corpus_path);
  OutputFile out(out_path);
  std::uint64_t index = 0;
  for (Document& doc : docs) {
    classify_document(doc, rules);
    if (auto prediction = baseline_random(doc, seed + index, rules)) {
      write_prediction_record(out.stream(), *prediction);
    }
    ++index;
  }
}

void print_report_row(const EvalReport& r, int name_width) {
  std::printf("%-*s %6zu %6zu %6zu %7.3f %7.3f %7.3f\n", name_width, r.predicate_id.c_str(),
              r.n_subjects, r.n_predicted, r.n_correct, r.precision, r.recall, r.f1);
}

void run_evaluate(const std::string& predictions_path, const std::string& gold_path,
                  bool as_json) {
  const std::vector<Prediction> predictions = load_predictions(predictions_path);
  const std::map<SubjectPredicate, std::int64_t> gold = load_gold(gold_path);

  // Validates every prediction against the full gold map.
  const EvalReport overall = evaluate(predictions, gold);

  std::set<std::string> predicates;
  for (const auto& [pair, count] : gold) predicates.insert(pair.second);

  std::vector<EvalReport> rows;
  for (const std::string& predicate : predicates) {
    std::map<SubjectPredicate, std::int64_t> gold_subset;
    for (const auto& [pair, count] : gold) {
      if (pair.second == predicate) gold_subset[pair] = count;
    }
    std::vector<Prediction> pred_subset;
    for (const Prediction& p : predictions) {
      if (p.predicate_id == predicate) pred_subset.push_back(p);
    }
    rows.push_back(evaluate(pred_subset, gold_subset));
  }
  if (predicates.size() > 1) rows.push_back(overall);

  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const EvalReport& r : rows) {
      out.push_back({{"predicate", r.predicate_id},
                     {"subjects", r.n_subjects},
                     {"predicted", r.n_predicted},
                     {"correct", r.n_correct},
                     {"precision", r.precision},
                     {"recall", r.recall},
                     {"f1", r.f1}});
    }
    std::cout << out.dump() << '\n';
    return;
  }

  int name_width = 9;
  for (const EvalReport& r : rows) {
    name_width = std::max(name_width, static_cast<int>(r.predicate_id.size()));
  }
  std::printf("%-*s %6s %6s %6s %7s %7s %7s\n", name_width, "predicate", "#s", "#pred", "#corr",
              "P", "R", "F1");
  for (const EvalReport& r : rows) print_report_row(r, name_width);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"cardex: relation cardinality extraction toolkit"};
  app.require_subcommand(1);

  struct {
    std::string corpus, kb, gold, rules, labeled, model, predictions, out = "-";
    std::string mode = "vanilla";
    std::int64_t min_count = 1;
    std::uint64_t seed = 42;
    bool json = false;
    bool compositional = false;
    bool zero_one = false;
    TrainConfig train_config;
    PredictConfig predict_config;
  } opt;

  auto* analyze = app.add_subcommand("analyze", "Report the numeric tag census of a corpus");
  analyze->add_option("corpus", opt.corpus, "corpus JSONL file")->required();
  analyze->add_option("--rules", opt.rules, "rule lexicon file overriding the built-in one");
  analyze->add_flag("--json", opt.json, "emit JSON instead of a text table");
  analyze->callback([&] { run_analyze(opt.corpus, opt.rules, opt.json); });

  auto* annotate =
      app.add_subcommand("annotate", "Produce distant-supervision labels from KB counts");
  annotate->add_option("corpus", opt.corpus, "corpus JSONL file")->required();
  annotate->add_option("kb", opt.kb, "KB triples TSV file")->required();
  annotate->add_option("--mode", opt.mode, "labeling mode")
      ->check(CLI::IsMember({"vanilla", "nummod", "resilient", "comp"}))
      ->capture_default_str();
  annotate->add_option("--min-count", opt.min_count, "keep subjects with KB count >= N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  annotate->add_option("--gold", opt.gold, "train on manual gold counts from this TSV file");
  annotate->add_option("--rules", opt.rules, "rule lexicon file");
  annotate->add_option("--out", opt.out, "output file (- for stdout)")->capture_default_str();
  annotate->callback([&] {
    SupervisionMode mode = SupervisionMode::VANILLA;
    if (opt.mode == "nummod") mode = SupervisionMode::ONLY_NUMMOD;
    else if (opt.mode == "resilient") mode = SupervisionMode::RESILIENT;
    else if (opt.mode == "comp") mode = SupervisionMode::COMPOSITIONAL;
    run_annotate(opt.corpus, opt.kb, mode, opt.min_count, opt.gold, opt.rules, opt.out);
  });

  auto* train_cmd = app.add_subcommand("train", "Train a CRF on labeled sequences");
  train_cmd->add_option("labeled", opt.labeled, "labeled JSONL file from annotate")->required();
  train_cmd->add_option("--out", opt.model, "output model file")->required();
  train_cmd->add_option("--sigma", opt.train_config.l2_sigma, "L2 regularization sigma")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--max-iter", opt.train_config.max_iterations, "iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--tol", opt.train_config.convergence_tol,
                        "relative objective-change stopping tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd
      ->add_option("--min-feature-count", opt.train_config.min_feature_count,
                   "prune features seen fewer times")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->callback([&] { run_train(opt.labeled, opt.model, opt.train_config); });

  auto* predict = app.add_subcommand("predict", "Predict relation cardinalities with a model");
  predict->add_option("corpus", opt.corpus, "corpus JSONL file")->required();
  predict->add_option("model", opt.model, "model file from train")->required();
  predict
      ->add_option("--threshold", opt.predict_config.marginal_threshold,
                   "CARD marginal must be strictly above this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  predict->add_flag("--compositional", opt.predict_config.enable_compositional,
                    "sum connector-separated runs of confident numbers");
  predict->add_flag("--zero-one", opt.predict_config.enable_zero_one,
                    "fall back to negation/indefinite translation when the model abstains");
  predict->add_option("--rules", opt.rules, "rule lexicon file");
  predict->add_option("--out", opt.out, "output file (- for stdout)")->capture_default_str();
  predict->callback(
      [&] { run_predict(opt.corpus, opt.model, opt.predict_config, opt.rules, opt.out); });

  auto* baseline = app.add_subcommand("baseline", "Random-number baseline predictions");
  baseline->add_option("corpus", opt.corpus, "corpus JSONL file")->required();
  baseline->add_option("--seed", opt.seed, "PRNG seed")->capture_default_str();
  baseline->add_option("--rules", opt.rules, "rule lexicon file");
  baseline->add_option("--out", opt.out, "output file (- for stdout)")->capture_default_str();
  baseline->callback([&] { run_baseline(opt.corpus, opt.seed, opt.rules, opt.out); });

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold counts");
  evaluate_cmd->add_option("predictions", opt.predictions, "predictions JSONL file")->required();
  evaluate_cmd->add_option("gold", opt.gold, "gold counts TSV file")->required();
  evaluate_cmd->add_flag("--json", opt.json, "emit JSON instead of a text table");
  evaluate_cmd->callback([&] { run_evaluate(opt.predictions, opt.gold, opt.json); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace cardex
