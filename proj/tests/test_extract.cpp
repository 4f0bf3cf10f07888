#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cardex/extract.hpp"
#include "crf_oracle.hpp"
#include "test_util.hpp"

using namespace cardex;
using testutil::classified_document;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

// Model with the named features' CARD weights set; everything else zero, no
// transitions, so positions decouple and each marginal is a plain sigmoid.
CrfModel cue_model(const std::vector<std::pair<std::string, double>>& card_marginals) {
  CrfModel model;
  for (const auto& [feature, marginal] : card_marginals) model.add_feature(feature);
  model.state_weights = Eigen::MatrixX2d::Zero(model.num_features(), 2);
  for (int f = 0; f < model.num_features(); ++f) {
    model.state_weights(f, 0) = logit(card_marginals[static_cast<std::size_t>(f)].second);
  }
  return model;
}

}  // namespace

TEST_CASE("predict_count picks the highest qualifying marginal") {
  // "two" reads 0.6 through its following noun, "three" only 0.2
  const CrfModel model = cue_model({{"U3=son", 0.6}, {"U3=car", 0.2}});
  const auto doc = classified_document("s1", "child", "He has two sons and later three cars.");

  const auto p = predict_count(model, doc);
  REQUIRE(p.has_value());
  CHECK(p->count == 2);
  CHECK(p->confidence == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(p->mode == PredictionMode::SINGLE);
  CHECK(p->evidence.sentence == 0);
  CHECK(p->evidence.span_begin == 2);
  CHECK(p->evidence.span_end == 2);
}

TEST_CASE("predict_count abstains without qualifying candidates") {
  CrfModel zero;
  const auto no_numbers = classified_document("s1", "p", "Nothing numeric lives here.");
  CHECK_FALSE(predict_count(zero, no_numbers).has_value());

  PredictConfig strict;
  strict.marginal_threshold = 0.9;  // uniform marginals are 0.5
  const auto doc = classified_document("s1", "p", "He won 3 medals.");
  CHECK_FALSE(predict_count(zero, doc, strict).has_value());
}

TEST_CASE("threshold comparison is strictly greater-than") {
  const CrfModel model = cue_model({{"U3=son", 0.4}});
  const auto doc = classified_document("s1", "child", "He has two sons.");
  const Posterior post = forward_backward(model, doc.sentences[0]);
  const double marginal = post.marginals(2, 0);

  PredictConfig config;
  config.marginal_threshold = marginal;  // exact equality must abstain
  CHECK_FALSE(predict_count(model, doc, config).has_value());

  config.marginal_threshold = std::nextafter(marginal, 0.0);
  const auto p = predict_count(model, doc, config);
  REQUIRE(p.has_value());
  CHECK(p->count == 2);
}

TEST_CASE("threshold zero abstains only on candidate-free documents") {
  CrfModel zero;
  PredictConfig config;
  config.marginal_threshold = 0.0;
  std::mt19937 gen(5);
  const std::vector<std::string> texts = {
      "He has 3 children.", "Born in 1984, he won nothing.", "No numbers at all.",
      "It cost $40 on 2 May.", "twenty-one towns and 4 rivers."};
  for (const std::string& text : texts) {
    const auto doc = classified_document("s", "p", text);
    bool any_candidate = false;
    for (const auto& sentence : doc.sentences) {
      for (const auto& tok : sentence.tokens) any_candidate |= is_candidate(tok);
    }
    CHECK(predict_count(zero, doc, config).has_value() == any_candidate);
  }
}

TEST_CASE("raising the threshold only filters the same answer into abstention") {
  std::mt19937 gen(6);
  const auto doc = classified_document(
      "s", "p", "Kim raised 2 sons, 4 daughters and 7 goats. Kim won 9 cups in 1984.");
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FeatureSequence> seqs;
    for (const auto& s : doc.sentences) seqs.push_back(make_feature_sequence(s));
    const CrfModel model = oracle::random_model(gen, seqs);
    PredictConfig low, high;
    low.marginal_threshold = 0.05;
    high.marginal_threshold = 0.5;
    const auto a = predict_count(model, doc, low);
    const auto b = predict_count(model, doc, high);
    if (b.has_value()) {
      REQUIRE(a.has_value());
      CHECK(a->count == b->count);
      CHECK(a->confidence == b->confidence);
      CHECK(a->evidence.span_begin == b->evidence.span_begin);
    }
  }
}

TEST_CASE("predict_compositional sums confident runs") {
  const auto doc = classified_document("s1", "child", "They have two sons and one daughter.");

  SUBCASE("uniform 0.5 marginals sum the run") {
    CrfModel zero;
    PredictConfig config;
    config.enable_compositional = true;
    const auto p = predict_compositional(zero, doc, config);
    REQUIRE(p.has_value());
    CHECK(p->count == 3);
    CHECK(p->mode == PredictionMode::SUM);
    CHECK(p->confidence == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p->evidence.span_begin == 2);
    CHECK(p->evidence.span_end == 5);

    // plain prediction keeps the earliest tied single
    const auto plain = predict_count(zero, doc);
    REQUIRE(plain.has_value());
    CHECK(plain->count == 2);
  }

  SUBCASE("a member below the threshold breaks the run") {
    const CrfModel model = cue_model({{"U3=son", 0.5}, {"U3=daughter", 0.05}});
    PredictConfig config;
    config.enable_compositional = true;
    const auto p = predict_compositional(model, doc, config);
    REQUIRE(p.has_value());
    CHECK(p->count == 2);
    CHECK(p->mode == PredictionMode::SINGLE);
  }

  SUBCASE("nothing qualifying abstains") {
    CrfModel zero;
    PredictConfig config;
    config.enable_compositional = true;
    config.marginal_threshold = 0.9;
    CHECK_FALSE(predict_compositional(zero, doc, config).has_value());
  }
}

TEST_CASE("predict_compositional equals predict_count when no runs form") {
  // breakers between all candidate pairs: no run of length >= 2 exists
  const auto doc = classified_document(
      "s", "p", "He won 3 medals; he wrote 2 books. She kept 7 maps in 1990.");
  std::mt19937 gen(7);
  std::vector<FeatureSequence> seqs;
  for (const auto& s : doc.sentences) seqs.push_back(make_feature_sequence(s));
  for (int trial = 0; trial < 20; ++trial) {
    const CrfModel model = oracle::random_model(gen, seqs);
    PredictConfig comp;
    comp.enable_compositional = true;
    const auto a = predict_compositional(model, doc, comp);
    const auto b = predict_count(model, doc);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      CHECK(a->count == b->count);
      CHECK(a->confidence == b->confidence);
      CHECK(a->mode == PredictionMode::SINGLE);
      CHECK(a->evidence.span_begin == b->evidence.span_begin);
    }
  }
}

TEST_CASE("consolidate keeps the most confident, then smaller counts") {
  auto make = [](std::int64_t count, double conf) {
    Prediction p;
    p.subject_id = "s";
    p.predicate_id = "p";
    p.count = count;
    p.confidence = conf;
    return p;
  };
  const auto best = consolidate({make(5, 0.4), make(3, 0.7)}, {});
  REQUIRE(best.has_value());
  CHECK(best->count == 3);

  const auto tie = consolidate({make(5, 0.4), make(3, 0.4)}, {});
  REQUIRE(tie.has_value());
  CHECK(tie->count == 3);

  CHECK_FALSE(consolidate({}, {}).has_value());
}

TEST_CASE("apply_zero_one translates only when enabled and CRF abstains") {
  PredictConfig config;
  config.enable_zero_one = true;

  const auto never = classified_document("s1", "spouse", "He never married.");
  const auto p = apply_zero_one(never, config);
  REQUIRE(p.has_value());
  CHECK(p->count == 0);
  CHECK(p->confidence == doctest::Approx(0.5));
  CHECK(p->mode == PredictionMode::TRANSLATED);

  PredictConfig disabled;
  CHECK_FALSE(apply_zero_one(never, disabled).has_value());

  // conflicting frames consolidate toward the smaller count
  const auto mixed = classified_document("s2", "child", "He never fathered a child.");
  const auto q = apply_zero_one(mixed, config);
  REQUIRE(q.has_value());
  CHECK(q->count == 0);

  // CRF answers take priority in the document driver
  const CrfModel model = cue_model({{"U3=son", 0.6}});
  const auto doc = classified_document("s3", "child", "They have two sons and a dog.");
  const auto driven = predict_document(model, doc, config);
  REQUIRE(driven.has_value());
  CHECK(driven->count == 2);
  CHECK(driven->mode == PredictionMode::SINGLE);

  // with the model abstaining, the translation answers
  PredictConfig strict = config;
  strict.marginal_threshold = 0.95;
  const auto fallback = predict_document(model, doc, strict);
  REQUIRE(fallback.has_value());
  CHECK(fallback->count == 1);
  CHECK(fallback->mode == PredictionMode::TRANSLATED);

  const auto nothing = classified_document("s4", "child", "He sailed away alone.");
  CHECK_FALSE(predict_document(model, nothing, strict).has_value());
}

TEST_CASE("baseline_random draws uniformly from the candidate pool") {
  const auto single = classified_document("s1", "p", "She wrote 4 novels.");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = baseline_random(single, seed);
    REQUIRE(p.has_value());
    CHECK(p->count == 4);
    CHECK(p->confidence == doctest::Approx(1.0));
    CHECK(p->mode == PredictionMode::BASELINE);
  }

  const auto empty = classified_document("s2", "p", "Born in 1984, retired rich.");
  CHECK_FALSE(baseline_random(empty, 1).has_value());

  const auto doc =
      classified_document("s3", "p", "The park has 2 lakes, 5 ponds, 7 rivers and 9 hills.");
  const auto a = baseline_random(doc, 42);
  const auto b = baseline_random(doc, 42);
  REQUIRE(a.has_value());
  CHECK(a->count == b->count);
  CHECK(a->evidence.span_begin == b->evidence.span_begin);
  CHECK(a->confidence == doctest::Approx(0.25));

  // quick calibration: the true value (present once) is hit ~1/4 of the time
  int correct = 0;
  const int trials = 2000;
  for (int seed = 0; seed < trials; ++seed) {
    const auto p = baseline_random(doc, static_cast<std::uint64_t>(seed));
    REQUIRE(p.has_value());
    correct += p->count == 2;
  }
  const double precision = static_cast<double>(correct) / trials;
  CHECK(precision > 0.25 - 0.05);
  CHECK(precision < 0.25 + 0.05);
}
