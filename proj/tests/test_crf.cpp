#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cardex/crf.hpp"
#include "cardex/errors.hpp"
#include "crf_oracle.hpp"
#include "test_util.hpp"

using namespace cardex;
using testutil::TempDir;

namespace {

FeatureSequence seq_from(std::vector<std::string> lemmas, std::vector<int> candidate = {},
                         std::vector<int> nummod = {}) {
  FeatureSequence seq;
  seq.lemmas = std::move(lemmas);
  seq.candidate.assign(seq.lemmas.size(), 0);
  seq.nummod.assign(seq.lemmas.size(), 0);
  for (std::size_t i = 0; i < candidate.size(); ++i) seq.candidate[i] = candidate[i] ? 1 : 0;
  for (std::size_t i = 0; i < nummod.size(); ++i) seq.nummod[i] = nummod[i] ? 1 : 0;
  return seq;
}

std::vector<Label> labels_from(const std::string& pattern) {  // 'C' or 'O' per token
  std::vector<Label> out;
  for (char c : pattern) out.push_back(c == 'C' ? Label::CARD : Label::O);
  return out;
}

// Cue-word dataset: CARD whenever the number sits in a "have <NUM> child"
// frame, O in the "win <NUM> game" frame.
std::vector<TrainExample> separable_dataset(int n_each) {
  std::vector<TrainExample> data;
  static const std::vector<std::string> names = {"kim", "lee", "ada", "max", "ana", "joe"};
  for (int i = 0; i < n_each; ++i) {
    const std::string& name = names[static_cast<std::size_t>(i) % names.size()];
    data.push_back({seq_from({name, "have", kNumPlaceholder, "child", "."}, {0, 0, 1, 0, 0},
                             {0, 0, 1, 0, 0}),
                    labels_from("OOCOO")});
    data.push_back({seq_from({name, "win", kNumPlaceholder, "game", "."}, {0, 0, 1, 0, 0},
                             {0, 0, 1, 0, 0}),
                    labels_from("OOOOO")});
  }
  return data;
}

}  // namespace

TEST_CASE("extract_features applies the v1 template set") {
  const auto seq = seq_from({"he", "have", kNumPlaceholder, "child", "."}, {0, 0, 1, 0, 0},
                            {0, 0, 1, 0, 0});
  const auto feats = extract_features(seq, 2);
  const std::vector<std::string> expected = {
      "U0=he",      "U1=have",          "U2=<NUM>",         "U3=child",
      "U4=.",       "B1=have|<NUM>",    "B2=<NUM>|child",   "T1=he|have|<NUM>",
      "T2=have|<NUM>|child", "T3=<NUM>|child|.", "CAND=1",  "NUMMOD=1"};
  CHECK(feats == expected);
  CHECK(extract_features(seq, 2) == feats);  // deterministic
}

TEST_CASE("extract_features pads with boundary symbols") {
  const auto seq = seq_from({"solo"});
  const auto feats = extract_features(seq, 0);
  CHECK(feats[0] == "U0=<BOS>");
  CHECK(feats[1] == "U1=<BOS>");
  CHECK(feats[2] == "U2=solo");
  CHECK(feats[3] == "U3=<EOS>");
  CHECK(feats[4] == "U4=<EOS>");
  CHECK(feats[5] == "B1=<BOS>|solo");
  CHECK(feats[6] == "B2=solo|<EOS>");
  CHECK_THROWS_AS(extract_features(seq, 1), std::out_of_range);
}

TEST_CASE("zero-weight model yields uniform marginals") {
  CrfModel model;
  const auto seq = seq_from({"a", "b", "c", "d"});
  const Posterior post = forward_backward(model, seq);
  CHECK(post.log_partition == doctest::Approx(4 * std::log(2.0)).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(post.marginals(i, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(post.marginals(i, 1) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("forward_backward handles the empty sequence") {
  CrfModel model;
  const Posterior post = forward_backward(model, FeatureSequence{});
  CHECK(post.log_partition == 0.0);
  CHECK(post.marginals.rows() == 0);
  const ViterbiResult vit = viterbi(model, FeatureSequence{});
  CHECK(vit.labels.empty());
  CHECK(vit.score == 0.0);
}

TEST_CASE("forward_backward matches brute-force enumeration") {
  std::mt19937 gen(101);
  for (int trial = 0; trial < 40; ++trial) {
    const auto seq = oracle::random_sequence(gen);
    const CrfModel model = oracle::random_model(gen, {seq});
    const Posterior post = forward_backward(model, seq);
    const auto truth = oracle::enumerate_labelings(model, seq);

    CHECK(std::abs(post.log_partition - truth.log_partition) < 1e-9);
    CHECK(std::abs(post.log_partition_backward - truth.log_partition) < 1e-9);
    for (Eigen::Index i = 0; i < post.marginals.rows(); ++i) {
      for (int y = 0; y < 2; ++y) {
        CHECK(std::abs(post.marginals(i, y) - truth.marginals(i, y)) < 1e-9);
      }
      CHECK(std::abs(post.marginals(i, 0) + post.marginals(i, 1) - 1.0) < 1e-9);
    }
    for (Eigen::Index i = 0; i + 1 < post.marginals.rows(); ++i) {
      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(post.edge_marginals(i, k) - truth.edge_marginals(i, k)) < 1e-9);
      }
    }
    // log-sum-exp dominance over any single labeling
    CHECK(post.log_partition >= truth.best_score - 1e-12);
  }
}

TEST_CASE("viterbi matches exhaustive argmax") {
  std::mt19937 gen(202);
  for (int trial = 0; trial < 40; ++trial) {
    const auto seq = oracle::random_sequence(gen);
    const CrfModel model = oracle::random_model(gen, {seq});
    const ViterbiResult vit = viterbi(model, seq);
    const auto truth = oracle::enumerate_labelings(model, seq);
    CHECK(std::abs(vit.score - truth.best_score) < 1e-9);
    CHECK(vit.labels == truth.best_labels);

    // reported score is consistent with the path's own potentials
    const Eigen::MatrixX2d psi = log_potentials(model, seq);
    double rescore = 0.0;
    for (std::size_t i = 0; i < vit.labels.size(); ++i) {
      rescore += psi(static_cast<Eigen::Index>(i), static_cast<int>(vit.labels[i]));
      if (i + 1 < vit.labels.size()) {
        rescore +=
            model.transition(static_cast<int>(vit.labels[i]), static_cast<int>(vit.labels[i + 1]));
      }
    }
    CHECK(vit.score == doctest::Approx(rescore).epsilon(1e-12));
  }
}

TEST_CASE("viterbi breaks ties toward O") {
  CrfModel model;  // all weights zero: every labeling ties
  const auto seq = seq_from({kNumPlaceholder, "x", kNumPlaceholder}, {1, 0, 1});
  const ViterbiResult vit = viterbi(model, seq);
  CHECK(vit.labels == labels_from("OOO"));
  CHECK(vit.score == 0.0);
}

TEST_CASE("objective at zero weights is -sum(len log 2)") {
  const auto data = separable_dataset(3);
  CrfModel model;  // empty vocabulary, zero weights
  std::size_t total_len = 0;
  for (const auto& ex : data) total_len += ex.x.size();
  const double objective = log_likelihood_and_gradient(model, data);
  CHECK(objective ==
        doctest::Approx(-static_cast<double>(total_len) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937 gen(303);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<FeatureSequence> seqs;
    std::vector<TrainExample> data;
    for (int k = 0; k < 4; ++k) {
      auto seq = oracle::random_sequence(gen, 5);
      std::vector<Label> y;
      std::bernoulli_distribution card(0.5);
      for (std::size_t i = 0; i < seq.size(); ++i) {
        y.push_back(seq.candidate[i] && card(gen) ? Label::CARD : Label::O);
      }
      seqs.push_back(seq);
      data.push_back({std::move(seq), std::move(y)});
    }
    CrfModel model = oracle::random_model(gen, seqs);
    model.sigma = 2.0;
    Eigen::VectorXd params = model_params(model);
    for (Eigen::Index i = 0; i < params.size(); ++i) params[i] += noise(gen) * 0.1;
    set_model_params(model, params);

    Eigen::VectorXd grad;
    log_likelihood_and_gradient(model, data, &grad);

    const double h = 1e-5;
    Eigen::VectorXd fd(params.size());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      CrfModel plus = model, minus = model;
      Eigen::VectorXd p = params;
      p[i] = params[i] + h;
      set_model_params(plus, p);
      p[i] = params[i] - h;
      set_model_params(minus, p);
      fd[i] = (log_likelihood_and_gradient(plus, data) - log_likelihood_and_gradient(minus, data)) /
              (2 * h);
    }
    const double rel = (grad - fd).norm() / std::max(1e-12, fd.norm());
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("training rejects bad datasets") {
  CHECK_THROWS_AS(train({}, {}), DataError);

  // no CARD anywhere
  std::vector<TrainExample> all_o = {{seq_from({"a", "b"}), labels_from("OO")}};
  CHECK_THROWS_WITH_AS(train(all_o, {}), doctest::Contains("CARD"), DataError);

  // CARD on a non-candidate position violates the supervision contract
  std::vector<TrainExample> bad = {{seq_from({"a", "b"}), labels_from("CO")}};
  CHECK_THROWS_AS(train(bad, {}), DataError);
  CrfModel model;
  CHECK_THROWS_AS(log_likelihood_and_gradient(model, bad), DataError);

  std::vector<TrainExample> mismatched = {{seq_from({"a", "b"}), labels_from("O")}};
  CHECK_THROWS_AS(train(mismatched, {}), DataError);
}

TEST_CASE("training ascends and separates a cue-word dataset") {
  const auto data = separable_dataset(10);
  std::vector<double> history;
  const CrfModel model = train(data, {}, &history);

  REQUIRE(history.size() >= 2);
  for (std::size_t i = 1; i < history.size(); ++i) {
    CHECK(history[i] >= history[i - 1] - 1e-9);  // accepted steps never decrease the objective
  }

  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& ex : data) {
    const ViterbiResult vit = viterbi(model, ex.x);
    for (std::size_t i = 0; i < ex.y.size(); ++i) {
      const bool gold = ex.y[i] == Label::CARD;
      const bool got = vit.labels[i] == Label::CARD;
      tp += gold && got;
      fp += !gold && got;
      fn += gold && !got;
    }
  }
  const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  CHECK(f1 >= 0.95);
}

TEST_CASE("min_feature_count prunes rare features") {
  auto data = separable_dataset(4);
  TrainConfig config;
  config.min_feature_count = 3;
  const CrfModel pruned = train(data, config);
  const CrfModel full = train(data, {});
  CHECK(pruned.num_features() < full.num_features());
  CHECK(pruned.num_features() > 0);
}

TEST_CASE("model save/load round trip is bit-exact") {
  const auto data = separable_dataset(5);
  TrainConfig config;
  config.max_iterations = 30;
  const CrfModel model = train(data, config);

  TempDir tmp;
  const std::string path = tmp.file("model.crf");
  save_model(model, path);
  const CrfModel loaded = load_model(path);

  REQUIRE(loaded.num_features() == model.num_features());
  CHECK(loaded.feature_names == model.feature_names);
  CHECK(loaded.sigma == model.sigma);
  for (int f = 0; f < model.num_features(); ++f) {
    CHECK(loaded.state_weights(f, 0) == model.state_weights(f, 0));
    CHECK(loaded.state_weights(f, 1) == model.state_weights(f, 1));
  }
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) CHECK(loaded.transition(y, y2) == model.transition(y, y2));
  }

  // inference through the loaded model reproduces marginals bit-exactly
  const auto seq = data[0].x;
  const Posterior a = forward_backward(model, seq);
  const Posterior b = forward_backward(loaded, seq);
  CHECK(a.log_partition == b.log_partition);
  for (Eigen::Index i = 0; i < a.marginals.rows(); ++i) {
    CHECK(a.marginals(i, 0) == b.marginals(i, 0));
    CHECK(a.marginals(i, 1) == b.marginals(i, 1));
  }

  // saving the loaded model reproduces the file byte for byte
  const std::string path2 = tmp.file("model2.crf");
  save_model(loaded, path2);
  CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("load_model rejects other format versions") {
  TempDir tmp;
  const std::string path = tmp.file("old.crf");
  testutil::write_file(path, "cardex-crf v0\nsigma 1\nlabels CARD O\n");
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("cardex-crf v1"), DataError);
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("cardex-crf v0"), DataError);
  CHECK_THROWS_AS(load_model(tmp.file("missing.crf")), DataError);
}

TEST_CASE("training is deterministic") {
  const auto data = separable_dataset(6);
  TrainConfig config;
  config.max_iterations = 40;
  const CrfModel a = train(data, config);
  const CrfModel b = train(data, config);
  REQUIRE(a.num_features() == b.num_features());
  for (int f = 0; f < a.num_features(); ++f) {
    CHECK(a.state_weights(f, 0) == b.state_weights(f, 0));
    CHECK(a.state_weights(f, 1) == b.state_weights(f, 1));
  }
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) CHECK(a.transition(y, y2) == b.transition(y, y2));
  }
}
