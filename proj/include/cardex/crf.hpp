#ifndef CARDEX_CRF_HPP
#define CARDEX_CRF_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "cardex/corpus.hpp"
#include "cardex/label.hpp"
#include "cardex/numtag.hpp"

namespace cardex {

inline constexpr const char* kNumPlaceholder = "<NUM>";
inline constexpr const char* kBosSymbol = "<BOS>";
inline constexpr const char* kEosSymbol = "<EOS>";
inline constexpr const char* kModelHeader = "cardex-crf v1";

/// Observation view the CRF works on: lemma sequence with numeric surfaces
/// collapsed to <NUM>, plus the candidate/nummod indicator flags.
struct FeatureSequence {
  std::vector<std::string> lemmas;
  std::vector<std::uint8_t> candidate;
  std::vector<std::uint8_t> nummod;

  std::size_t size() const { return lemmas.size(); }

  bool operator==(const FeatureSequence&) const = default;
};

FeatureSequence make_feature_sequence(const Sentence& sentence,
                                      const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Template set (versioned "v1"): unigram lemmas at offsets -2..+2, bigrams
/// (-1,0) and (0,+1), trigrams (-2,-1,0), (-1,0,+1), (0,+1,+2), plus the
/// is_candidate / is_nummod indicators at the current position. Out-of-range
/// offsets read as <BOS>/<EOS>. Throws std::out_of_range for a bad index.
std::vector<std::string> extract_features(const FeatureSequence& seq, std::size_t index);
std::vector<std::string> extract_features(const Sentence& sentence, std::size_t index,
                                          const NumTagRuleSet& rules = NumTagRuleSet::defaults());

struct CrfModel {
  std::vector<std::string> feature_names;               // id -> feature string
  std::unordered_map<std::string, int> feature_index;   // feature string -> id
  Eigen::MatrixX2d state_weights;                       // [features x labels]; col 0 CARD, col 1 O
  Eigen::Matrix2d transition = Eigen::Matrix2d::Zero(); // [from x to]
  double sigma = 1.0;
  std::string template_version = "v1";

  CrfModel() : state_weights(0, 2) {}

  int num_features() const { return static_cast<int>(feature_names.size()); }
  int feature_id(const std::string& name) const;
  int add_feature(const std::string& name);
};

struct TrainConfig {
  double l2_sigma = 1.0;
  int max_iterations = 200;
  double convergence_tol = 1e-5;  // relative objective change
  int min_feature_count = 1;
};

struct TrainExample {
  FeatureSequence x;
  std::vector<Label> y;
};

/// Per-position state scores: psi(i, y) = sum of active feature weights for
/// label y. Features absent from the model vocabulary contribute 0.
Eigen::MatrixX2d log_potentials(const CrfModel& model, const FeatureSequence& seq);

struct Posterior {
  double log_partition = 0.0;
  double log_partition_backward = 0.0;
  Eigen::MatrixX2d marginals;       // [len x labels]
  Eigen::MatrixX4d edge_marginals;  // [len-1 x (from*2+to)]
};

/// Log-space forward-backward; marginal rows sum to 1 within fp error.
/// An empty sequence yields log_partition 0 and empty marginals.
Posterior forward_backward(const CrfModel& model, const FeatureSequence& seq);
Posterior forward_backward(const CrfModel& model, const Sentence& sentence,
                           const NumTagRuleSet& rules = NumTagRuleSet::defaults());

struct ViterbiResult {
  std::vector<Label> labels;
  double score = 0.0;
};

/// Argmax labeling; ties break toward O at every step.
ViterbiResult viterbi(const CrfModel& model, const FeatureSequence& seq);
ViterbiResult viterbi(const CrfModel& model, const Sentence& sentence,
                      const NumTagRuleSet& rules = NumTagRuleSet::defaults());

/// Parameter vector layout: state weights flattened feature-major
/// (feature * 2 + label), then the 4 transition weights (from * 2 + to).
Eigen::VectorXd model_params(const CrfModel& model);
void set_model_params(CrfModel& model, const Eigen::VectorXd& params);

/// L2-penalized conditional log-likelihood of the dataset under the model;
/// when `gradient` is non-null it receives d objective / d params in the
/// model_params layout. Throws DataError if a CARD label sits on a
/// non-candidate position.
double log_likelihood_and_gradient(const CrfModel& model,
                                   const std::vector<TrainExample>& dataset,
                                   Eigen::VectorXd* gradient = nullptr);

/// Batch maximum-likelihood training: deterministic L-BFGS ascent from zero
/// weights with Armijo backtracking, stopping at convergence_tol or
/// max_iterations. Features below min_feature_count are pruned before
/// training. `objective_history` (optional) records the objective after the
/// initial point and each accepted step.
CrfModel train(const std::vector<TrainExample>& dataset, const TrainConfig& config = {},
               std::vector<double>* objective_history = nullptr);

/// Text model format, header "cardex-crf v1"; weights are printed with 17
/// significant digits so a save/load round trip is bit-exact.
void save_model(const CrfModel& model, const std::string& path);
CrfModel load_model(const std::string& path);

}  // namespace cardex

#endif  // CARDEX_CRF_HPP
