#include "cardex/crf.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "cardex/errors.hpp"
#include "cardex/numeric.hpp"

namespace cardex {

namespace {

constexpr int kCard = static_cast<int>(Label::CARD);
constexpr int kO = static_cast<int>(Label::O);

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const std::string& lemma_at(const FeatureSequence& seq, std::ptrdiff_t i) {
  static const std::string bos = kBosSymbol;
  static const std::string eos = kEosSymbol;
  if (i < 0) return bos;
  if (i >= static_cast<std::ptrdiff_t>(seq.size())) return eos;
  return seq.lemmas[static_cast<std::size_t>(i)];
}

}  // namespace

FeatureSequence make_feature_sequence(const Sentence& sentence, const NumTagRuleSet& rules) {
  FeatureSequence seq;
  const std::size_t n = sentence.tokens.size();
  seq.lemmas.reserve(n);
  seq.candidate.reserve(n);
  seq.nummod.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Token& tok = sentence.tokens[i];
    seq.lemmas.push_back(tok.num_tag != NumTag::NONE ? kNumPlaceholder : tok.lemma);
    const bool cand = is_candidate(tok);
    seq.candidate.push_back(cand ? 1 : 0);
    seq.nummod.push_back(cand && is_nummod(sentence, i, rules) ? 1 : 0);
  }
  return seq;
}

std::vector<std::string> extract_features(const FeatureSequence& seq, std::size_t index) {
  if (index >= seq.size()) {
    throw std::out_of_range("extract_features: index " + std::to_string(index) +
                            " out of range for sequence of " + std::to_string(seq.size()) +
                            " tokens");
  }
  const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(index);
  const std::string& m2 = lemma_at(seq, i - 2);
  const std::string& m1 = lemma_at(seq, i - 1);
  const std::string& c0 = lemma_at(seq, i);
  const std::string& p1 = lemma_at(seq, i + 1);
  const std::string& p2 = lemma_at(seq, i + 2);

  std::vector<std::string> features;
  features.reserve(12);
  features.push_back("U0=" + m2);
  features.push_back("U1=" + m1);
  features.push_back("U2=" + c0);
  features.push_back("U3=" + p1);
  features.push_back("U4=" + p2);
  features.push_back("B1=" + m1 + "|" + c0);
  features.push_back("B2=" + c0 + "|" + p1);
  features.push_back("T1=" + m2 + "|" + m1 + "|" + c0);
  features.push_back("T2=" + m1 + "|" + c0 + "|" + p1);
  features.push_back("T3=" + c0 + "|" + p1 + "|" + p2);
  if (seq.candidate[index]) features.push_back("CAND=1");
  if (seq.nummod[index]) features.push_back("NUMMOD=1");
  return features;
}

std::vector<std::string> extract_features(const Sentence& sentence, std::size_t index,
                                          const NumTagRuleSet& rules) {
  return extract_features(make_feature_sequence(sentence, rules), index);
}

int CrfModel::feature_id(const std::string& name) const {
  auto it = feature_index.find(name);
  return it == feature_index.end() ? -1 : it->second;
}

int CrfModel::add_feature(const std::string& name) {
  auto it = feature_index.find(name);
  if (it != feature_index.end()) return it->second;
  const int id = num_features();
  feature_index.emplace(name, id);
  feature_names.push_back(name);
  return id;
}

Eigen::MatrixX2d log_potentials(const CrfModel& model, const FeatureSequence& seq) {
  const std::size_t n = seq.size();
  Eigen::MatrixX2d psi = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (const std::string& f : extract_features(seq, i)) {
      const int id = model.feature_id(f);
      if (id >= 0) psi.row(static_cast<Eigen::Index>(i)) += model.state_weights.row(id);
    }
  }
  return psi;
}

namespace {

// Shared log-space DP over precomputed potentials.
Posterior posterior_from_potentials(const Eigen::MatrixX2d& psi, const Eigen::Matrix2d& trans) {
  Posterior post;
  const Eigen::Index n = psi.rows();
  post.marginals.resize(n, 2);
  post.edge_marginals.resize(std::max<Eigen::Index>(n - 1, 0), 4);
  if (n == 0) {
    post.log_partition = 0.0;
    post.log_partition_backward = 0.0;
    return post;
  }

  Eigen::MatrixX2d alpha(n, 2), beta(n, 2);
  alpha.row(0) = psi.row(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (int y = 0; y < 2; ++y) {
      alpha(i, y) = psi(i, y) + numeric::log_sum_exp(alpha(i - 1, 0) + trans(0, y),
                                                     alpha(i - 1, 1) + trans(1, y));
    }
  }
  post.log_partition = numeric::log_sum_exp(alpha(n - 1, 0), alpha(n - 1, 1));

  beta.row(n - 1).setZero();
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    for (int y = 0; y < 2; ++y) {
      beta(i, y) = numeric::log_sum_exp(trans(y, 0) + psi(i + 1, 0) + beta(i + 1, 0),
                                        trans(y, 1) + psi(i + 1, 1) + beta(i + 1, 1));
    }
  }
  post.log_partition_backward = numeric::log_sum_exp(psi(0, 0) + beta(0, 0),
                                                     psi(0, 1) + beta(0, 1));

  for (Eigen::Index i = 0; i < n; ++i) {
    for (int y = 0; y < 2; ++y) {
      post.marginals(i, y) = std::exp(alpha(i, y) + beta(i, y) - post.log_partition);
    }
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (int y = 0; y < 2; ++y) {
      for (int y2 = 0; y2 < 2; ++y2) {
        post.edge_marginals(i, y * 2 + y2) =
            std::exp(alpha(i, y) + trans(y, y2) + psi(i + 1, y2) + beta(i + 1, y2) -
                     post.log_partition);
      }
    }
  }
  return post;
}

ViterbiResult viterbi_from_potentials(const Eigen::MatrixX2d& psi, const Eigen::Matrix2d& trans) {
  ViterbiResult result;
  const Eigen::Index n = psi.rows();
  if (n == 0) return result;

  Eigen::MatrixX2d delta(n, 2);
  Eigen::Matrix<int, Eigen::Dynamic, 2> back(n, 2);
  delta.row(0) = psi.row(0);
  back.row(0).setConstant(kO);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (int y = 0; y < 2; ++y) {
      const double from_o = delta(i - 1, kO) + trans(kO, y);
      const double from_card = delta(i - 1, kCard) + trans(kCard, y);
      // ties resolve toward O
      const int from = from_card > from_o ? kCard : kO;
      delta(i, y) = psi(i, y) + std::max(from_o, from_card);
      back(i, y) = from;
    }
  }
  int best = delta(n - 1, kCard) > delta(n - 1, kO) ? kCard : kO;
  result.score = delta(n - 1, best);
  result.labels.assign(static_cast<std::size_t>(n), Label::O);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    result.labels[static_cast<std::size_t>(i)] = static_cast<Label>(best);
    if (i > 0) best = back(i, best);
  }
  return result;
}

}  // namespace

Posterior forward_backward(const CrfModel& model, const FeatureSequence& seq) {
  return posterior_from_potentials(log_potentials(model, seq), model.transition);
}

Posterior forward_backward(const CrfModel& model, const Sentence& sentence,
                           const NumTagRuleSet& rules) {
  return forward_backward(model, make_feature_sequence(sentence, rules));
}

ViterbiResult viterbi(const CrfModel& model, const FeatureSequence& seq) {
  return viterbi_from_potentials(log_potentials(model, seq), model.transition);
}

ViterbiResult viterbi(const CrfModel& model, const Sentence& sentence,
                      const NumTagRuleSet& rules) {
  return viterbi(model, make_feature_sequence(sentence, rules));
}

Eigen::VectorXd model_params(const CrfModel& model) {
  const int f = model.num_features();
  Eigen::VectorXd params(2 * f + 4);
  for (int i = 0; i < f; ++i) {
    params[2 * i + 0] = model.state_weights(i, 0);
    params[2 * i + 1] = model.state_weights(i, 1);
  }
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) params[2 * f + y * 2 + y2] = model.transition(y, y2);
  }
  return params;
}

void set_model_params(CrfModel& model, const Eigen::VectorXd& params) {
  const int f = model.num_features();
  if (params.size() != 2 * f + 4) {
    throw std::invalid_argument("set_model_params: parameter vector has size " +
                                std::to_string(params.size()) + ", expected " +
                                std::to_string(2 * f + 4));
  }
  model.state_weights.resize(f, 2);
  for (int i = 0; i < f; ++i) {
    model.state_weights(i, 0) = params[2 * i + 0];
    model.state_weights(i, 1) = params[2 * i + 1];
  }
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) model.transition(y, y2) = params[2 * f + y * 2 + y2];
  }
}

namespace {

struct IndexedExample {
  std::vector<std::vector<int>> feats;  // active model feature ids per position
  std::vector<Label> labels;
};

void validate_example(const TrainExample& ex, std::size_t ordinal) {
  if (ex.y.size() != ex.x.size() || ex.x.candidate.size() != ex.x.size() ||
      ex.x.nummod.size() != ex.x.size()) {
    throw DataError("training sequence " + std::to_string(ordinal) +
                    ": label/flag arrays do not match token count");
  }
  for (std::size_t i = 0; i < ex.y.size(); ++i) {
    if (ex.y[i] == Label::CARD && !ex.x.candidate[i]) {
      throw DataError("training sequence " + std::to_string(ordinal) + ": CARD label at position " +
                      std::to_string(i) + " is not a candidate number");
    }
  }
}

Eigen::MatrixX2d potentials_from_params(const IndexedExample& ex, const Eigen::VectorXd& params) {
  const Eigen::Index n = static_cast<Eigen::Index>(ex.feats.size());
  Eigen::MatrixX2d psi = Eigen::MatrixX2d::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int f : ex.feats[static_cast<std::size_t>(i)]) {
      psi(i, 0) += params[2 * f + 0];
      psi(i, 1) += params[2 * f + 1];
    }
  }
  return psi;
}

// Objective (to maximize) and its gradient in the model_params layout.
double objective_and_gradient(const std::vector<IndexedExample>& dataset,
                              const Eigen::VectorXd& params, int num_features, double sigma,
                              Eigen::VectorXd* grad) {
  const int trans_off = 2 * num_features;
  Eigen::Matrix2d trans;
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) trans(y, y2) = params[trans_off + y * 2 + y2];
  }
  if (grad) grad->setZero(params.size());

  double objective = 0.0;
  for (const IndexedExample& ex : dataset) {
    const std::size_t n = ex.feats.size();
    if (n == 0) continue;
    const Eigen::MatrixX2d psi = potentials_from_params(ex, params);
    const Posterior post = posterior_from_potentials(psi, trans);

    double gold = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gold += psi(static_cast<Eigen::Index>(i), static_cast<int>(ex.labels[i]));
      if (i + 1 < n) gold += trans(static_cast<int>(ex.labels[i]), static_cast<int>(ex.labels[i + 1]));
    }
    objective += gold - post.log_partition;

    if (!grad) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const int yi = static_cast<int>(ex.labels[i]);
      const Eigen::Index row = static_cast<Eigen::Index>(i);
      for (int f : ex.feats[i]) {
        (*grad)[2 * f + yi] += 1.0;
        (*grad)[2 * f + 0] -= post.marginals(row, 0);
        (*grad)[2 * f + 1] -= post.marginals(row, 1);
      }
      if (i + 1 < n) {
        const int yn = static_cast<int>(ex.labels[i + 1]);
        (*grad)[trans_off + yi * 2 + yn] += 1.0;
        for (int k = 0; k < 4; ++k) (*grad)[trans_off + k] -= post.edge_marginals(row, k);
      }
    }
  }

  objective -= params.squaredNorm() / (2.0 * sigma * sigma);
  if (grad) *grad -= params / (sigma * sigma);
  return objective;
}

}  // namespace

double log_likelihood_and_gradient(const CrfModel& model, const std::vector<TrainExample>& dataset,
                                   Eigen::VectorXd* gradient) {
  std::vector<IndexedExample> indexed;
  indexed.reserve(dataset.size());
  for (std::size_t d = 0; d < dataset.size(); ++d) {
    validate_example(dataset[d], d);
    IndexedExample ex;
    ex.labels = dataset[d].y;
    ex.feats.resize(dataset[d].x.size());
    for (std::size_t i = 0; i < dataset[d].x.size(); ++i) {
      for (const std::string& f : extract_features(dataset[d].x, i)) {
        const int id = model.feature_id(f);
        if (id >= 0) ex.feats[i].push_back(id);
      }
    }
    indexed.push_back(std::move(ex));
  }
  return objective_and_gradient(indexed, model_params(model), model.num_features(), model.sigma,
                                gradient);
}

CrfModel train(const std::vector<TrainExample>& dataset, const TrainConfig& config,
               std::vector<double>* objective_history) {
  if (dataset.empty()) throw DataError("training set is empty");
  if (config.l2_sigma <= 0 || config.max_iterations <= 0 || config.convergence_tol <= 0 ||
      config.min_feature_count <= 0) {
    throw DataError("train config values must be positive");
  }

  bool any_card = false;
  for (std::size_t d = 0; d < dataset.size(); ++d) {
    validate_example(dataset[d], d);
    for (Label l : dataset[d].y) any_card = any_card || l == Label::CARD;
  }
  if (!any_card) {
    throw DataError(
        "training set has no CARD labels; a model trained on it would never extract anything");
  }

  // Feature census in first-seen order, then prune rare features.
  CrfModel model;
  model.sigma = config.l2_sigma;
  {
    std::unordered_map<std::string, int> counts;
    std::vector<std::string> order;
    for (const TrainExample& ex : dataset) {
      for (std::size_t i = 0; i < ex.x.size(); ++i) {
        for (std::string& f : extract_features(ex.x, i)) {
          if (++counts[f] == 1) order.push_back(std::move(f));
        }
      }
    }
    for (const std::string& f : order) {
      if (counts[f] >= config.min_feature_count) model.add_feature(f);
    }
  }
  const int num_features = model.num_features();

  std::vector<IndexedExample> indexed;
  indexed.reserve(dataset.size());
  for (const TrainExample& ex : dataset) {
    IndexedExample ie;
    ie.labels = ex.y;
    ie.feats.resize(ex.x.size());
    for (std::size_t i = 0; i < ex.x.size(); ++i) {
      for (const std::string& f : extract_features(ex.x, i)) {
        const int id = model.feature_id(f);
        if (id >= 0) ie.feats[i].push_back(id);
      }
    }
    indexed.push_back(std::move(ie));
  }

  // L-BFGS in minimization form: h(theta) = -objective(theta).
  const int history_size = 10;
  const double c1 = 1e-4;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * num_features + 4);
  Eigen::VectorXd grad_h(theta.size());
  auto eval = [&](const Eigen::VectorXd& point, Eigen::VectorXd* grad) {
    double obj = objective_and_gradient(indexed, point, num_features, config.l2_sigma, grad);
    if (grad) *grad = -*grad;
    return -obj;
  };

  double h = eval(theta, &grad_h);
  if (objective_history) objective_history->push_back(-h);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    // two-loop recursion
    Eigen::VectorXd q = grad_h;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alphas[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alphas[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alphas[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd direction = -q;
    double slope = grad_h.dot(direction);
    if (slope > -1e-14) {
      direction = -grad_h;
      slope = -grad_h.squaredNorm();
      if (slope > -1e-20) break;  // gradient numerically zero
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(1.0, grad_h.norm())) : 1.0;
    Eigen::VectorXd theta_new, grad_new(theta.size());
    double h_new = h;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      theta_new = theta + step * direction;
      h_new = eval(theta_new, &grad_new);
      if (h_new <= h + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Eigen::VectorXd s_k = theta_new - theta;
    Eigen::VectorXd y_k = grad_new - grad_h;
    const double sy = s_k.dot(y_k);
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s_k));
      y_hist.push_back(std::move(y_k));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > history_size) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double rel_change = std::abs(h_new - h) / (std::abs(h_new) + 1e-12);
    theta = std::move(theta_new);
    grad_h = std::move(grad_new);
    h = h_new;
    if (objective_history) objective_history->push_back(-h);
    if (rel_change < config.convergence_tol) break;
  }

  set_model_params(model, theta);
  return model;
}

void save_model(const CrfModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << kModelHeader << '\n';
  out << "sigma " << fmt17(model.sigma) << '\n';
  out << "labels CARD O\n";
  static const char* names[2] = {"CARD", "O"};
  for (int y = 0; y < 2; ++y) {
    for (int y2 = 0; y2 < 2; ++y2) {
      out << names[y] << ' ' << names[y2] << ' ' << fmt17(model.transition(y, y2)) << '\n';
    }
  }
  for (int f = 0; f < model.num_features(); ++f) {
    out << model.feature_names[f] << '\t' << fmt17(model.state_weights(f, 0)) << '\t'
        << fmt17(model.state_weights(f, 1)) << '\n';
  }
  if (!out) throw DataError("failed writing model file: " + path);
}

namespace {

double parse_weight(const std::string& raw, const std::string& path, std::size_t lineno) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(lineno) + ": bad weight \"" + raw + "\"");
  }
  if (pos != raw.size() || !std::isfinite(value)) {
    throw DataError(path + ":" + std::to_string(lineno) + ": bad weight \"" + raw + "\"");
  }
  return value;
}

int label_index(const std::string& name, const std::string& path, std::size_t lineno) {
  auto label = label_from_string(name);
  if (!label) {
    throw DataError(path + ":" + std::to_string(lineno) + ": unknown label \"" + name + "\"");
  }
  return static_cast<int>(*label);
}

}  // namespace

CrfModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw DataError(path + ": truncated model file");
    }
    ++lineno;
  };

  next_line();
  if (line != kModelHeader) {
    throw DataError(path + ": unsupported model format: expected \"" + kModelHeader +
                    "\", found \"" + line + "\"");
  }

  CrfModel model;
  next_line();
  {
    std::istringstream ss(line);
    std::string key, value;
    if (!(ss >> key >> value) || key != "sigma") {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected sigma line");
    }
    model.sigma = parse_weight(value, path, lineno);
  }
  next_line();
  if (line != "labels CARD O") {
    throw DataError(path + ":" + std::to_string(lineno) + ": expected \"labels CARD O\"");
  }
  for (int k = 0; k < 4; ++k) {
    next_line();
    std::istringstream ss(line);
    std::string from, to, weight;
    if (!(ss >> from >> to >> weight)) {
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed transition line");
    }
    model.transition(label_index(from, path, lineno), label_index(to, path, lineno)) =
        parse_weight(weight, path, lineno);
  }

  std::vector<std::pair<double, double>> weights;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected feature<TAB>weight<TAB>weight");
    }
    const std::string name = line.substr(0, t1);
    if (model.feature_index.count(name) > 0) {
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate feature \"" + name + "\"");
    }
    model.add_feature(name);
    weights.emplace_back(parse_weight(line.substr(t1 + 1, t2 - t1 - 1), path, lineno),
                         parse_weight(line.substr(t2 + 1), path, lineno));
  }
  model.state_weights.resize(static_cast<Eigen::Index>(weights.size()), 2);
  for (std::size_t f = 0; f < weights.size(); ++f) {
    model.state_weights(static_cast<Eigen::Index>(f), 0) = weights[f].first;
    model.state_weights(static_cast<Eigen::Index>(f), 1) = weights[f].second;
  }
  return model;
}

}  // namespace cardex
