#include "lspp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "lspp/checkpoint.hpp"

namespace lspp {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logit(double logit, double label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

namespace {

std::vector<int> classifier_sizes(int hidden_layers, int hidden_units) {
  std::vector<int> sizes{CollisionClassifier::kInputDim};
  sizes.insert(sizes.end(), hidden_layers, hidden_units);
  sizes.push_back(1);
  return sizes;
}

}  // namespace

CollisionClassifier::CollisionClassifier(int hidden_layers, int hidden_units,
                                         const Standardizer& obstacle_standardizer, Rng& rng)
    : net_(classifier_sizes(hidden_layers, hidden_units), rng), obstacle_std_(obstacle_standardizer) {
  if (obstacle_std_.dim() != 4)
    throw std::invalid_argument("CollisionClassifier: obstacle standardizer must have 4 dims");
}

CollisionClassifier::CollisionClassifier(DenseNet net, Standardizer obstacle_standardizer)
    : net_(std::move(net)), obstacle_std_(std::move(obstacle_standardizer)) {
  if (net_.input_dim() != kInputDim || net_.output_dim() != 1)
    throw std::invalid_argument("CollisionClassifier: net must map 11 inputs to 1 logit");
  if (obstacle_std_.dim() != 4)
    throw std::invalid_argument("CollisionClassifier: obstacle standardizer must have 4 dims");
}

VectorXd CollisionClassifier::stacked_input(const LatentVector& z, const Obstacle& o) const {
  VectorXd in(kInputDim);
  in.head<kLatentDim>() = z;
  in.tail<4>() = obstacle_std_.standardize(VectorXd(o.stacked()));
  return in;
}

double CollisionClassifier::predict_logit(const LatentVector& z, const Obstacle& o) const {
  return net_.forward(stacked_input(z, o))[0];
}

double CollisionClassifier::predict_collision_prob(const LatentVector& z, const Obstacle& o) const {
  return std::clamp(sigmoid(predict_logit(z, o)), kProbClamp, 1.0 - kProbClamp);
}

CollisionClassifier::LogitCache CollisionClassifier::logit_with_cache(const LatentVector& z,
                                                                      const Obstacle& o) const {
  LogitCache lc;
  lc.logit = net_.forward(VectorXd(stacked_input(z, o)), &lc.cache)[0];
  return lc;
}

LatentVector CollisionClassifier::logit_backward(const LogitCache& lc, double d_logit) const {
  MatrixXd d_out(1, 1);
  d_out(0, 0) = d_logit;
  const MatrixXd d_in = net_.backward(lc.cache, d_out);
  return d_in.col(0).head<kLatentDim>();
}

CollisionClassifier train_classifier(const VaeModel& frozen_vae,
                                     const std::vector<LabeledCollisionSample>& dataset,
                                     const ClassifierTrainConfig& cfg,
                                     ClassifierTrainResult* result,
                                     const ClassifierEpochCallback& on_epoch) {
  const int n = static_cast<int>(dataset.size());
  if (n < 2) throw std::invalid_argument("train_classifier: need at least 2 samples");

  int positives = 0;
  for (const auto& s : dataset) positives += s.label;
  if (2 * positives != n)
    std::fprintf(stderr, "train_classifier: warning: unbalanced labels (%d/%d positives)\n",
                 positives, n);

  MatrixXd states(kStateDim, n);
  MatrixXd obstacles(4, n);
  VectorXd labels(n);
  for (int i = 0; i < n; ++i) {
    states.col(i) = dataset[i].state.stacked();
    obstacles.col(i) = dataset[i].obstacle.stacked();
    labels[i] = dataset[i].label;
  }

  Rng rng(derive_stream_seed(cfg.seed, 0xc1a5));
  CollisionClassifier clf(cfg.hidden_layers, cfg.hidden_units, Standardizer::fit(obstacles), rng);

  // The VAE is frozen, so posterior parameters are fixed: encode once.
  const MatrixXd enc_out = frozen_vae.encoder().forward(frozen_vae.standardizer().standardize(states));
  const MatrixXd mu = enc_out.topRows(kLatentDim);
  const MatrixXd sigma = enc_out.bottomRows(kLatentDim).array().exp();
  const MatrixXd obs_std = clf.obstacle_standardizer().standardize(obstacles);

  AdamState adam = AdamState::zeros_like(clf.net());
  const AdamConfig adam_cfg{cfg.learning_rate};
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = rng.uniform_int(0, i);
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      MatrixXd input(CollisionClassifier::kInputDim, b);
      VectorXd y(b);
      for (int i = 0; i < b; ++i) {
        const int idx = order[start + i];
        Eigen::Matrix<double, kLatentDim, 1> z = mu.col(idx);
        if (cfg.use_posterior_sample)
          z += sigma.col(idx).cwiseProduct(rng.normal_vector(kLatentDim));
        input.col(i).head<kLatentDim>() = z;
        input.col(i).tail<4>() = obs_std.col(idx);
        y[i] = labels[idx];
      }
      DenseNet::ForwardCache cache;
      const MatrixXd logits = clf.net().forward(input, &cache);
      double loss = 0.0;
      MatrixXd d_logits(1, b);
      for (int i = 0; i < b; ++i) {
        loss += bce_with_logit(logits(0, i), y[i]);
        d_logits(0, i) = (sigmoid(logits(0, i)) - y[i]) / b;
      }
      loss /= b;
      if (!std::isfinite(loss))
        throw std::runtime_error("train_classifier: non-finite loss at epoch " +
                                 std::to_string(epoch));
      auto grads = clf.net().zero_gradients();
      clf.mutable_net().backward(cache, d_logits, &grads);
      adam_step(adam, adam_cfg, clf.mutable_net(), grads);
      epoch_loss += loss;
      ++batches;
    }
    ClassifierEpochMetrics em{epoch, epoch_loss / batches};
    if (result) result->epochs.push_back(em);
    if (on_epoch) on_epoch(em);
  }
  return clf;
}

ClassifierEvalReport evaluate_classifier(const CollisionClassifier& c, const VaeModel& vae,
                                         const std::vector<LabeledCollisionSample>& dataset,
                                         int calibration_bins) {
  ClassifierEvalReport r;
  r.n = static_cast<int>(dataset.size());
  if (r.n == 0) return r;
  r.calibration_bin_confidence.assign(calibration_bins, 0.0);
  r.calibration_bin_accuracy.assign(calibration_bins, 0.0);
  r.calibration_bin_count.assign(calibration_bins, 0);

  MatrixXd states(kStateDim, r.n);
  for (int i = 0; i < r.n; ++i) states.col(i) = dataset[i].state.stacked();
  const MatrixXd mu = vae.encode_mu_batch(states);

  int tp = 0, tn = 0, fp = 0, fn = 0;
  for (int i = 0; i < r.n; ++i) {
    const double p = c.predict_collision_prob(mu.col(i), dataset[i].obstacle);
    const bool predicted = p >= 0.5;
    const bool actual = dataset[i].label == 1;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
    if (!predicted && !actual) ++tn;
    int bin = std::min(static_cast<int>(p * calibration_bins), calibration_bins - 1);
    r.calibration_bin_confidence[bin] += p;
    r.calibration_bin_accuracy[bin] += actual ? 1.0 : 0.0;
    r.calibration_bin_count[bin] += 1;
  }
  for (int b = 0; b < calibration_bins; ++b) {
    if (r.calibration_bin_count[b] > 0) {
      r.calibration_bin_confidence[b] /= r.calibration_bin_count[b];
      r.calibration_bin_accuracy[b] /= r.calibration_bin_count[b];
    }
  }
  r.accuracy = static_cast<double>(tp + tn) / r.n;
  const double tpr = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double tnr = (tn + fp) > 0 ? static_cast<double>(tn) / (tn + fp) : 0.0;
  r.balanced_accuracy = 0.5 * (tpr + tnr);
  r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r.recall = tpr;
  return r;
}

void write_classifier_report_csv(const ClassifierEvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write classifier report: " + path);
  out << "metric,value\n";
  out << "n," << r.n << "\n";
  out << "accuracy," << r.accuracy << "\n";
  out << "balanced_accuracy," << r.balanced_accuracy << "\n";
  out << "precision," << r.precision << "\n";
  out << "recall," << r.recall << "\n";
  for (std::size_t b = 0; b < r.calibration_bin_count.size(); ++b) {
    out << "calibration_bin_" << b << "_confidence," << r.calibration_bin_confidence[b] << "\n";
    out << "calibration_bin_" << b << "_accuracy," << r.calibration_bin_accuracy[b] << "\n";
    out << "calibration_bin_" << b << "_count," << r.calibration_bin_count[b] << "\n";
  }
}

void save_classifier(const CollisionClassifier& c, const ClassifierTrainConfig& cfg,
                     const std::string& vae_fingerprint, const std::string& path) {
  Json j;
  j["version"] = 1;
  j["model_kind"] = "collision_classifier";
  j["seed"] = cfg.seed;
  j["architecture"] = {{"net", c.net().layer_sizes()}};
  j["standardizer"] = standardizer_to_json(c.obstacle_standardizer());
  j["training_config"] = {{"epochs", cfg.epochs},
                          {"batch_size", cfg.batch_size},
                          {"learning_rate", cfg.learning_rate},
                          {"use_posterior_sample", cfg.use_posterior_sample}};
  j["vae_fingerprint"] = vae_fingerprint;
  j["net"] = net_to_json(c.net());
  write_json_file(j, path);
}

CollisionClassifier load_classifier(const std::string& path) {
  const Json j = read_json_file(path);
  const auto header = checkpoint_header(j);
  if (header.model_kind != "collision_classifier")
    throw std::runtime_error("checkpoint is not a collision classifier: " + path);
  return CollisionClassifier(net_from_json(j.at("net")), standardizer_from_json(j.at("standardizer")));
}

}  // namespace lspp
