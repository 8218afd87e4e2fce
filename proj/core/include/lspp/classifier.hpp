#ifndef LSPP_CLASSIFIER_HPP_
#define LSPP_CLASSIFIER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lspp/datagen.hpp"
#include "lspp/nn.hpp"
#include "lspp/types.hpp"
#include "lspp/vae.hpp"

namespace lspp {

/// Latent-space obstacle collision predictor p(z, o). Input is the raw
/// 7-dim latent concatenated with the 4 standardized obstacle parameters;
/// single output logit.
class CollisionClassifier {
 public:
  static constexpr int kInputDim = kLatentDim + 4;
  static constexpr double kProbClamp = 1e-7;

  CollisionClassifier() = default;
  CollisionClassifier(int hidden_layers, int hidden_units, const Standardizer& obstacle_standardizer,
                      Rng& rng);
  CollisionClassifier(DenseNet net, Standardizer obstacle_standardizer);

  double predict_logit(const LatentVector& z, const Obstacle& o) const;
  /// sigmoid(logit) clamped to [1e-7, 1 - 1e-7].
  double predict_collision_prob(const LatentVector& z, const Obstacle& o) const;

  struct LogitCache {
    double logit = 0.0;
    DenseNet::ForwardCache cache;
  };
  LogitCache logit_with_cache(const LatentVector& z, const Obstacle& o) const;
  /// Gradient of (d_logit * logit) w.r.t. z.
  LatentVector logit_backward(const LogitCache& lc, double d_logit) const;

  const DenseNet& net() const { return net_; }
  DenseNet& mutable_net() { return net_; }
  const Standardizer& obstacle_standardizer() const { return obstacle_std_; }

  VectorXd stacked_input(const LatentVector& z, const Obstacle& o) const;

 private:
  DenseNet net_;
  Standardizer obstacle_std_;
};

double sigmoid(double x);
/// Numerically stable BCE on the logit: max(l,0) - l*y + log(1 + exp(-|l|)).
double bce_with_logit(double logit, double label);

struct ClassifierTrainConfig {
  int epochs = 200;
  int batch_size = 256;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  /// Encode the state to a posterior sample per presentation (fresh noise
  /// every epoch, acts as augmentation). When false, uses the posterior mean.
  bool use_posterior_sample = true;
  int hidden_layers = 4;
  int hidden_units = 256;
};

struct ClassifierEpochMetrics {
  int epoch = 0;
  double loss = 0.0;
};

struct ClassifierTrainResult {
  std::vector<ClassifierEpochMetrics> epochs;
};

using ClassifierEpochCallback = std::function<void(const ClassifierEpochMetrics&)>;

/// BCE training against geometric labels; the VAE stays frozen and is only
/// used to encode the states. Warns (via metrics, not an error) on unbalanced
/// data.
CollisionClassifier train_classifier(const VaeModel& frozen_vae,
                                     const std::vector<LabeledCollisionSample>& dataset,
                                     const ClassifierTrainConfig& cfg,
                                     ClassifierTrainResult* result = nullptr,
                                     const ClassifierEpochCallback& on_epoch = {});

struct ClassifierEvalReport {
  int n = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<double> calibration_bin_confidence;  // mean predicted prob per bin
  std::vector<double> calibration_bin_accuracy;    // empirical collision rate per bin
  std::vector<int> calibration_bin_count;
};

/// Deterministic evaluation using posterior means.
ClassifierEvalReport evaluate_classifier(const CollisionClassifier& c, const VaeModel& vae,
                                         const std::vector<LabeledCollisionSample>& dataset,
                                         int calibration_bins = 10);

void write_classifier_report_csv(const ClassifierEvalReport& r, const std::string& path);

void save_classifier(const CollisionClassifier& c, const ClassifierTrainConfig& cfg,
                     const std::string& vae_fingerprint, const std::string& path);
CollisionClassifier load_classifier(const std::string& path);

}  // namespace lspp

#endif  // LSPP_CLASSIFIER_HPP_
