#ifndef LSPP_VAE_HPP_
#define LSPP_VAE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lspp/geco.hpp"
#include "lspp/nn.hpp"
#include "lspp/rng.hpp"
#include "lspp/types.hpp"

namespace lspp {

/// Diagonal Gaussian posterior. The encoder emits log sigma, so sigma > 0.
struct PosteriorParams {
  Vector7d mu;
  Vector7d sigma;
};

/// Closed form KL(N(mu, diag sigma^2) || N(0, I)).
double kl_divergence(const PosteriorParams& p);

struct VaeArchitecture {
  int hidden_layers = 4;
  int hidden_units = 256;

  std::vector<int> encoder_sizes() const;  // 10 -> ... -> 14
  std::vector<int> decoder_sizes() const;  // 7 -> ... -> 10
};

struct VaeTrainConfig {
  int epochs = 800;
  int batch_size = 256;
  double learning_rate = 1e-4;
  /// Final Adam step size; geometric decay across the run. Equal to
  /// learning_rate (the paper setting) means a constant rate.
  double learning_rate_final = -1.0;  // -1: same as learning_rate
  double tau = 0.0008;                // reconstruction target on the standardized L2 norm
  double geco_learning_rate = 0.005;
  double geco_alpha_ma = 0.95;
  double lambda_init = 1.0;
  std::uint64_t seed = 0;

  double resolved_final_rate() const {
    return learning_rate_final > 0.0 ? learning_rate_final : learning_rate;
  }
};

/// Generative model of x = (q, e) with an isotropic Gaussian prior on z.
class VaeModel {
 public:
  VaeModel() = default;
  VaeModel(const VaeArchitecture& arch, const Standardizer& standardizer, Rng& rng);
  VaeModel(DenseNet encoder, DenseNet decoder, Standardizer standardizer);

  PosteriorParams encode(const RobotState& x) const;
  static LatentVector reparameterise(const PosteriorParams& p, const Vector7d& noise);
  RobotState decode(const LatentVector& z) const;

  /// Decode with the cache needed for input gradients.
  struct DecodeCache {
    RobotState state;
    DenseNet::ForwardCache cache;
  };
  DecodeCache decode_with_cache(const LatentVector& z) const;
  /// Backpropagates a gradient w.r.t. the destandardised (q, e) output to z.
  LatentVector decode_backward(const DecodeCache& dc, const VectorXd& d_state) const;

  /// n prior samples decoded to states; z ~ N(0, I), deterministic per seed.
  std::vector<RobotState> sample_prior(int n, std::uint64_t seed) const;
  /// Same draws, also returning the latents (analysis hooks).
  std::vector<RobotState> sample_prior(int n, std::uint64_t seed,
                                       std::vector<LatentVector>* latents) const;

  const DenseNet& encoder() const { return encoder_; }
  const DenseNet& decoder() const { return decoder_; }
  const Standardizer& standardizer() const { return standardizer_; }
  DenseNet& mutable_encoder() { return encoder_; }
  DenseNet& mutable_decoder() { return decoder_; }

  /// Batched helpers used by training and bulk evaluation. Columns are samples.
  MatrixXd encode_mu_batch(const MatrixXd& states) const;  // 10 x n -> 7 x n
  MatrixXd decode_batch(const MatrixXd& latents) const;    // 7 x n -> 10 x n (destandardised)

 private:
  DenseNet encoder_;
  DenseNet decoder_;
  Standardizer standardizer_;
};

struct VaeStepMetrics {
  double loss = 0.0;
  double kl = 0.0;
  double reconstruction = 0.0;  // batch mean of per-sample standardized L2
  double lambda = 0.0;
  double c_ma = 0.0;
};

/// One GECO-constrained training stage: loss = KL + lambda * (recon - tau),
/// reconstruction measured as the per-sample L2 norm over the 10 standardized
/// dims, averaged over the batch. Owns the optimiser and GECO state.
class VaeTrainer {
 public:
  VaeTrainer(VaeModel& model, const VaeTrainConfig& cfg);

  /// batch: standardized states, 10 x B. Throws on non-finite loss.
  VaeStepMetrics geco_train_step(const MatrixXd& standardized_batch);

  const GecoMultiplier& geco_state() const { return geco_; }
  Rng& rng() { return rng_; }
  void set_learning_rate(double lr) { current_lr_ = lr; }

 private:
  VaeModel& model_;
  VaeTrainConfig cfg_;
  GecoMultiplier geco_;
  bool first_step_ = true;
  double current_lr_ = 0.0;
  AdamState adam_encoder_;
  AdamState adam_decoder_;
  DenseNet::Gradients enc_grads_;  // reused across steps
  DenseNet::Gradients dec_grads_;
  Rng rng_;
};

struct VaeEpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double kl = 0.0;
  double reconstruction = 0.0;
  double lambda = 0.0;
  double c_ma = 0.0;
};

struct VaeTrainResult {
  std::vector<VaeEpochMetrics> epochs;
  GecoMultiplier final_geco;
};

using EpochCallback = std::function<void(const VaeEpochMetrics&)>;

/// Full training run over a dataset of raw states (10 x n). Fits the
/// standardizer, initialises the nets from cfg.seed and runs cfg.epochs.
VaeModel train_vae(const MatrixXd& states, const VaeArchitecture& arch, const VaeTrainConfig& cfg,
                   VaeTrainResult* result = nullptr, const EpochCallback& on_epoch = {});

void save_vae(const VaeModel& m, const VaeTrainConfig& cfg, const GecoMultiplier& geco,
              const std::string& path);
VaeModel load_vae(const std::string& path);

}  // namespace lspp

#endif  // LSPP_VAE_HPP_
