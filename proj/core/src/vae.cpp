#include "lspp/vae.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lspp/checkpoint.hpp"

namespace lspp {

double kl_divergence(const PosteriorParams& p) {
  if ((p.sigma.array() <= 0.0).any())
    throw std::invalid_argument("kl_divergence: sigma must be positive");
  const auto mu2 = p.mu.array().square();
  const auto s2 = p.sigma.array().square();
  return 0.5 * (mu2 + s2 - 1.0 - s2.log()).sum();
}

std::vector<int> VaeArchitecture::encoder_sizes() const {
  std::vector<int> sizes{kStateDim};
  sizes.insert(sizes.end(), hidden_layers, hidden_units);
  sizes.push_back(2 * kLatentDim);
  return sizes;
}

std::vector<int> VaeArchitecture::decoder_sizes() const {
  std::vector<int> sizes{kLatentDim};
  sizes.insert(sizes.end(), hidden_layers, hidden_units);
  sizes.push_back(kStateDim);
  return sizes;
}

VaeModel::VaeModel(const VaeArchitecture& arch, const Standardizer& standardizer, Rng& rng)
    : encoder_(arch.encoder_sizes(), rng),
      decoder_(arch.decoder_sizes(), rng),
      standardizer_(standardizer) {
  if (standardizer_.dim() != kStateDim)
    throw std::invalid_argument("VaeModel: standardizer must cover the 10 state dims");
}

VaeModel::VaeModel(DenseNet encoder, DenseNet decoder, Standardizer standardizer)
    : encoder_(std::move(encoder)),
      decoder_(std::move(decoder)),
      standardizer_(std::move(standardizer)) {
  if (encoder_.input_dim() != kStateDim || encoder_.output_dim() != 2 * kLatentDim ||
      decoder_.input_dim() != kLatentDim || decoder_.output_dim() != kStateDim)
    throw std::invalid_argument("VaeModel: net dimensions do not match the state/latent layout");
  if (standardizer_.dim() != kStateDim)
    throw std::invalid_argument("VaeModel: standardizer must cover the 10 state dims");
}

PosteriorParams VaeModel::encode(const RobotState& x) const {
  const VectorXd out = encoder_.forward(standardizer_.standardize(VectorXd(x.stacked())));
  PosteriorParams p;
  p.mu = out.head<7>();
  p.sigma = out.tail<7>().array().exp();
  return p;
}

LatentVector VaeModel::reparameterise(const PosteriorParams& p, const Vector7d& noise) {
  if ((p.sigma.array() <= 0.0).any())
    throw std::invalid_argument("reparameterise: sigma must be positive");
  return p.mu + p.sigma.cwiseProduct(noise);
}

RobotState VaeModel::decode(const LatentVector& z) const {
  const VectorXd out = standardizer_.destandardize(decoder_.forward(VectorXd(z)));
  return RobotState::from_stacked(out);
}

VaeModel::DecodeCache VaeModel::decode_with_cache(const LatentVector& z) const {
  DecodeCache dc;
  const VectorXd out = decoder_.forward(VectorXd(z), &dc.cache);
  dc.state = RobotState::from_stacked(standardizer_.destandardize(out));
  return dc;
}

LatentVector VaeModel::decode_backward(const DecodeCache& dc, const VectorXd& d_state) const {
  if (d_state.size() != kStateDim)
    throw std::invalid_argument("decode_backward: gradient must have 10 dims");
  // chain through destandardisation: x = mean + std .* y
  const MatrixXd d_out = d_state.cwiseProduct(standardizer_.std());
  return decoder_.backward(dc.cache, d_out).col(0);
}

std::vector<RobotState> VaeModel::sample_prior(int n, std::uint64_t seed) const {
  return sample_prior(n, seed, nullptr);
}

std::vector<RobotState> VaeModel::sample_prior(int n, std::uint64_t seed,
                                               std::vector<LatentVector>* latents) const {
  if (n < 1) throw std::invalid_argument("sample_prior: n must be >= 1");
  Rng rng(seed);
  MatrixXd zs = rng.normal_matrix(kLatentDim, n);
  MatrixXd decoded = decode_batch(zs);
  std::vector<RobotState> out;
  out.reserve(n);
  if (latents) {
    latents->clear();
    latents->reserve(n);
  }
  for (int i = 0; i < n; ++i) {
    out.push_back(RobotState::from_stacked(decoded.col(i)));
    if (latents) latents->push_back(zs.col(i));
  }
  return out;
}

MatrixXd VaeModel::encode_mu_batch(const MatrixXd& states) const {
  const MatrixXd out = encoder_.forward(standardizer_.standardize(states));
  return out.topRows(kLatentDim);
}

MatrixXd VaeModel::decode_batch(const MatrixXd& latents) const {
  return standardizer_.destandardize(decoder_.forward(latents));
}

VaeTrainer::VaeTrainer(VaeModel& model, const VaeTrainConfig& cfg)
    : model_(model),
      cfg_(cfg),
      adam_encoder_(AdamState::zeros_like(model.encoder())),
      adam_decoder_(AdamState::zeros_like(model.decoder())),
      enc_grads_(model.encoder().zero_gradients()),
      dec_grads_(model.decoder().zero_gradients()),
      rng_(derive_stream_seed(cfg.seed, 0x7a11)) {
  geco_.lambda = cfg.lambda_init;
  geco_.tau_goal = cfg.tau;
  geco_.alpha_ma = cfg.geco_alpha_ma;
  geco_.alpha_geco = cfg.geco_learning_rate;
  current_lr_ = cfg.learning_rate;
}

VaeStepMetrics VaeTrainer::geco_train_step(const MatrixXd& xs) {
  if (xs.cols() < 1) throw std::invalid_argument("geco_train_step: empty batch");
  if (xs.rows() != kStateDim) throw std::invalid_argument("geco_train_step: batch must be 10 x B");
  const int batch = static_cast<int>(xs.cols());

  DenseNet::ForwardCache enc_cache, dec_cache;
  const MatrixXd enc_out = model_.encoder().forward(xs, &enc_cache);
  const MatrixXd mu = enc_out.topRows(kLatentDim);
  const MatrixXd logs = enc_out.bottomRows(kLatentDim);
  const MatrixXd sigma = logs.array().exp();

  const MatrixXd eps = rng_.normal_matrix(kLatentDim, batch);
  const MatrixXd z = mu + sigma.cwiseProduct(eps);

  const MatrixXd xh = model_.decoder().forward(z, &dec_cache);
  const MatrixXd diff = xh - xs;
  const VectorXd recon_per_sample = diff.colwise().norm();
  const double recon = recon_per_sample.mean();

  const double kl =
      0.5 * (mu.array().square() + sigma.array().square() - 1.0 - 2.0 * logs.array()).sum() / batch;

  geco_update(geco_, recon, first_step_);
  first_step_ = false;
  const double lambda = geco_.lambda;
  const double loss = kl + lambda * (recon - geco_.tau_goal);

  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "geco_train_step: non-finite loss (kl=" << kl << ", recon=" << recon
       << ", lambda=" << lambda << ", step=" << adam_encoder_.step << ")";
    throw std::runtime_error(os.str());
  }

  // d(recon)/d(xh) per sample: diff / (B * max(|diff|, tiny))
  MatrixXd d_xh = diff;
  for (int i = 0; i < batch; ++i)
    d_xh.col(i) *= lambda / (batch * std::max(recon_per_sample[i], 1e-12));

  for (std::size_t i = 0; i < dec_grads_.d_weight.size(); ++i) {
    dec_grads_.d_weight[i].setZero();
    dec_grads_.d_bias[i].setZero();
  }
  for (std::size_t i = 0; i < enc_grads_.d_weight.size(); ++i) {
    enc_grads_.d_weight[i].setZero();
    enc_grads_.d_bias[i].setZero();
  }
  const MatrixXd dz = model_.mutable_decoder().backward(dec_cache, d_xh, &dec_grads_);

  MatrixXd d_enc_out(2 * kLatentDim, batch);
  d_enc_out.topRows(kLatentDim) = dz + mu / batch;
  d_enc_out.bottomRows(kLatentDim) =
      dz.cwiseProduct(sigma.cwiseProduct(eps)) + (sigma.array().square() - 1.0).matrix() / batch;

  model_.mutable_encoder().backward(enc_cache, d_enc_out, &enc_grads_);

  AdamConfig adam{current_lr_};
  adam_step(adam_encoder_, adam, model_.mutable_encoder(), enc_grads_);
  adam_step(adam_decoder_, adam, model_.mutable_decoder(), dec_grads_);

  return {loss, kl, recon, lambda, geco_.c_ma};
}

VaeModel train_vae(const MatrixXd& states, const VaeArchitecture& arch, const VaeTrainConfig& cfg,
                   VaeTrainResult* result, const EpochCallback& on_epoch) {
  if (states.rows() != kStateDim) throw std::invalid_argument("train_vae: states must be 10 x n");
  const int n = static_cast<int>(states.cols());
  if (n < 2) throw std::invalid_argument("train_vae: need at least 2 samples");

  Rng init_rng(cfg.seed);
  VaeModel model(arch, Standardizer::fit(states), init_rng);
  const MatrixXd xs = model.standardizer().standardize(states);

  VaeTrainer trainer(model, cfg);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  const double rate_ratio = cfg.resolved_final_rate() / cfg.learning_rate;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (rate_ratio != 1.0)
      trainer.set_learning_rate(
          cfg.learning_rate *
          std::pow(rate_ratio, static_cast<double>(epoch) / std::max(1, cfg.epochs - 1)));
    // Fisher-Yates with the trainer stream
    for (int i = n - 1; i > 0; --i) {
      const int j = trainer.rng().uniform_int(0, i);
      std::swap(order[i], order[j]);
    }
    VaeEpochMetrics em;
    em.epoch = epoch;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      MatrixXd batch(kStateDim, b);
      for (int i = 0; i < b; ++i) batch.col(i) = xs.col(order[start + i]);
      const VaeStepMetrics sm = trainer.geco_train_step(batch);
      em.loss += sm.loss;
      em.kl += sm.kl;
      em.reconstruction += sm.reconstruction;
      em.lambda = sm.lambda;
      em.c_ma = sm.c_ma;
      ++batches;
    }
    em.loss /= batches;
    em.kl /= batches;
    em.reconstruction /= batches;
    if (result) result->epochs.push_back(em);
    if (on_epoch) on_epoch(em);
  }
  if (result) result->final_geco = trainer.geco_state();
  return model;
}

void save_vae(const VaeModel& m, const VaeTrainConfig& cfg, const GecoMultiplier& geco,
              const std::string& path) {
  Json j;
  j["version"] = 1;
  j["model_kind"] = "vae";
  j["seed"] = cfg.seed;
  j["architecture"] = {{"encoder", m.encoder().layer_sizes()},
                       {"decoder", m.decoder().layer_sizes()},
                       {"latent_dim", kLatentDim}};
  j["standardizer"] = standardizer_to_json(m.standardizer());
  j["training_config"] = {{"epochs", cfg.epochs},
                          {"batch_size", cfg.batch_size},
                          {"learning_rate", cfg.learning_rate},
                          {"learning_rate_final", cfg.resolved_final_rate()},
                          {"tau", cfg.tau},
                          {"geco_learning_rate", cfg.geco_learning_rate},
                          {"geco_alpha_ma", cfg.geco_alpha_ma},
                          {"lambda_init", cfg.lambda_init}};
  j["geco_state"] = {{"lambda", geco.lambda}, {"c_ma", geco.c_ma}, {"tau_goal", geco.tau_goal},
                     {"alpha_ma", geco.alpha_ma}, {"alpha_geco", geco.alpha_geco}};
  j["encoder"] = net_to_json(m.encoder());
  j["decoder"] = net_to_json(m.decoder());
  write_json_file(j, path);
}

VaeModel load_vae(const std::string& path) {
  const Json j = read_json_file(path);
  const auto header = checkpoint_header(j);
  if (header.model_kind != "vae")
    throw std::runtime_error("checkpoint is not a vae model: " + path);
  return VaeModel(net_from_json(j.at("encoder")), net_from_json(j.at("decoder")),
                  standardizer_from_json(j.at("standardizer")));
}

}  // namespace lspp
