#include "lspp/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace lspp {

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double elu_derivative(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

namespace {

// elu(x) = max(x,0) + expm1(min(x,0)), branch-free over arrays
inline MatrixXd elu_array(const MatrixXd& x) {
  return x.array().max(0.0) + x.array().min(0.0).unaryExpr([](double v) { return std::expm1(v); });
}

inline MatrixXd elu_derivative_array(const MatrixXd& x) {
  return (x.array() > 0.0).select(1.0, x.array().exp());
}

}  // namespace

namespace {

std::vector<Activation> default_activations(std::size_t layer_count) {
  std::vector<Activation> acts(layer_count, Activation::kElu);
  if (!acts.empty()) acts.back() = Activation::kIdentity;
  return acts;
}

}  // namespace

DenseNet::DenseNet(const std::vector<int>& layer_sizes, Rng& rng)
    : DenseNet(layer_sizes, default_activations(layer_sizes.size() - 1), rng) {}

DenseNet::DenseNet(const std::vector<int>& layer_sizes, std::vector<Activation> activations,
                   Rng& rng)
    : layer_sizes_(layer_sizes), activations_(std::move(activations)) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("DenseNet: need at least two layer sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw std::invalid_argument("DenseNet: layer sizes must be positive");
  if (activations_.size() != layer_sizes.size() - 1)
    throw std::invalid_argument("DenseNet: need one activation per layer");
  layers_.reserve(layer_sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const int in = layer_sizes[i];
    const int out = layer_sizes[i + 1];
    Layer layer;
    const double scale = std::sqrt(2.0 / in);
    layer.weight = scale * rng.normal_matrix(out, in);
    layer.bias = VectorXd::Zero(out);
    layers_.push_back(std::move(layer));
  }
}

MatrixXd DenseNet::forward(const MatrixXd& x, ForwardCache* cache) const {
  if (x.rows() != input_dim())
    throw std::invalid_argument("DenseNet::forward: input dimension mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
    cache->inputs.reserve(layers_.size());
    cache->preacts.reserve(layers_.size());
  }
  MatrixXd h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (cache) cache->inputs.push_back(h);
    MatrixXd pre = (layers_[i].weight * h).colwise() + layers_[i].bias;
    if (cache) cache->preacts.push_back(pre);
    h = activations_[i] == Activation::kElu ? elu_array(pre) : std::move(pre);
  }
  return h;
}

VectorXd DenseNet::forward(const VectorXd& x, ForwardCache* cache) const {
  return forward(MatrixXd(x), cache).col(0);
}

MatrixXd DenseNet::backward(const ForwardCache& cache, const MatrixXd& d_output,
                            Gradients* grads) const {
  if (cache.inputs.size() != layers_.size() || cache.preacts.size() != layers_.size())
    throw std::invalid_argument("DenseNet::backward: cache does not match this net");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (cache.inputs[i].rows() != layers_[i].weight.cols() ||
        cache.preacts[i].rows() != layers_[i].weight.rows() ||
        cache.inputs[i].cols() != cache.preacts[i].cols())
      throw std::invalid_argument("DenseNet::backward: stale cache (layer shape mismatch)");
  }
  if (d_output.rows() != output_dim() || d_output.cols() != cache.inputs.front().cols())
    throw std::invalid_argument("DenseNet::backward: output gradient shape mismatch");
  if (grads && grads->d_weight.size() != layers_.size())
    throw std::invalid_argument("DenseNet::backward: gradient buffers do not match this net");

  MatrixXd delta = d_output;
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    if (activations_[i] == Activation::kElu)
      delta = delta.cwiseProduct(elu_derivative_array(cache.preacts[i]));
    if (grads) {
      grads->d_weight[i].noalias() += delta * cache.inputs[i].transpose();
      grads->d_bias[i] += delta.rowwise().sum();
    }
    delta = layers_[i].weight.transpose() * delta;
  }
  return delta;
}

DenseNet::Gradients DenseNet::zero_gradients() const {
  Gradients g;
  g.d_weight.reserve(layers_.size());
  g.d_bias.reserve(layers_.size());
  for (const auto& layer : layers_) {
    g.d_weight.push_back(MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    g.d_bias.push_back(VectorXd::Zero(layer.bias.size()));
  }
  return g;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

AdamState AdamState::zeros_like(const DenseNet& net) {
  AdamState s;
  for (const auto& layer : net.layers()) {
    s.m_weight.push_back(MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    s.v_weight.push_back(MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    s.m_bias.push_back(VectorXd::Zero(layer.bias.size()));
    s.v_bias.push_back(VectorXd::Zero(layer.bias.size()));
  }
  return s;
}

namespace {

template <typename Param, typename Grad>
void adam_update(Param& p, const Grad& g, Param& m, Param& v, const AdamConfig& cfg,
                 double bc1, double bc2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v.array().matrix() + (1.0 - cfg.beta2) * g.array().square().matrix();
  p.array() -= cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(AdamState& state, const AdamConfig& cfg, DenseNet& net,
               const DenseNet::Gradients& grads) {
  if (state.m_weight.size() != net.layers().size())
    throw std::invalid_argument("adam_step: state does not match net");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    adam_update(net.layers()[i].weight, grads.d_weight[i], state.m_weight[i], state.v_weight[i],
                cfg, bc1, bc2);
    adam_update(net.layers()[i].bias, grads.d_bias[i], state.m_bias[i], state.v_bias[i], cfg, bc1,
                bc2);
  }
}

AdamVectorState AdamVectorState::zeros(int dim) {
  AdamVectorState s;
  s.m = VectorXd::Zero(dim);
  s.v = VectorXd::Zero(dim);
  return s;
}

VectorXd adam_step(AdamVectorState& state, const AdamConfig& cfg, const VectorXd& params,
                   const VectorXd& grad) {
  if (params.size() != state.m.size() || grad.size() != state.m.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v.array().matrix() + (1.0 - cfg.beta2) * grad.array().square().matrix();
  VectorXd out = params;
  out.array() -=
      cfg.learning_rate * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + cfg.epsilon);
  return out;
}

Standardizer::Standardizer(VectorXd mean, VectorXd std) : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size())
    throw std::invalid_argument("Standardizer: mean/std size mismatch");
  if ((std_.array() <= 0.0).any()) throw std::invalid_argument("Standardizer: std must be positive");
}

Standardizer Standardizer::fit(const MatrixXd& data) {
  if (data.cols() < 1) throw std::invalid_argument("Standardizer::fit: empty data");
  VectorXd mean = data.rowwise().mean();
  VectorXd var = (data.colwise() - mean).array().square().matrix().rowwise().mean();
  VectorXd std = var.array().sqrt().max(1e-12);
  return Standardizer(std::move(mean), std::move(std));
}

VectorXd Standardizer::standardize(const VectorXd& v) const {
  if (v.size() != mean_.size()) throw std::invalid_argument("standardize: dimension mismatch");
  return (v - mean_).cwiseQuotient(std_);
}

MatrixXd Standardizer::standardize(const MatrixXd& m) const {
  if (m.rows() != mean_.size()) throw std::invalid_argument("standardize: dimension mismatch");
  return (m.colwise() - mean_).array().colwise() / std_.array();
}

VectorXd Standardizer::destandardize(const VectorXd& v) const {
  if (v.size() != mean_.size()) throw std::invalid_argument("destandardize: dimension mismatch");
  return v.cwiseProduct(std_) + mean_;
}

MatrixXd Standardizer::destandardize(const MatrixXd& m) const {
  if (m.rows() != mean_.size()) throw std::invalid_argument("destandardize: dimension mismatch");
  return (m.array().colwise() * std_.array()).matrix().colwise() + mean_;
}

}  // namespace lspp
