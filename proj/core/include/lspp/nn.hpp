#ifndef LSPP_NN_HPP_
#define LSPP_NN_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lspp/rng.hpp"
#include "lspp/types.hpp"

namespace lspp {

enum class Activation { kElu, kIdentity };

/// Fully connected net: affine + ELU(alpha=1) on every hidden layer,
/// identity on the output layer (overridable per layer). Data is
/// column-major, one sample per column.
class DenseNet {
 public:
  struct Layer {
    MatrixXd weight;  // out x in
    VectorXd bias;    // out
  };

  DenseNet() = default;
  /// layer_sizes = {in, hidden..., out}; He-scaled Gaussian weights, zero biases.
  DenseNet(const std::vector<int>& layer_sizes, Rng& rng);
  DenseNet(const std::vector<int>& layer_sizes, std::vector<Activation> activations, Rng& rng);

  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  struct ForwardCache {
    std::vector<MatrixXd> inputs;   // input of each layer
    std::vector<MatrixXd> preacts;  // pre-activation of each layer
  };

  struct Gradients {
    std::vector<MatrixXd> d_weight;
    std::vector<VectorXd> d_bias;
  };

  /// X: in x batch. Fills the cache when given (needed for backward).
  MatrixXd forward(const MatrixXd& x, ForwardCache* cache = nullptr) const;
  VectorXd forward(const VectorXd& x, ForwardCache* cache = nullptr) const;

  /// Reverse mode from an upstream gradient dY (out x batch). Returns the
  /// input gradient; fills parameter gradients when `grads` is given.
  MatrixXd backward(const ForwardCache& cache, const MatrixXd& d_output,
                    Gradients* grads = nullptr) const;

  Gradients zero_gradients() const;
  std::size_t parameter_count() const;

 private:
  std::vector<int> layer_sizes_;
  std::vector<Activation> activations_;  // one per layer
  std::vector<Layer> layers_;
};

double elu(double x);
double elu_derivative(double x);

/// Adam with bias correction. Defaults beta1=0.9, beta2=0.999, eps=1e-8.
struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moments for a DenseNet's parameters.
struct AdamState {
  std::vector<MatrixXd> m_weight, v_weight;
  std::vector<VectorXd> m_bias, v_bias;
  std::int64_t step = 0;

  static AdamState zeros_like(const DenseNet& net);
};

void adam_step(AdamState& state, const AdamConfig& cfg, DenseNet& net,
               const DenseNet::Gradients& grads);

/// Moments for a flat vector (the latent planning variable).
struct AdamVectorState {
  VectorXd m, v;
  std::int64_t step = 0;

  static AdamVectorState zeros(int dim);
};

VectorXd adam_step(AdamVectorState& state, const AdamConfig& cfg, const VectorXd& params,
                   const VectorXd& grad);

/// Per-dimension affine map to zero mean, unit standard deviation.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(VectorXd mean, VectorXd std);

  /// Moments of the columns of `data` (dim x n). Stds are floored at 1e-12.
  static Standardizer fit(const MatrixXd& data);

  VectorXd standardize(const VectorXd& v) const;
  MatrixXd standardize(const MatrixXd& m) const;
  VectorXd destandardize(const VectorXd& v) const;
  MatrixXd destandardize(const MatrixXd& m) const;

  const VectorXd& mean() const { return mean_; }
  const VectorXd& std() const { return std_; }
  int dim() const { return static_cast<int>(mean_.size()); }

 private:
  VectorXd mean_, std_;
};

}  // namespace lspp

#endif  // LSPP_NN_HPP_
