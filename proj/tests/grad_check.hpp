#ifndef LSPP_TESTS_GRAD_CHECK_HPP_
#define LSPP_TESTS_GRAD_CHECK_HPP_

// Finite-difference gradient checks shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>

#include "lspp/nn.hpp"
#include "lspp/rng.hpp"

namespace gradcheck {

inline double relative_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({floor, std::abs(a), std::abs(b)});
}

/// Checks input gradients and a sample of parameter gradients of a scalar
/// probe u^T f(x) against central finite differences. Returns the worst
/// relative error seen.
inline double check_net_gradients(const lspp::DenseNet& net, lspp::Rng& rng,
                                  int param_samples_per_layer = 8, double fd_step = 1e-6) {
  using lspp::MatrixXd;
  using lspp::VectorXd;

  const VectorXd x = rng.normal_vector(net.input_dim());
  const VectorXd u = rng.normal_vector(net.output_dim());

  const auto probe = [&](const lspp::DenseNet& n, const VectorXd& input) {
    return u.dot(n.forward(input));
  };

  lspp::DenseNet::ForwardCache cache;
  net.forward(x, &cache);
  auto grads = net.zero_gradients();
  const MatrixXd d_input = net.backward(cache, MatrixXd(u), &grads);

  double worst = 0.0;

  for (int i = 0; i < net.input_dim(); ++i) {
    VectorXd xp = x, xm = x;
    xp[i] += fd_step;
    xm[i] -= fd_step;
    const double fd = (probe(net, xp) - probe(net, xm)) / (2.0 * fd_step);
    worst = std::max(worst, relative_error(fd, d_input(i, 0)));
  }

  lspp::DenseNet mutable_net = net;
  for (std::size_t layer = 0; layer < net.layers().size(); ++layer) {
    auto& weight = mutable_net.layers()[layer].weight;
    auto& bias = mutable_net.layers()[layer].bias;
    for (int s = 0; s < param_samples_per_layer; ++s) {
      const int r = static_cast<int>(rng.uniform() * weight.rows());
      const int c = static_cast<int>(rng.uniform() * weight.cols());
      const double saved = weight(r, c);
      weight(r, c) = saved + fd_step;
      const double fp = probe(mutable_net, x);
      weight(r, c) = saved - fd_step;
      const double fm = probe(mutable_net, x);
      weight(r, c) = saved;
      const double fd = (fp - fm) / (2.0 * fd_step);
      worst = std::max(worst, relative_error(fd, grads.d_weight[layer](r, c)));
    }
    const int bi = static_cast<int>(rng.uniform() * bias.size());
    const double saved = bias[bi];
    bias[bi] = saved + fd_step;
    const double fp = probe(mutable_net, x);
    bias[bi] = saved - fd_step;
    const double fm = probe(mutable_net, x);
    bias[bi] = saved;
    worst = std::max(worst, relative_error((fp - fm) / (2.0 * fd_step), grads.d_bias[layer][bi]));
  }
  return worst;
}

}  // namespace gradcheck

#endif  // LSPP_TESTS_GRAD_CHECK_HPP_
