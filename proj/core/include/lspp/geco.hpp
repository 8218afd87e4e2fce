#ifndef LSPP_GECO_HPP_
#define LSPP_GECO_HPP_

#include <algorithm>
#include <cmath>

namespace lspp {

/// Lagrange multiplier driven by a moving average of constraint violation.
/// Multiplicative update: C = loss - tau_goal; C_ma = C on the first step,
/// otherwise alpha_ma * C_ma + (1 - alpha_ma) * C; kappa = exp(alpha_geco * C_ma);
/// lambda <- clamp(lambda * kappa).
struct GecoMultiplier {
  double lambda = 1.0;
  double c_ma = 0.0;
  double tau_goal = 0.0;
  double alpha_ma = 0.95;
  double alpha_geco = 0.01;
  double lambda_min = 1e-6;
  double lambda_max = 1e6;
};

inline void geco_update(GecoMultiplier& s, double current_loss, bool first_step) {
  const double c = current_loss - s.tau_goal;
  s.c_ma = first_step ? c : s.alpha_ma * s.c_ma + (1.0 - s.alpha_ma) * c;
  const double kappa = std::exp(s.alpha_geco * s.c_ma);
  s.lambda = std::clamp(s.lambda * kappa, s.lambda_min, s.lambda_max);
}

}  // namespace lspp

#endif  // LSPP_GECO_HPP_
