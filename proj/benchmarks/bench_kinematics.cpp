#include <benchmark/benchmark.h>

#include "lspp/kinematics.hpp"
#include "lspp/robot_config.hpp"
#include "lspp/rng.hpp"

namespace {

lspp::JointConfig random_q(lspp::Rng& rng, const lspp::JointLimits& lim) {
  lspp::JointConfig q;
  for (int i = 0; i < 7; ++i) q[i] = rng.uniform(lim.lower[i], lim.upper[i]);
  return q;
}

void BM_forward_kinematics(benchmark::State& state) {
  const lspp::RobotModel robot = lspp::panda_model();
  lspp::Rng rng(1);
  const lspp::JointConfig q = random_q(rng, robot.limits);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lspp::forward_kinematics(q, robot.dh));
  }
}
BENCHMARK(BM_forward_kinematics);

void BM_positional_jacobian(benchmark::State& state) {
  const lspp::RobotModel robot = lspp::panda_model();
  lspp::Rng rng(2);
  const lspp::JointConfig q = random_q(rng, robot.limits);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lspp::positional_jacobian(q, robot.dh));
  }
}
BENCHMARK(BM_positional_jacobian);

}  // namespace
