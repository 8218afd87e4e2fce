#include <benchmark/benchmark.h>

#include "lspp/planner.hpp"

namespace {

// end-to-end AM planning cost at desk-model scale (untrained weights; the
// arithmetic per step is identical)
void BM_plan_free_space(benchmark::State& state) {
  const lspp::RobotModel robot = lspp::panda_model();
  lspp::Rng rng(6);
  const lspp::Standardizer unit(lspp::VectorXd::Zero(10), lspp::VectorXd::Ones(10));
  const lspp::VaeModel vae(lspp::VaeArchitecture{4, 256}, unit, rng);

  lspp::Scenario sc;
  sc.seed = 1;
  sc.start_q = lspp::JointConfig::Zero();
  sc.start_q[3] = -1.5;
  sc.target_q_hidden = sc.start_q;
  sc.target_e = lspp::Vector3d(0.4, 0.1, 0.5);

  lspp::PlannerConfig cfg;
  cfg.max_steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lspp::plan(vae, nullptr, sc, robot, cfg));
  }
}
BENCHMARK(BM_plan_free_space)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
