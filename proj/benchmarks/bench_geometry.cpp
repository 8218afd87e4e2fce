#include <benchmark/benchmark.h>

#include "lspp/datagen.hpp"
#include "lspp/geometry.hpp"
#include "lspp/robot_config.hpp"

namespace {

void BM_capsule_cylinder_distance(benchmark::State& state) {
  const lspp::Capsule c{{0.2, -0.1, 0.6}, {0.5, 0.3, 0.4}, 0.06};
  const lspp::Obstacle o{0.4, 0.1, 0.5, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lspp::capsule_cylinder_distance(c, o));
  }
}
BENCHMARK(BM_capsule_cylinder_distance);

void BM_arm_in_collision(benchmark::State& state) {
  const lspp::RobotModel robot = lspp::panda_model();
  lspp::Rng rng(3);
  const lspp::DatagenConfig cfg;
  lspp::Rng stream(11);
  const lspp::StateSample s = lspp::sample_state(stream, robot, cfg);
  std::vector<lspp::Obstacle> obstacles;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
    obstacles.push_back(lspp::sample_obstacle(stream, cfg));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lspp::arm_in_collision(s.q, obstacles, robot.dh, robot.shape));
  }
}
BENCHMARK(BM_arm_in_collision)->Arg(0)->Arg(1)->Arg(5);

}  // namespace
