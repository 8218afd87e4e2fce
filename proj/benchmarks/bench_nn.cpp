#include <benchmark/benchmark.h>

#include "lspp/nn.hpp"
#include "lspp/rng.hpp"

namespace {

// desk profile decoder shape at training batch size
void BM_forward_batch(benchmark::State& state) {
  lspp::Rng rng(4);
  lspp::DenseNet net({7, 256, 256, 256, 256, 10}, rng);
  const lspp::MatrixXd x = rng.normal_matrix(7, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x));
  }
}
BENCHMARK(BM_forward_batch)->Arg(1)->Arg(256);

void BM_forward_backward_batch(benchmark::State& state) {
  lspp::Rng rng(5);
  lspp::DenseNet net({7, 256, 256, 256, 256, 10}, rng);
  const lspp::MatrixXd x = rng.normal_matrix(7, static_cast<int>(state.range(0)));
  const lspp::MatrixXd dy = rng.normal_matrix(10, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    lspp::DenseNet::ForwardCache cache;
    benchmark::DoNotOptimize(net.forward(x, &cache));
    auto grads = net.zero_gradients();
    benchmark::DoNotOptimize(net.backward(cache, dy, &grads));
  }
}
BENCHMARK(BM_forward_backward_batch)->Arg(1)->Arg(256);

}  // namespace
