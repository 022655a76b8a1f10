#include "ncemb/compose.hpp"
#include "ncemb/neighbors.hpp"
#include "ncemb/rng.hpp"
#include "ncemb/train.hpp"

#include <benchmark/benchmark.h>

using namespace ncemb;

namespace {

Eigen::VectorXd random_vector(Eigen::Index d, Rng& rng) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

void bench_compose_forward(benchmark::State& state, CompositionKind kind) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  Rng rng(1);
  const CompositionModel model = init_model(kind, d, 2);
  const Eigen::VectorXd v1 = random_vector(d, rng);
  const Eigen::VectorXd v2 = random_vector(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose(model, v1, v2));
  }
}

void bench_lstm_sequence(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const auto len = static_cast<std::size_t>(state.range(1));
  Rng rng(3);
  const CompositionModel model = init_model(CompositionKind::lstm, d, 4);
  std::vector<Eigen::VectorXd> sequence;
  for (std::size_t t = 0; t < len; ++t) sequence.push_back(random_vector(d, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose_lstm(model.lstm(), sequence));
  }
}

void bench_batch_gradients(benchmark::State& state, CompositionKind kind) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  const CompositionModel model = init_model(kind, d, 6);
  std::vector<ComposeExample> batch;
  for (int i = 0; i < 64; ++i) {
    batch.push_back({random_vector(d, rng), random_vector(d, rng), random_vector(d, rng)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_gradients(model, batch, Distance::mse));
  }
}

void bench_top_k(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const auto pool_size = static_cast<std::size_t>(state.range(1));
  Rng rng(7);
  NeighborPool pool(d);
  for (std::size_t i = 0; i < pool_size; ++i) {
    pool.add("tok" + std::to_string(i), random_vector(d, rng));
  }
  const Eigen::VectorXd query = random_vector(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pool.top_k(query, 10, {}));
  }
}

} // namespace

BENCHMARK_CAPTURE(bench_compose_forward, add, CompositionKind::add)->Arg(100)->Arg(300);
BENCHMARK_CAPTURE(bench_compose_forward, fulladd, CompositionKind::full_add)
    ->Arg(100)
    ->Arg(300);
BENCHMARK_CAPTURE(bench_compose_forward, matrix, CompositionKind::matrix)->Arg(100)->Arg(300);
BENCHMARK_CAPTURE(bench_compose_forward, lstm, CompositionKind::lstm)->Arg(100)->Arg(300);
BENCHMARK(bench_lstm_sequence)->Args({100, 2})->Args({100, 5})->Args({300, 5});
BENCHMARK_CAPTURE(bench_batch_gradients, fulladd, CompositionKind::full_add)
    ->Arg(50)
    ->Arg(100);
BENCHMARK_CAPTURE(bench_batch_gradients, lstm, CompositionKind::lstm)->Arg(50);
BENCHMARK(bench_top_k)->Args({100, 10000})->Args({300, 10000});

BENCHMARK_MAIN();
