// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numeric>

#include "citetime/kernels.hpp"
#include "citetime/node_vectors.hpp"
#include "citetime/time_mlp.hpp"

using namespace citetime;

namespace {

struct ScoreData {
  std::size_t dim = 100;
  Vec matrix, query;
  std::vector<std::int64_t> rows;
  Vec out;

  explicit ScoreData(std::size_t n) : matrix(n * 100), query(100), rows(n), out(n) {
    Rng rng(1);
    for (auto& x : matrix) x = uniform01(rng) - 0.5;
    for (auto& x : query) x = uniform01(rng) - 0.5;
    std::iota(rows.begin(), rows.end(), 0);
  }
};

void BM_CosineScoresSerial(benchmark::State& state) {
  ScoreData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::cosine_scores_serial(d.query, d.matrix.data(), d.dim, d.rows, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CosineScoresParallel(benchmark::State& state) {
  ScoreData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::cosine_scores_parallel(d.query, d.matrix.data(), d.dim, d.rows, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Random graph with average degree about 20.
UndirectedGraph random_graph(std::size_t n) {
  Rng rng(2);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n * 10; ++i) {
    const auto a = static_cast<PaperIndex>(uniform_index(rng, n));
    const auto b = static_cast<PaperIndex>(uniform_index(rng, n));
    if (a != b) e.emplace_back(a, b);
  }
  return UndirectedGraph(n, e);
}

void BM_WalksSerial(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)));
  WalkParams p;
  p.walks_per_node = 2;
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks_serial(g, p));
}

void BM_WalksParallel(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)));
  WalkParams p;
  p.walks_per_node = 2;
  for (auto _ : state) benchmark::DoNotOptimize(generate_walks_parallel(g, p));
}

struct BatchData {
  MlpShape shape;
  MlpParams params;
  std::vector<TrainingExample> data;
  std::vector<std::size_t> batch;

  explicit BatchData(std::size_t n) {
    shape.input = 100;
    shape.slices = 5;
    params = MlpParams::glorot(shape, 3);
    Rng rng(4);
    for (std::size_t i = 0; i < n; ++i) {
      Vec c(100), d(100);
      for (auto& x : c) x = uniform01(rng) - 0.5;
      for (auto& x : d) x = uniform01(rng) - 0.5;
      data.push_back({c, d, TimePreference::uniform(5)});
    }
    batch.resize(n);
    std::iota(batch.begin(), batch.end(), 0);
  }
};

void BM_BatchGradientSerial(benchmark::State& state) {
  BatchData b(static_cast<std::size_t>(state.range(0)));
  MlpParams grad(b.shape);
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient_serial(b.params, b.data, b.batch, grad));
}

void BM_BatchGradientParallel(benchmark::State& state) {
  BatchData b(static_cast<std::size_t>(state.range(0)));
  MlpParams grad(b.shape);
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient_parallel(b.params, b.data, b.batch, grad));
}

}  // namespace

BENCHMARK(BM_CosineScoresSerial)->Arg(2000)->Arg(50000);
BENCHMARK(BM_CosineScoresParallel)->Arg(2000)->Arg(50000);
BENCHMARK(BM_WalksSerial)->Arg(2000);
BENCHMARK(BM_WalksParallel)->Arg(2000);
BENCHMARK(BM_BatchGradientSerial)->Arg(64)->Arg(512);
BENCHMARK(BM_BatchGradientParallel)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
