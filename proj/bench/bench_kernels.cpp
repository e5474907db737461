#include "scr/kernels.hpp"
#include "scr/parallel.hpp"
#include "scr/random.hpp"
#include "scr/similarity.hpp"

#include <benchmark/benchmark.h>
#include <boost/random/normal_distribution.hpp>

using namespace scr;

namespace {

SimilarityBasis make_basis(Index p, Index K) {
  std::vector<SparseSymMatrix> ws{SparseSymMatrix::identity(p)};
  const double prob = 5.0 / static_cast<double>(p);
  for (Index k = 0; k < K; ++k) ws.push_back(bernoulli_similarity(p, prob, derive_seed(1, stream::similarity, k)));
  return SimilarityBasis(std::move(ws));
}

Matrix make_observations(Index n, Index p) {
  Engine rng(derive_seed(1, stream::noise));
  boost::random::normal_distribution<double> z;
  Matrix y(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) y(i, j) = z(rng);
  return y;
}

void BM_GramSerial(benchmark::State& state) {
  const auto basis = make_basis(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::gram_matrix(basis));
}

void BM_GramParallel(benchmark::State& state) {
  const auto basis = make_basis(state.range(0), state.range(1));
  set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gram_matrix(basis));
  set_num_threads(0);
}

void BM_MomentsSerial(benchmark::State& state) {
  const auto basis = make_basis(state.range(0), state.range(1));
  const Matrix y = make_observations(16, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::moment_vector(basis, y));
}

void BM_MomentsParallel(benchmark::State& state) {
  const auto basis = make_basis(state.range(0), state.range(1));
  const Matrix y = make_observations(16, state.range(0));
  set_num_threads(static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::moment_vector(basis, y));
  set_num_threads(0);
}

}  // namespace

BENCHMARK(BM_GramSerial)->Args({500, 100})->Args({1000, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Args({500, 100, 1})->Args({500, 100, 4})->Args({1000, 100, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsSerial)->Args({500, 100})->Args({1000, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsParallel)->Args({500, 100, 1})->Args({500, 100, 4})->Args({1000, 100, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
