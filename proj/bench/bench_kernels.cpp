#include <random>

#include <benchmark/benchmark.h>

#include "kcontract/kernels.hpp"

using namespace kc;

namespace {

Matrix gaussian(int r, int c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

template <Matrix (*F)(const Matrix&, int)>
void compound(benchmark::State& st) {
  const Matrix q = gaussian(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)), 1);
  const int k = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(F(q, k));
}

template <std::vector<double> (*F)(const std::vector<Matrix>&, const Matrix&, double)>
void margins(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<Matrix> verts;
  for (int v = 0; v < 32; ++v) verts.push_back(gaussian(n, n, 10 + v));
  const Matrix p = Matrix::Identity(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(F(verts, p, 0.5));
}

template <std::vector<Vector> (*F)(const VectorField&, const std::vector<Vector>&, double, double)>
void flow(benchmark::State& st) {
  const VectorField rossler = [](const Vector& x) {
    Vector d(3);
    d << -x(1) - x(2), x(0) + 0.2 * x(1), 0.2 + x(2) * (x(0) - 5.7);
    return d;
  };
  std::vector<Vector> pts;
  const Matrix r = gaussian(3, static_cast<int>(st.range(0)), 3);
  for (int i = 0; i < r.cols(); ++i) pts.push_back(r.col(i));
  for (auto _ : st) benchmark::DoNotOptimize(F(rossler, pts, 1.0, 1e-3));
}

}  // namespace

BENCHMARK(compound<kernels::serial::multiplicative_compound>)->Args({8, 3})->Args({10, 4})->Args({12, 5});
BENCHMARK(compound<kernels::omp::multiplicative_compound>)->Args({8, 3})->Args({10, 4})->Args({12, 5});
BENCHMARK(margins<kernels::serial::vertex_margins>)->Arg(4)->Arg(16);
BENCHMARK(margins<kernels::omp::vertex_margins>)->Arg(4)->Arg(16);
BENCHMARK(flow<kernels::serial::flow_points>)->Arg(256);
BENCHMARK(flow<kernels::omp::flow_points>)->Arg(256);

BENCHMARK_MAIN();
