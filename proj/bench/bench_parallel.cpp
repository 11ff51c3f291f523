// OpenMP kernels against their serial references.

#include <random>

#include <benchmark/benchmark.h>

#include "mlrfe/gridtab.hpp"
#include "mlrfe/opo.hpp"
#include "mlrfe/spatial.hpp"

using namespace mlrfe;

namespace {

LookupTable random_table(std::size_t dims, std::size_t per_axis, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> axes(dims);
  for (auto& axis : axes)
    for (std::size_t k = 0; k < per_axis; ++k)
      axis.push_back(k == 0 ? 0.0 : static_cast<double>(k) + 0.5 * u(rng));
  Grid g = make_grid(axes);
  std::vector<double> values(g.num_points());
  for (auto& v : values) v = u(rng);
  return make_table(std::move(g), std::move(values));
}

struct BatchCase {
  LookupTable table;
  std::vector<double> points;
};

BatchCase batch_case(std::size_t dims, std::size_t count) {
  std::mt19937_64 rng(dims);
  BatchCase c{random_table(dims, 10, rng), {}};
  std::uniform_real_distribution<double> u(0.0, 9.0);
  c.points.resize(dims * count);
  for (auto& p : c.points) p = u(rng);
  return c;
}

template <auto Fn>
void interpolation(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  const BatchCase c = batch_case(dims, 100000);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(c.table, c.points));
  state.SetItemsProcessed(state.iterations() * 100000);
}

template <auto Fn>
void enumeration(benchmark::State& state) {
  const Scenario& sc = find_scenario(state.range(0) == 1 ? "S1" : "S2");
  const ProblemIR ir = build_opo_instance(sc.shape(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(ir, OracleOptions{}));
}

}  // namespace

BENCHMARK(interpolation<interpolate_batch_serial>)->Name("interpolate/serial")->DenseRange(1, 4);
BENCHMARK(interpolation<interpolate_batch>)->Name("interpolate/openmp")->DenseRange(1, 4);
BENCHMARK(enumeration<enumerate_oracle_serial>)->Name("oracle/serial")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(enumeration<enumerate_oracle>)->Name("oracle/openmp")->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
