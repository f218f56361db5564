#include <benchmark/benchmark.h>

#include <random>

#include "kinetic/distance.hpp"
#include "kinetic/holder.hpp"
#include "kinetic/kernel.hpp"
#include "kinetic/sampled_field.hpp"

using namespace kinetic;

namespace {

std::vector<Point> random_points(int d, std::size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) {
    Point z = Point::zero(d);
    z.t = u(rng);
    for (int k = 0; k < d; ++k) {
      z.x[k] = u(rng);
      z.v[k] = u(rng);
    }
    out.push_back(z);
  }
  return out;
}

void BM_left_distance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto pts = random_points(d, 256);
  const ScalingExponent s(0.5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(left_distance(pts[i % 256], pts[(i + 1) % 256], s));
    ++i;
  }
}
BENCHMARK(BM_left_distance)->Arg(1)->Arg(2)->Arg(3);

void BM_symbol(benchmark::State& state) {
  const ScalingExponent s(0.5);
  const Kernel K = state.range(0) == 0 ? Kernel::truncated_stable(1, s, 1.0) : Kernel::oscillatory(1, s, 4.0);
  double xi = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(symbol(K, xi));
    xi = xi < 8.0 ? xi * 1.01 : 1.0;
  }
}
BENCHMARK(BM_symbol)->Arg(0)->Arg(1);

void BM_fit_expansion(benchmark::State& state) {
  const ScalingExponent s(0.5);
  const int n = static_cast<int>(state.range(0));
  const auto g = GridField::sample(1, {{-0.25, 0.0, n}, {-0.125, 0.125, n}, {-0.5, 0.5, n}},
                                   [](const Point& z) { return std::cos(z.x[0] + z.v[0]) * std::exp(z.t); });
  const auto f = g.to_sampled();
  const Point base(0.0, 0.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_expansion(f, base, 1.4, s));
}
BENCHMARK(BM_fit_expansion)->Arg(5)->Arg(9);

}  // namespace
BENCHMARK_MAIN();
