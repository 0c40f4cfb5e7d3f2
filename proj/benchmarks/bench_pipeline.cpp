#include <benchmark/benchmark.h>

#include "support/synthetic.hpp"
#include "vplate/channel.hpp"
#include "vplate/contours.hpp"
#include "vplate/elevation.hpp"

namespace {

vplate::TriangleMesh bench_plate(double spacing) {
  vplate::testing::ArchedPlateSpec spec;
  spec.mesh_spacing = spacing;
  return vplate::testing::make_arched_plate(spec).mesh;
}

void BM_PlaneMeshIntersection(benchmark::State& state) {
  const auto plate = bench_plate(1.0);
  for (auto _ : state) {
    auto lines = vplate::plane_mesh_intersection(plate, vplate::Plane::horizontal(5.0));
    benchmark::DoNotOptimize(lines);
  }
}
BENCHMARK(BM_PlaneMeshIntersection)->Unit(benchmark::kMillisecond);

void BM_ContourLines(benchmark::State& state) {
  const auto plate = bench_plate(1.0);
  for (auto _ : state) {
    auto set = vplate::contour_lines(plate, 1.0);
    benchmark::DoNotOptimize(set);
  }
}
BENCHMARK(BM_ContourLines)->Unit(benchmark::kMillisecond);

void BM_ResampleGrid(benchmark::State& state) {
  const auto plate = bench_plate(1.0);
  for (auto _ : state) {
    auto grid = vplate::resample_grid(plate, 0.25, vplate::PlateSide::SoundBoard, 1);
    benchmark::DoNotOptimize(grid);
  }
}
BENCHMARK(BM_ResampleGrid)->Unit(benchmark::kMillisecond);

void BM_ChannelPoints(benchmark::State& state) {
  const auto plate = bench_plate(1.0);
  const auto grid = vplate::resample_grid(plate, 0.25, vplate::PlateSide::SoundBoard, 1);
  const vplate::ChannelParams params{2.0, 2, {0.3, std::nullopt}};
  for (auto _ : state) {
    auto points = vplate::channel_points(grid, params, "bench", 1);
    benchmark::DoNotOptimize(points);
  }
}
BENCHMARK(BM_ChannelPoints)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
