#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "crackpath/material.hpp"
#include "crackpath/metrics.hpp"
#include "crackpath/sampling.hpp"
#include "crackpath/solver.hpp"

using namespace crackpath;

namespace {

MaterialField random_field(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MaterialField field;
  for (std::size_t k = 0; k < count; ++k) field.centers.push_back({u(rng), u(rng)});
  return field;
}

void BM_RigidityRatio(benchmark::State& state) {
  const auto field = random_field(static_cast<std::size_t>(state.range(0)), 1);
  double x = 0.0;
  for (auto _ : state) {
    x = x > 0.99 ? 0.0 : x + 0.0137;
    benchmark::DoNotOptimize(rigidity_ratio({x, 1.0 - x}, field));
  }
}
BENCHMARK(BM_RigidityRatio)->Arg(20)->Arg(200);

void BM_RasterizeRigidity(benchmark::State& state) {
  const auto field = random_field(150, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_rigidity(field, 64));
}
BENCHMARK(BM_RasterizeRigidity)->Unit(benchmark::kMillisecond);

void BM_MeshBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_structured_mesh(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_MeshBuild)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ElasticSolve(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(static_cast<std::size_t>(state.range(0)));
  const auto params = derive_params(210000.0, 0.3, 2.7, 2445.42, 0.05);
  const auto constraints = dataset_constraints(mesh, 1e-3);
  ElasticSolver solver(mesh, quadrature_ratios(mesh, random_field(100, 3)), params, constraints.u_fixed);
  std::vector<double> phi(mesh.num_nodes(), 0.0);
  solver.solve(phi, constraints);
  for (auto _ : state) {
    phi[mesh.num_nodes() / 2] += 1e-3;  // new field each time, reuses the stale factor
    benchmark::DoNotOptimize(solver.solve(phi, constraints));
  }
  state.counters["factorizations"] = static_cast<double>(solver.factorizations());
}
BENCHMARK(BM_ElasticSolve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DamageSolve(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(static_cast<std::size_t>(state.range(0)));
  const auto params = derive_params(210000.0, 0.3, 2.7, 2445.42, 0.05);
  std::vector<double> history(mesh.num_elements() * 3);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < 3; ++q) {
      const Point x = quadrature_point(mesh, e, q);
      history[3 * e + q] = 40.0 * std::exp(-200.0 * (x.y - 0.5) * (x.y - 0.5));
    }
  auto provider = assemble_damage_subproblem(mesh, MaterialField{}, history, params, {});
  const std::vector<double> zero(mesh.num_nodes(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_damage(provider, zero));
}
BENCHMARK(BM_DamageSolve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SampleToRaster(benchmark::State& state) {
  const Mesh mesh = build_structured_mesh(100);
  std::vector<double> nodal(mesh.num_nodes());
  for (std::size_t k = 0; k < nodal.size(); ++k) nodal[k] = mesh.nodes[k].x * mesh.nodes[k].y;
  for (auto _ : state) benchmark::DoNotOptimize(sample_to_raster(mesh, nodal, 256));
}
BENCHMARK(BM_SampleToRaster)->Unit(benchmark::kMillisecond);

void BM_Continuity(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution on(0.4);
  BinaryRaster raster(256, "crack");
  for (auto& v : raster.values) v = on(rng);
  for (auto _ : state) benchmark::DoNotOptimize(is_continuous(raster));
}
BENCHMARK(BM_Continuity)->Unit(benchmark::kMicrosecond);

void BM_F1(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution on(0.1);
  BinaryRaster a(256, "crack"), b(256, "crack");
  for (auto& v : a.values) v = on(rng);
  for (auto& v : b.values) v = on(rng);
  for (auto _ : state) benchmark::DoNotOptimize(f1_score(a, b));
}
BENCHMARK(BM_F1)->Unit(benchmark::kMicrosecond);

void BM_SplineGradient(benchmark::State& state) {
  FieldRaster field(256, "ux");
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t j = 0; j < 256; ++j) field.at(i, j) = std::sin(0.05 * static_cast<double>(i * j));
  for (auto _ : state) benchmark::DoNotOptimize(spline_gradient(field, 1.0 / 256, Axis::X));
}
BENCHMARK(BM_SplineGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
