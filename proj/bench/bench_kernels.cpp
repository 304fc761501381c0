#include <benchmark/benchmark.h>

#include <random>

#include "matmoment/kernels.hpp"

using namespace matmoment;

namespace {

std::vector<double> random_blocks(std::size_t blocks, std::size_t q) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> y(blocks * q * q);
  for (auto& v : y) v = n(rng);
  return y;
}

kernels::MomentJob random_job(std::size_t atoms) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  kernels::MomentJob job;
  job.d = 2;
  for (std::size_t i = 0; i < atoms; ++i) {
    job.coords.push_back({n(rng), n(rng)});
    job.masses.push_back(HermMat::identity(3));
  }
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) job.alphas.push_back({a, b});
  return job;
}

template <void (*Fn)(double*, std::size_t, std::size_t)>
void BM_psd_project(benchmark::State& state) {
  std::size_t blocks = state.range(0);
  auto base = random_blocks(blocks, 3);
  for (auto _ : state) {
    auto y = base;
    Fn(y.data(), blocks, 3);
    benchmark::DoNotOptimize(y.data());
  }
}

template <void (*Fn)(const RMatrix&, const double*, const double*, double*)>
void BM_affine(benchmark::State& state) {
  std::size_t rows = state.range(0);
  RMatrix p(rows, 256);
  p.data = random_blocks(rows * 256, 1);
  auto x = random_blocks(256, 1), off = random_blocks(rows, 1);
  std::vector<double> out(rows);
  for (auto _ : state) {
    Fn(p, x.data(), off.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

template <std::vector<HermMat> (*Fn)(const kernels::MomentJob&, std::size_t)>
void BM_moments(benchmark::State& state) {
  auto job = random_job(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(job, 3));
}

}  // namespace

BENCHMARK(BM_psd_project<kernels::serial::psd_project_blocks>)->Name("psd_project/serial")->Arg(64)->Arg(4096);
BENCHMARK(BM_psd_project<kernels::parallel::psd_project_blocks>)->Name("psd_project/openmp")->Arg(64)->Arg(4096);
BENCHMARK(BM_affine<kernels::serial::affine_map>)->Name("affine_map/serial")->Arg(256)->Arg(8192);
BENCHMARK(BM_affine<kernels::parallel::affine_map>)->Name("affine_map/openmp")->Arg(256)->Arg(8192);
BENCHMARK(BM_moments<kernels::serial::accumulate_moments>)->Name("moments/serial")->Arg(16)->Arg(1024);
BENCHMARK(BM_moments<kernels::parallel::accumulate_moments>)->Name("moments/openmp")->Arg(16)->Arg(1024);

BENCHMARK_MAIN();
