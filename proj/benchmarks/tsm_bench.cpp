// Microbenchmarks for the simulation hot paths: raw tropical kernels, the
// machine's traced VMM, and the three end-to-end workloads.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tsm/algorithms.hpp"
#include "tsm/state_machine.hpp"
#include "tsm/tropical_core.hpp"
#include "tsm/tropical_lang.hpp"

using namespace tsm;

namespace {

TropicalMatrix random_matrix(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::uint64_t> tick(0, 7);
  std::uniform_int_distribution<int> inf_roll(0, 2);
  TropicalMatrix a(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a.at(r, c) = inf_roll(rng) == 0 ? TimeValue(tick(rng)) : kInf;
    }
  }
  return a;
}

Wavefront random_wavefront(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::uint64_t> tick(0, 7);
  std::uniform_int_distribution<int> inf_roll(0, 3);
  Wavefront w(n);
  for (auto& t : w) t = inf_roll(rng) == 0 ? kInf : TimeValue(tick(rng));
  return w;
}

alg::Graph dense_graph(std::size_t n) {
  alg::Graph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d = 0; d < n; ++d) {
      if (s != d) g.edges.push_back({s, d, 1});
    }
  }
  return g;
}

void BM_core_vmm(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(1);
  const TropicalMatrix a = random_matrix(rng, n);
  const Wavefront x = random_wavefront(rng, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vmm(a, x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_core_vmm)->Arg(8)->Arg(32)->Arg(128);

void BM_machine_vmm(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(2);
  MachineConfig mc;
  mc.width = n;
  mc.bank_count = 1;
  Machine m(mc);
  m.host_program("m0", random_matrix(rng, n));
  m.host_write("r0", random_wavefront(rng, n));
  const Instruction instr = isa::vmm("m0", "r0", "r1");
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.execute(instr));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_machine_vmm)->Arg(8)->Arg(32)->Arg(128);

void BM_dijkstra_dense(benchmark::State& state) {
  const alg::Graph g = dense_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(alg::temporal_dijkstra(g, "n0"));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(g.edges.size()));
}
BENCHMARK(BM_dijkstra_dense)->Arg(8)->Arg(16)->Arg(32);

void BM_nw(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> base(0, 3);
  const char* alphabet = "GATC";
  alg::AlignmentProblem p;
  for (std::size_t i = 0; i < n; ++i) {
    p.x.push_back(alphabet[base(rng)]);
    p.y.push_back(alphabet[base(rng)]);
  }
  p.sigma = 2;
  p.m = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alg::temporal_nw(p));
  }
}
BENCHMARK(BM_nw)->Arg(4)->Arg(8)->Arg(16);

void BM_closure(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(4);
  const TropicalMatrix a = random_matrix(rng, n);
  const Wavefront x = make_onehot(n, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alg::closure(a, x, n - 1));
  }
}
BENCHMARK(BM_closure)->Arg(8)->Arg(32);

void BM_eval(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(5);
  lang::Bindings b{{"a", random_wavefront(rng, n)},
                   {"b", random_wavefront(rng, n)},
                   {"c", random_wavefront(rng, n)}};
  MachineConfig cfg;
  cfg.range.bits = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        lang::evaluate("a + (b -| (c * 3)) ^ (a * b)", b, cfg));
  }
}
BENCHMARK(BM_eval)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
