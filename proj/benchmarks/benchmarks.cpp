#include <benchmark/benchmark.h>

#include <set>
#include <vector>

#include "imma/diffusion.hpp"
#include "imma/policies.hpp"
#include "imma/ris.hpp"

using namespace imma;

namespace {

// Synthetic sparse graph shaped like a small collaboration network.
Instance bench_instance(int n, int undirected_edges, double budget) {
  RngStream rng(424242);
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> edges;
  auto push_both = [&](int u, int v) {
    edges.push_back(Edge{u, v, -1.0, false});
    edges.push_back(Edge{v, u, -1.0, false});
  };
  for (int u = 0; u < n; ++u) {
    seen.insert(std::minmax(u, (u + 1) % n));
    push_both(u, (u + 1) % n);
  }
  while (static_cast<int>(seen.size()) < undirected_edges) {
    int u = rng.uniform_int(0, n - 1);
    int v = rng.uniform_int(0, n - 1);
    if (u == v) continue;
    if (!seen.insert(std::minmax(u, v)).second) continue;
    push_both(u, v);
  }
  Graph g = default_probabilities(Graph(n, std::move(edges)));
  return make_uniform_instance(std::move(g), 0.5, 5, CostModel{}, budget);
}

void BM_SampleRRSet(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, 50.0);
  RngStream rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_rr_set(inst.graph(), rng));
}
BENCHMARK(BM_SampleRRSet);

void BM_McSigma(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, 50.0);
  RngStream rng(8);
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_sigma(inst.graph(), {0}, state.range(0), rng));
}
BENCHMARK(BM_McSigma)->Arg(100)->Arg(1000);

void BM_LatticeCoverage(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, 50.0);
  RngStream rng(9);
  RRCollection coll(inst.node_count());
  generate_rr_sets(inst.graph(), 5000, rng, coll);
  SeedingVector x = SeedingVector::zeros(inst.node_count());
  for (NodeId u = 0; u < 40; ++u) x.trials[u] = 2;
  for (auto _ : state) benchmark::DoNotOptimize(coll.lattice_coverage(x, inst.betas()));
}
BENCHMARK(BM_LatticeCoverage);

void BM_GeneralizedEpic(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, 50.0);
  ResidualGraph residual = full_residual(inst);
  SeedingVector x = SeedingVector::zeros(inst.node_count());
  RngStream rng(10);
  for (auto _ : state)
    benchmark::DoNotOptimize(generalized_epic(residual, inst, x, 0.5, rng));
}
BENCHMARK(BM_GeneralizedEpic);

void BM_SampledAdaptiveRun(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, static_cast<double>(state.range(0)));
  auto selector = sampled_adaptive_greedy_selector(0.5);
  std::uint64_t run = 0;
  for (auto _ : state) {
    RealizationOracle oracle(inst, derive_seed(11, run));
    benchmark::DoNotOptimize(run_adaptive_policy(*selector, inst, oracle, derive_seed(12, run)));
    ++run;
  }
}
BENCHMARK(BM_SampledAdaptiveRun)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SampledGreedyNonadaptive(benchmark::State& state) {
  Instance inst = bench_instance(400, 1000, 50.0);
  std::uint64_t run = 0;
  for (auto _ : state) {
    RngStream kappa(derive_seed(13, run)), omega(derive_seed(14, run));
    benchmark::DoNotOptimize(sampled_greedy_nonadaptive(inst, 5000, kappa, omega));
    ++run;
  }
}
BENCHMARK(BM_SampledGreedyNonadaptive)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
