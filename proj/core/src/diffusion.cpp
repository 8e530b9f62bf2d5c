#include "imma/diffusion.hpp"

#include <cmath>
#include <queue>

#include "imma/errors.hpp"

namespace imma {

int spread(const Graph& g, const std::vector<std::uint8_t>& edge_live,
           const std::vector<NodeId>& seeds) {
  if (static_cast<int>(edge_live.size()) != g.edge_count())
    throw ValidationError("spread: edge state vector size mismatch");
  std::vector<std::uint8_t> reached(g.node_count(), 0);
  std::vector<NodeId> frontier;
  for (NodeId s : seeds) {
    if (reached[s]) continue;
    reached[s] = 1;
    frontier.push_back(s);
  }
  int count = static_cast<int>(frontier.size());
  while (!frontier.empty()) {
    NodeId u = frontier.back();
    frontier.pop_back();
    for (int e : g.out_edges(u)) {
      if (!edge_live[e]) continue;
      NodeId v = g.edge(e).dst;
      if (reached[v]) continue;
      reached[v] = 1;
      ++count;
      frontier.push_back(v);
    }
  }
  return count;
}

namespace {

// One lazy IC simulation: each out-edge gets a single draw when its source
// first becomes active. Returns the active-node count.
int simulate_cascade(const Graph& g, const std::vector<NodeId>& seeds,
                     std::vector<int>& mark, int stamp, RngStream& rng) {
  std::queue<NodeId> frontier;
  int count = 0;
  for (NodeId s : seeds) {
    if (mark[s] == stamp) continue;
    mark[s] = stamp;
    ++count;
    frontier.push(s);
  }
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (int e : g.out_edges(u)) {
      const Edge& ed = g.edge(e);
      if (!rng.bernoulli(ed.prob)) continue;
      if (mark[ed.dst] == stamp) continue;
      mark[ed.dst] = stamp;
      ++count;
      frontier.push(ed.dst);
    }
  }
  return count;
}

Estimate summarize(double sum, double sum_sq, long n) {
  Estimate est;
  est.samples = n;
  est.value = sum / static_cast<double>(n);
  if (n > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
    est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  }
  return est;
}

}  // namespace

Estimate mc_sigma(const Graph& g, const std::vector<NodeId>& seeds, long n_sims,
                  RngStream& rng) {
  if (n_sims < 1) throw ValidationError("mc_sigma: n_sims must be >= 1");
  std::vector<int> mark(g.node_count(), 0);
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 1; s <= n_sims; ++s) {
    int size = simulate_cascade(g, seeds, mark, static_cast<int>(s), rng);
    sum += size;
    sum_sq += static_cast<double>(size) * size;
  }
  return summarize(sum, sum_sq, n_sims);
}

ConstructedGraph constructed_graph(const Instance& inst, const SeedingVector& x) {
  const Graph& g = inst.graph();
  const int n = g.node_count();
  if (x.size() != n) throw ValidationError("constructed_graph: seeding vector size mismatch");
  std::vector<Edge> edges = g.edges();
  ConstructedGraph built;
  built.virtual_seeds.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    if (x[u] < 0 || x[u] > inst.cap(u))
      throw ValidationError("constructed_graph: x[" + std::to_string(u) + "] outside 0..b(u)");
    NodeId virt = n + u;
    built.virtual_seeds.push_back(virt);
    // x(u) = 0 would give probability 0; the edge is omitted but the virtual
    // node still counts itself as a seed, so the identity stays exact.
    if (x[u] > 0) {
      double p = 1.0 - std::pow(1.0 - inst.beta(u), x[u]);
      if (p > 0.0) edges.push_back(Edge{virt, u, p, true});
    }
  }
  built.graph = Graph(2 * n, std::move(edges));
  return built;
}

Estimate mc_mu(const Instance& inst, const SeedingVector& x, long n_sims, RngStream& rng) {
  if (n_sims < 1) throw ValidationError("mc_mu: n_sims must be >= 1");
  const Graph& g = inst.graph();
  const int n = g.node_count();
  if (x.size() != n) throw ValidationError("mc_mu: seeding vector size mismatch");
  std::vector<double> seed_prob(n);
  std::vector<NodeId> candidates;
  for (NodeId u = 0; u < n; ++u) {
    if (x[u] < 0 || x[u] > inst.cap(u))
      throw ValidationError("mc_mu: x[" + std::to_string(u) + "] outside 0..b(u)");
    seed_prob[u] = 1.0 - std::pow(1.0 - inst.beta(u), x[u]);
    if (seed_prob[u] > 0.0) candidates.push_back(u);
  }
  std::vector<int> mark(n, 0);
  std::vector<NodeId> seeds;
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 1; s <= n_sims; ++s) {
    seeds.clear();
    for (NodeId u : candidates)
      if (rng.bernoulli(seed_prob[u])) seeds.push_back(u);
    int size = simulate_cascade(g, seeds, mark, static_cast<int>(s), rng);
    sum += size;
    sum_sq += static_cast<double>(size) * size;
  }
  return summarize(sum, sum_sq, n_sims);
}

DiffusionOutcome observe_diffusion(RealizationOracle& oracle, PartialRealization& psi,
                                   NodeId seed) {
  const Instance& inst = oracle.instance();
  const Graph& g = inst.graph();
  if (seed < 0 || seed >= g.node_count())
    throw ContractError("observe_diffusion: seed id out of range");
  if (!psi.awaiting_diffusion(seed))
    throw ContractError("observe_diffusion: node " + std::to_string(seed) +
                        " is not a newly activated seed");

  DiffusionOutcome outcome;
  // Ascending node-id queue keeps replay and observation order canonical.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<NodeId>> frontier;
  psi.mark_diffused(seed);
  outcome.newly_active.push_back(seed);
  frontier.push(seed);
  while (!frontier.empty()) {
    NodeId u = frontier.top();
    frontier.pop();
    for (int e : g.out_edges(u)) {
      bool live;
      if (psi.edge_state(e) != TriState::kUnknown) {
        live = psi.edge_state(e) == TriState::kYes;
      } else {
        live = oracle.edge_live(e);
        psi.record_edge(e, live);
        outcome.observations.emplace_back(e, live);
      }
      if (!live) continue;
      NodeId v = g.edge(e).dst;
      if (psi.is_active(v)) continue;
      psi.activate_via_edge(v);
      outcome.newly_active.push_back(v);
      frontier.push(v);
    }
  }
  return outcome;
}

}  // namespace imma
