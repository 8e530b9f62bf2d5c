#pragma once

#include <utility>
#include <vector>

#include "imma/graph.hpp"
#include "imma/realization.hpp"
#include "imma/rng.hpp"

namespace imma {

// A Monte-Carlo estimate with its sample standard error, so callers can use
// distribution-aware tolerances.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Number of nodes reachable from the seed set through live edges, seeds
// included. Every edge state must be resolved.
int spread(const Graph& g, const std::vector<std::uint8_t>& edge_live,
           const std::vector<NodeId>& seeds);

// Mean spread over n_sims independent worlds; edges are sampled lazily per
// simulation, each edge at most once when its source first activates.
Estimate mc_sigma(const Graph& g, const std::vector<NodeId>& seeds, long n_sims,
                  RngStream& rng);

// The reduction of expected lattice spread to plain influence spread: one
// virtual node per original node, wired to it with activation probability
// 1 - (1 - beta_u)^x(u). Seeding all virtual nodes and subtracting |V|
// recovers the expected active-node count of x.
struct ConstructedGraph {
  Graph graph;
  std::vector<NodeId> virtual_seeds;
};

ConstructedGraph constructed_graph(const Instance& inst, const SeedingVector& x);

// Unbiased estimate of the expected active-node count under seeding vector
// x: per simulation each node joins the seed set independently with
// probability 1 - (1 - beta_u)^x(u), then diffusion runs as usual.
Estimate mc_mu(const Instance& inst, const SeedingVector& x, long n_sims, RngStream& rng);

// What one activation revealed: the nodes that became active (the seed
// first) and the edge states observed, in traversal order.
struct DiffusionOutcome {
  std::vector<NodeId> newly_active;
  std::vector<std::pair<int, bool>> observations;  // (edge id, live)
};

// Full-adoption feedback for a just-activated seed: walks live edges from
// the seed (ascending node-id order), resolving every out-edge of every
// reached node through the oracle and recording the states into psi.
// Inactive endpoints of live edges become active and are walked in turn.
DiffusionOutcome observe_diffusion(RealizationOracle& oracle, PartialRealization& psi,
                                   NodeId seed);

}  // namespace imma
