#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "imma/graph.hpp"
#include "imma/policies.hpp"
#include "imma/realization.hpp"

namespace imma {

// Exhaustive reference implementations for desk-scale instances. Everything
// here enumerates worlds outright, so the caps are hard limits, not tuning
// knobs.

inline constexpr int kDefaultEdgeCap = 20;
inline constexpr int kDefaultSupportCap = 20;

// Expected spread of a seed set: sum over all 2^m edge worlds of
// spread * probability.
double exact_sigma(const Graph& g, const std::vector<NodeId>& seeds,
                   int max_edges = kDefaultEdgeCap);

// Expected active-node count of a seeding vector: sum over seed subsets of
// the support, weighted by their activation probability, of exact_sigma.
double exact_mu(const Instance& inst, const SeedingVector& x,
                int max_edges = kDefaultEdgeCap, int max_support = kDefaultSupportCap);

// Conditional expected marginal gain of one more trial on u, computed two
// independent ways: by direct enumeration over the worlds consistent with
// psi, and as beta_u times the exact single-seed spread on the residual
// graph. The two must agree within tol (psi must come from an actual
// trial/observation sequence); disagreement throws ContractError.
double exact_marginal_gain(const Instance& inst, const SeedingVector& x,
                           const PartialRealization& psi, NodeId u, double tol = 1e-9);

// All full-adoption closures that can follow the activation of `seed`,
// with their probabilities. `psi` must have the seed active and awaiting
// diffusion; each branch resolves edges until no active node has an
// unresolved out-edge.
std::vector<std::pair<PartialRealization, double>> enumerate_diffusion_branches(
    const Instance& inst, const PartialRealization& psi, NodeId seed);

// Every (x, psi) state obtainable by some sequence of trials on inactive
// nodes with full-adoption feedback, deduplicated by content. The seeding
// vector of a state is its per-node resolved trial count.
struct ReachableState {
  SeedingVector x;
  PartialRealization psi;
};

std::vector<ReachableState> enumerate_reachable_states(const Instance& inst,
                                                       std::size_t state_cap = 500000);

// Exact expected policy value by recursive branch expansion over trial
// outcomes, diffusion closures, the budget gate, and the selector's choice
// distribution. The selector must be deterministic given (x, psi) or
// expose its distribution. probability_mass sums the enumerated branch
// weights and must come out 1.
struct PolicyValue {
  double value = 0.0;
  double probability_mass = 0.0;
};

PolicyValue exact_policy_value(const Instance& inst, NodeSelector& selector);

// Best achievable expected spread over all adaptive decision trees under
// the expected knapsack: an overshooting trial is taken through the
// randomized truncation gate, anything else must fit the budget outright.
// Dominates every gated policy, the greedy included.
double optimal_policy_value(const Instance& inst);

// Pluggable gain for the property checkers; defaults to exact_marginal_gain.
using GainFunction = std::function<double(const Instance&, const SeedingVector&,
                                          const PartialRealization&, NodeId)>;

struct Violation {
  std::string what;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ViolationReport {
  std::vector<Violation> items;
  bool empty() const { return items.empty(); }
  std::string to_text() const;
};

// Checks that every feasible gain over every reachable state is
// nonnegative (within 1e-9).
ViolationReport check_adaptive_monotone(const Instance& inst, const GainFunction& gain = {});

// Checks the diminishing-gain inequality over every reachable state pair
// ordered by the lattice/subrealization order (within 1e-9).
ViolationReport check_adaptive_dr_submodular(const Instance& inst,
                                             const GainFunction& gain = {});

}  // namespace imma
