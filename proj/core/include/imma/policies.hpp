#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imma/diffusion.hpp"
#include "imma/graph.hpp"
#include "imma/realization.hpp"
#include "imma/ris.hpp"
#include "imma/rng.hpp"

namespace imma {

// Cost comparisons carry this absolute slack; the budget is a real number.
inline constexpr double kCostSlack = 1e-12;

// Everything a selector may look at when choosing the next trial. kappa is
// the policy's own randomness, omega drives any sampling the selector does.
struct SelectionContext {
  const Instance& inst;
  const SeedingVector& x;
  const PartialRealization& psi;
  const ResidualGraph& residual;
  RngStream& kappa;
  RngStream& omega;
};

// Strategy interface: produce a feasible node (inactive, below its trial
// cap) or nothing when no such node exists. Active nodes are never picked;
// their marginal gain is identically zero.
class NodeSelector {
 public:
  virtual ~NodeSelector() = default;
  virtual std::optional<NodeId> select(const SelectionContext& ctx) = 0;
  virtual std::string name() const = 0;

  // Choice distribution for exact policy-value enumeration. The default
  // covers selectors that consume no randomness; randomized selectors
  // override it.
  virtual std::vector<std::pair<NodeId, double>> selection_distribution(
      const SelectionContext& ctx);
};

// Estimator of the conditional expected marginal gain of one more trial on
// an inactive node, given the current observations.
class GainEstimator {
 public:
  virtual ~GainEstimator() = default;
  virtual double estimate(const SelectionContext& ctx, NodeId u) = 0;
  virtual std::string name() const = 0;
};

// beta_u times the exactly enumerated single-seed spread on the residual
// graph. Desk-scale instances only.
class ExactGainEstimator : public GainEstimator {
 public:
  explicit ExactGainEstimator(int max_edges = 20) : max_edges_(max_edges) {}
  double estimate(const SelectionContext& ctx, NodeId u) override;
  std::string name() const override { return "exact"; }

 private:
  int max_edges_;
};

// beta_u times a Monte-Carlo estimate of the single-seed spread on the
// residual graph.
class McGainEstimator : public GainEstimator {
 public:
  explicit McGainEstimator(long n_sims) : n_sims_(n_sims) {}
  double estimate(const SelectionContext& ctx, NodeId u) override;
  std::string name() const override { return "mc"; }

 private:
  long n_sims_;
};

enum class HeuristicKind { kRandom, kMaxDegree, kMaxProb, kMaxDegreeProb };

// Greedy on estimated gain per next-trial cost; ties go to the lower
// next-trial cost, then the lower id. All-zero gains fall back to the
// cheapest next trial.
std::unique_ptr<NodeSelector> adaptive_greedy_selector(GainEstimator& estimator);

// Delegates each pick to generalized_epic on the current residual graph.
std::unique_ptr<NodeSelector> sampled_adaptive_greedy_selector(double epsilon);

// Random / degree / probability heuristics; out-degree is measured in the
// original graph.
std::unique_ptr<NodeSelector> heuristic_selector(HeuristicKind kind);

const char* heuristic_name(HeuristicKind kind);

// Randomized inclusion of a trial that would overshoot the budget: proceed
// with probability (k - spent) / next_cost, which keeps the expected total
// cost within k.
enum class GateDecision { kProceed, kStop };

GateDecision budget_gate(double spent, double budget, double next_cost, RngStream& kappa);

// Upper bound on policy iterations: sort first-trial costs ascending; the
// full node count if they all fit in the budget, otherwise the shortest
// prefix whose cost reaches it.
int max_iterations_r(const Instance& inst, double budget);

struct TrialRecord {
  NodeId node = 0;
  int trial_index = 0;
  double cost = 0.0;
  bool success = false;
  int cumulative_spread = 0;
};

// Complete record of one policy run: the trial log, the final seeding
// vector and observations, the realized spread and cost, and the seeds of
// the streams that drove it.
struct PolicyTrace {
  std::vector<TrialRecord> trials;
  SeedingVector final_x;
  PartialRealization final_psi;
  int realized_spread = 0;
  double total_cost = 0.0;
  int iterations = 0;
  std::uint64_t kappa_seed = 0;
  std::uint64_t omega_seed = 0;
  std::uint64_t phi_seed = 0;

  // One trial per line: node, index, cost, outcome, cumulative spread.
  std::string to_log() const;
};

// Shared skeleton of every adaptive policy: select, gate, trial, observe,
// shrink the residual graph, until the budget or the feasible set runs out.
// run_seed spawns the kappa and omega streams; the oracle carries phi.
PolicyTrace run_adaptive_policy(NodeSelector& selector, const Instance& inst,
                                RealizationOracle& oracle, std::uint64_t run_seed);

// Non-adaptive greedy on the expected active-node count: each step adds the
// feasible trial with the best unit marginal gain of the mu evaluator, with
// the budget gate on the final overshooting pick.
SeedingVector greedy_nonadaptive(const Instance& inst,
                                 const std::function<double(const SeedingVector&)>& mu_eval,
                                 RngStream& kappa);

// Non-adaptive greedy on one RR collection of the full graph, scoring unit
// marginal lattice coverage per cost. The theta overload samples the
// collection itself; the other runs on a caller-provided one.
SeedingVector sampled_greedy_nonadaptive(const Instance& inst, long theta, RngStream& kappa,
                                         RngStream& omega);
SeedingVector sampled_greedy_nonadaptive(const Instance& inst, const RRCollection& coll,
                                         RngStream& kappa);

// Executes every trial of a fixed seeding vector against the oracle and
// observes the resulting diffusion; the realized cost of a non-adaptive
// policy is the full schedule cost of x.
PolicyTrace execute_seeding_vector(const Instance& inst, const SeedingVector& x,
                                   RealizationOracle& oracle);

}  // namespace imma
