#pragma once

#include <vector>

#include "imma/graph.hpp"
#include "imma/realization.hpp"
#include "imma/rng.hpp"

namespace imma {

// Nodes that reach a root through live edges in one sampled world. Members
// are sorted ascending and always include the root.
struct RRSet {
  NodeId root = 0;
  std::vector<NodeId> members;
};

RRSet sample_rr_set(const Graph& g, RngStream& rng);
RRSet sample_rr_set_from(const Graph& g, NodeId root, RngStream& rng);

// A multiset of RR sets over a fixed node-id space, with per-node coverage
// counts maintained incrementally. Append-only while generating, immutable
// while scoring.
class RRCollection {
 public:
  explicit RRCollection(int source_node_count);

  void add(RRSet set);
  int size() const { return static_cast<int>(sets_.size()); }  // theta
  int source_node_count() const { return source_node_count_; }
  const RRSet& set(int i) const { return sets_[i]; }

  int cover_count(NodeId u) const { return counts_[u]; }

  // Fraction of sets intersecting the seed set; n times this estimates the
  // expected influence spread of the seeds.
  double coverage_fraction(const std::vector<NodeId>& seeds) const;
  double coverage_fraction_single(NodeId u) const;

  // (theta - sum_i prod_{u in R_i} (1-beta_u)^x(u)) / theta; n times this
  // estimates the expected active-node count of the seeding vector.
  double lattice_coverage(const SeedingVector& x, const std::vector<double>& beta) const;

 private:
  int source_node_count_;
  std::vector<RRSet> sets_;
  std::vector<int> counts_;
};

// Appends count sets sampled from g. When a residual mapping is given, the
// roots and members are translated back to original node ids.
void generate_rr_sets(const Graph& g, int count, RngStream& rng, RRCollection& coll);
void generate_rr_sets(const ResidualGraph& residual, int count, RngStream& rng,
                      RRCollection& coll);

// Per-node score H = beta_u * F({u}) / c(<u, x(u)+1>); residual_n * H
// estimates the cost-scaled conditional marginal gain of one more trial on
// u. Throws when u is already at its trial cap.
double unit_gain_estimate(const RRCollection& coll, NodeId u, const Instance& inst,
                          const SeedingVector& x, int residual_n);

// The derived sampling parameters used by generalized_epic.
struct EpicParams {
  double delta = 0.0;
  double eps_bar = 0.0;
  double eps_hat = 0.0;
  int i_max = 0;
  double a = 0.0;
  int theta0 = 0;
};

EpicParams epic_params(int n_prime, double epsilon);

// Selects a feasible node of the residual graph whose cost-scaled marginal
// gain is within a (1-epsilon) factor of the best, in expectation. Two RR
// collections double until the validation lower bound certifies the
// selection or the round limit is reached. Returns an original node id.
NodeId generalized_epic(const ResidualGraph& residual, const Instance& inst,
                        const SeedingVector& x, double epsilon, RngStream& rng);

}  // namespace imma
