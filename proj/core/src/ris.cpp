#include "imma/ris.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imma/errors.hpp"

namespace imma {

RRSet sample_rr_set(const Graph& g, RngStream& rng) {
  if (g.node_count() == 0) throw ValidationError("sample_rr_set: empty graph");
  NodeId root = rng.uniform_int(0, g.node_count() - 1);
  return sample_rr_set_from(g, root, rng);
}

RRSet sample_rr_set_from(const Graph& g, NodeId root, RngStream& rng) {
  RRSet set;
  set.root = root;
  std::vector<std::uint8_t> visited(g.node_count(), 0);
  std::vector<NodeId> frontier{root};
  visited[root] = 1;
  set.members.push_back(root);
  // Reverse walk: each in-edge of a reached node is drawn once.
  while (!frontier.empty()) {
    NodeId v = frontier.back();
    frontier.pop_back();
    for (int e : g.in_edges(v)) {
      const Edge& ed = g.edge(e);
      if (!rng.bernoulli(ed.prob)) continue;
      if (visited[ed.src]) continue;
      visited[ed.src] = 1;
      set.members.push_back(ed.src);
      frontier.push_back(ed.src);
    }
  }
  std::sort(set.members.begin(), set.members.end());
  return set;
}

RRCollection::RRCollection(int source_node_count)
    : source_node_count_(source_node_count), counts_(source_node_count, 0) {}

void RRCollection::add(RRSet set) {
  for (NodeId u : set.members) ++counts_[u];
  sets_.push_back(std::move(set));
}

double RRCollection::coverage_fraction(const std::vector<NodeId>& seeds) const {
  if (size() == 0) throw ValidationError("coverage_fraction: empty collection");
  std::vector<std::uint8_t> in_seeds(source_node_count_, 0);
  for (NodeId s : seeds) in_seeds[s] = 1;
  int covered = 0;
  for (const RRSet& r : sets_)
    for (NodeId u : r.members)
      if (in_seeds[u]) {
        ++covered;
        break;
      }
  return static_cast<double>(covered) / size();
}

double RRCollection::coverage_fraction_single(NodeId u) const {
  if (size() == 0) throw ValidationError("coverage_fraction: empty collection");
  return static_cast<double>(counts_[u]) / size();
}

double RRCollection::lattice_coverage(const SeedingVector& x,
                                      const std::vector<double>& beta) const {
  if (size() == 0) throw ValidationError("lattice_coverage: empty collection");
  double miss = 0.0;
  for (const RRSet& r : sets_) {
    double none_active = 1.0;
    for (NodeId u : r.members)
      if (x[u] > 0) none_active *= std::pow(1.0 - beta[u], x[u]);
    miss += none_active;
  }
  return (size() - miss) / size();
}

void generate_rr_sets(const Graph& g, int count, RngStream& rng, RRCollection& coll) {
  for (int i = 0; i < count; ++i) coll.add(sample_rr_set(g, rng));
}

void generate_rr_sets(const ResidualGraph& residual, int count, RngStream& rng,
                      RRCollection& coll) {
  for (int i = 0; i < count; ++i) {
    RRSet local = sample_rr_set(residual.graph, rng);
    RRSet mapped;
    mapped.root = residual.to_original[local.root];
    mapped.members.reserve(local.members.size());
    // to_original is increasing, so sorted local members stay sorted.
    for (NodeId v : local.members) mapped.members.push_back(residual.to_original[v]);
    coll.add(std::move(mapped));
  }
}

double unit_gain_estimate(const RRCollection& coll, NodeId u, const Instance& inst,
                          const SeedingVector& x, int residual_n) {
  if (x[u] >= inst.cap(u))
    throw ValidationError("unit_gain_estimate: node " + std::to_string(u) +
                          " already at its trial cap");
  (void)residual_n;  // scale factor applied by callers
  double f = coll.coverage_fraction_single(u);
  return inst.beta(u) * f / inst.trial_cost(u, x[u] + 1);
}

EpicParams epic_params(int n_prime, double epsilon) {
  if (n_prime < 1) throw ValidationError("epic_params: empty residual graph");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ValidationError("epic_params: epsilon outside (0,1)");
  EpicParams p;
  p.delta = 0.01 * epsilon / n_prime;
  p.eps_bar = (epsilon - p.delta * n_prime) / (1.0 - p.delta * n_prime);
  p.eps_hat = p.eps_bar / (1.0 - p.eps_bar);
  double rounds = std::ceil(
      std::log2((2.0 + 2.0 * p.eps_hat / 3.0) * n_prime / (p.eps_hat * p.eps_hat)));
  // The round count can go nonpositive for tiny residual graphs with large
  // epsilon; one round is the minimum that returns anything.
  p.i_max = std::max(1, static_cast<int>(rounds) + 1);
  p.a = std::log(2.0 * p.i_max / p.delta);
  p.theta0 = std::max(1, static_cast<int>(std::ceil(std::log(2.0 / p.delta) +
                                                    std::log(static_cast<double>(n_prime)))));
  return p;
}

NodeId generalized_epic(const ResidualGraph& residual, const Instance& inst,
                        const SeedingVector& x, double epsilon, RngStream& rng) {
  const int n_prime = residual.graph.node_count();
  EpicParams params = epic_params(n_prime, epsilon);

  std::vector<NodeId> feasible;  // original ids
  for (NodeId v = 0; v < n_prime; ++v) {
    NodeId orig = residual.to_original[v];
    if (x[orig] < inst.cap(orig)) feasible.push_back(orig);
  }
  if (feasible.empty())
    throw ValidationError("generalized_epic: no feasible node in the residual graph");

  RRCollection primary(inst.node_count());
  RRCollection validation(inst.node_count());
  generate_rr_sets(residual, params.theta0, rng, primary);
  generate_rr_sets(residual, params.theta0, rng, validation);

  auto score = [&](const RRCollection& coll, NodeId u) {
    return inst.beta(u) * coll.coverage_fraction_single(u) / inst.trial_cost(u, x[u] + 1);
  };
  auto cheapest_feasible = [&]() {
    NodeId best = feasible.front();
    double best_cost = inst.trial_cost(best, x[best] + 1);
    for (NodeId u : feasible) {
      double c = inst.trial_cost(u, x[u] + 1);
      if (c < best_cost) {
        best = u;
        best_cost = c;
      }
    }
    return best;
  };

  for (int round = 1; round <= params.i_max; ++round) {
    NodeId selected = feasible.front();
    double best = -1.0;
    for (NodeId u : feasible) {
      double h = score(primary, u);
      if (h > best) {
        best = h;
        selected = u;
      }
    }
    double upper = best;  // argmax value dominates every feasible node's score
    if (upper <= 0.0) {
      // Nothing feasible covers any set: all estimated gains are zero, so
      // take the cheapest next trial.
      return cheapest_feasible();
    }
    double theta2 = validation.size();
    double h2 = score(validation, selected);
    double root_term = std::sqrt(h2 + 2.0 * params.a / (9.0 * theta2)) -
                       std::sqrt(params.a / (2.0 * theta2));
    double lower = root_term * root_term - params.a / (18.0 * theta2);
    if (lower / upper >= 1.0 - params.eps_bar || round == params.i_max) return selected;
    generate_rr_sets(residual, primary.size(), rng, primary);
    generate_rr_sets(residual, validation.size(), rng, validation);
  }
  throw ContractError("generalized_epic: unreachable");
}

}  // namespace imma
