#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imma/errors.hpp"

namespace imma {

using NodeId = int;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double prob = -1.0;        // diffusion probability p_uv, in (0,1] once resolved
  bool prob_explicit = false;  // true when the input file carried a probability
};

// Directed probabilistic graph. Node ids are dense 0..n-1; forward and
// reverse adjacency are kept as edge-id lists so that the reverse index is
// the exact transpose of the forward one. Parallel edges and self-loops are
// allowed; each parallel edge is live or blocked independently.
class Graph {
 public:
  Graph() = default;
  Graph(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int edge_id) const { return edges_[edge_id]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Edge ids leaving u / entering v, in input order.
  std::span<const int> out_edges(NodeId u) const { return out_[u]; }
  std::span<const int> in_edges(NodeId v) const { return in_[v]; }
  int out_degree(NodeId u) const { return static_cast<int>(out_[u].size()); }
  int in_degree(NodeId v) const { return static_cast<int>(in_[v].size()); }

  bool all_probabilities_resolved() const;

  // Graph with every edge reversed; transpose of the transpose reproduces
  // the original adjacency.
  Graph transpose() const;

  // Original input labels per node id; empty means labels == ids.
  const std::vector<long long>& original_labels() const { return labels_; }
  void set_original_labels(std::vector<long long> labels);

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<long long> labels_;
};

// Reads a whitespace-separated edge list: "u v" or "u v p" per line, with
// '#' / '%' comment lines skipped. Node ids are assigned densely by first
// appearance; the original labels are retained on the graph. When
// directed=false every input edge yields the two opposite directed edges.
// Edges without an explicit probability stay unresolved until
// default_probabilities / constant_probabilities fills them.
Graph parse_edge_list(std::istream& input, bool directed);
Graph parse_edge_list_file(const std::string& path, bool directed);

// Fills every unresolved edge (u,v) with p = 1 / indegree(v). Explicit
// probabilities are preserved.
Graph default_probabilities(Graph g);

// Fills every unresolved edge with a fixed probability in (0,1].
Graph constant_probabilities(Graph g, double p);

// Per-trial activation cost. The i-th trial on a node costs
// base * growth^(i-1) unless an explicit (node, trial) entry overrides it.
// Costs must be positive and nondecreasing in the trial index.
struct CostModel {
  double base = 1.0;
  double growth = 1.2;
  std::map<std::pair<NodeId, int>, double> overrides;

  double trial_cost(NodeId u, int trial_index) const;
};

// Nonnegative trial counts per node: trials[u] = number of activation
// attempts executed on u.
struct SeedingVector {
  std::vector<int> trials;

  static SeedingVector zeros(int n) { return SeedingVector{std::vector<int>(n, 0)}; }
  int size() const { return static_cast<int>(trials.size()); }
  int operator[](NodeId u) const { return trials[u]; }
  void bump(NodeId u) { ++trials[u]; }
  std::vector<NodeId> support() const;
  bool operator==(const SeedingVector&) const = default;
};

// True when x(u) <= y(u) for every component.
bool leq(const SeedingVector& x, const SeedingVector& y);

// A fully validated problem instance: graph, per-node activation probability
// beta in (0,1], per-node trial cap b >= 1, cost schedule and budget k >= 0.
// Immutable after construction and safe to share across threads.
class Instance {
 public:
  Instance(Graph graph, std::vector<double> beta, std::vector<int> caps,
           CostModel cost, double budget);

  const Graph& graph() const { return graph_; }
  int node_count() const { return graph_.node_count(); }
  double beta(NodeId u) const { return beta_[u]; }
  const std::vector<double>& betas() const { return beta_; }
  int cap(NodeId u) const { return caps_[u]; }
  const std::vector<int>& caps() const { return caps_; }
  const CostModel& cost_model() const { return cost_; }
  double budget() const { return budget_; }

  // Cost of the i-th trial on u; throws unless 1 <= i <= cap(u).
  double trial_cost(NodeId u, int trial_index) const;

  // Total schedule cost of a seeding vector, sum of c(<u,1>)..c(<u,x(u)>).
  double vector_cost(const SeedingVector& x) const;

 private:
  Graph graph_;
  std::vector<double> beta_;
  std::vector<int> caps_;
  CostModel cost_;
  double budget_;
};

// Convenience constructor with uniform beta and caps.
Instance make_uniform_instance(Graph graph, double beta, int cap, CostModel cost,
                               double budget);

}  // namespace imma
