#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imma/graph.hpp"
#include "imma/rng.hpp"

namespace imma {

enum class TriState : std::uint8_t { kNo = 0, kYes = 1, kUnknown = 2 };

// One sampled world for the edges only: every edge resolved live (1) or
// blocked (0), indexed like Graph::edges().
struct GraphRealization {
  std::vector<std::uint8_t> edge_live;
};

GraphRealization sample_graph_realization(const Graph& g, RngStream& rng);

// prod over live edges of p_e times prod over blocked edges of (1 - p_e).
double graph_realization_probability(const Graph& g, const GraphRealization& gr);

// A complete world: outcome of every trial slot of every node plus every
// edge state.
struct FullRealization {
  std::vector<std::vector<std::uint8_t>> trial_success;  // per node, cap(u) slots
  GraphRealization edges;
};

double full_realization_probability(const Instance& inst, const FullRealization& phi);

// The observations accumulated during one policy run: per-node trial
// outcomes (resolved as a prefix, trials execute in order), per-edge states
// revealed by full-adoption feedback, and the derived active set. A node is
// active once some trial on it succeeded or it was reached through an
// observed live edge.
class PartialRealization {
 public:
  explicit PartialRealization(const Instance& inst);

  int node_count() const { return static_cast<int>(caps_.size()); }
  int edge_count() const { return static_cast<int>(edge_states_.size()); }
  int cap(NodeId u) const { return caps_[u]; }

  int resolved_trials(NodeId u) const { return resolved_[u]; }
  TriState trial_state(NodeId u, int trial_index) const;  // 1-based
  TriState edge_state(int edge_id) const { return edge_states_[edge_id]; }

  bool is_active(NodeId u) const { return active_[u] != 0; }
  int active_count() const { return active_count_; }
  std::vector<NodeId> active_nodes() const;

  // A node whose activating trial has been recorded but whose diffusion
  // has not been observed yet.
  bool awaiting_diffusion(NodeId u) const { return active_[u] != 0 && diffused_[u] == 0; }

  // Records the outcome of trial <u,i>. Trials resolve strictly in order:
  // i must be resolved_trials(u) + 1. A successful trial marks u active.
  void record_trial(NodeId u, int trial_index, bool success);

  // Records an observed edge state; re-recording must agree.
  void record_edge(int edge_id, bool live);

  // Marks u as reached through a live edge (active + diffusion observed).
  void activate_via_edge(NodeId u);
  void mark_diffused(NodeId u);

  int trial_domain_size() const;

  // Stable textual form: trial table then edge table. Used for goldens and
  // violation reports.
  std::string debug_dump(const Graph& g) const;

  // Compact content key for state deduplication.
  std::string canonical_key() const;

  bool operator==(const PartialRealization&) const = default;

 private:
  std::vector<int> caps_;
  std::vector<std::vector<TriState>> trial_states_;
  std::vector<int> resolved_;
  std::vector<TriState> edge_states_;
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> diffused_;
  int active_count_ = 0;
};

// True iff phi agrees with every resolved trial and edge of psi.
bool is_consistent(const FullRealization& phi, const PartialRealization& psi);

// True iff psi's resolved trials and observed edges are a subset of psi2's
// and the two agree wherever both are resolved.
bool is_subrealization(const PartialRealization& psi, const PartialRealization& psi2);

// Subgraph induced by the nodes that are inactive under psi, with original
// edge probabilities and a node-id mapping back to the source graph.
struct ResidualGraph {
  Graph graph;
  std::vector<NodeId> to_original;   // residual id -> original id
  std::vector<NodeId> from_original; // original id -> residual id, -1 if active
};

ResidualGraph residual_graph(const Instance& inst, const PartialRealization& psi);
ResidualGraph full_residual(const Instance& inst);  // nothing active yet

// Lazily materialized full realization. Each trial and edge outcome is
// drawn on first query from beta_u / p_uv and memoized; the draw for an
// item depends only on (seed, item), never on query order, so lazy and
// eager materialization agree and replays are exact.
class RealizationOracle {
 public:
  RealizationOracle(const Instance& inst, std::uint64_t seed);

  const Instance& instance() const { return *inst_; }
  std::uint64_t seed() const { return seed_; }

  bool trial_outcome(NodeId u, int trial_index);  // 1-based, throws past cap(u)
  bool edge_live(int edge_id);

  // Resolves everything; identical to querying items one by one.
  FullRealization materialize();

 private:
  const Instance* inst_;
  std::uint64_t seed_;
  std::vector<std::vector<TriState>> trial_memo_;
  std::vector<TriState> edge_memo_;
  std::vector<int> trial_item_base_;  // item index of <u,1>
};

}  // namespace imma
