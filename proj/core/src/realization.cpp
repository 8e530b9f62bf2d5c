#include "imma/realization.hpp"

#include <algorithm>
#include <sstream>

#include "imma/errors.hpp"

namespace imma {

GraphRealization sample_graph_realization(const Graph& g, RngStream& rng) {
  GraphRealization gr;
  gr.edge_live.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e)
    gr.edge_live[e] = rng.bernoulli(g.edge(e).prob) ? 1 : 0;
  return gr;
}

double graph_realization_probability(const Graph& g, const GraphRealization& gr) {
  if (static_cast<int>(gr.edge_live.size()) != g.edge_count())
    throw ValidationError("graph_realization_probability: realization size mismatch");
  double p = 1.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    double pe = g.edge(e).prob;
    p *= gr.edge_live[e] ? pe : (1.0 - pe);
  }
  return p;
}

double full_realization_probability(const Instance& inst, const FullRealization& phi) {
  const Graph& g = inst.graph();
  if (static_cast<int>(phi.trial_success.size()) != inst.node_count())
    throw ValidationError("full_realization_probability: node dimension mismatch");
  double p = graph_realization_probability(g, phi.edges);
  for (NodeId u = 0; u < inst.node_count(); ++u) {
    if (static_cast<int>(phi.trial_success[u].size()) != inst.cap(u))
      throw ValidationError("full_realization_probability: trial slots mismatch at node " +
                            std::to_string(u));
    for (int i = 0; i < inst.cap(u); ++i)
      p *= phi.trial_success[u][i] ? inst.beta(u) : (1.0 - inst.beta(u));
  }
  return p;
}

PartialRealization::PartialRealization(const Instance& inst)
    : caps_(inst.caps()),
      resolved_(inst.node_count(), 0),
      edge_states_(inst.graph().edge_count(), TriState::kUnknown),
      active_(inst.node_count(), 0),
      diffused_(inst.node_count(), 0) {
  trial_states_.resize(inst.node_count());
  for (NodeId u = 0; u < inst.node_count(); ++u)
    trial_states_[u].assign(caps_[u], TriState::kUnknown);
}

TriState PartialRealization::trial_state(NodeId u, int trial_index) const {
  return trial_states_[u][trial_index - 1];
}

std::vector<NodeId> PartialRealization::active_nodes() const {
  std::vector<NodeId> nodes;
  for (NodeId u = 0; u < node_count(); ++u)
    if (active_[u]) nodes.push_back(u);
  return nodes;
}

void PartialRealization::record_trial(NodeId u, int trial_index, bool success) {
  if (u < 0 || u >= node_count()) throw ContractError("record_trial: node id out of range");
  if (trial_index != resolved_[u] + 1)
    throw ContractError("record_trial: trials resolve in order; expected trial " +
                        std::to_string(resolved_[u] + 1) + " on node " + std::to_string(u));
  if (trial_index > caps_[u]) throw ContractError("record_trial: past trial cap");
  trial_states_[u][trial_index - 1] = success ? TriState::kYes : TriState::kNo;
  resolved_[u] = trial_index;
  if (success && !active_[u]) {
    active_[u] = 1;
    ++active_count_;
  }
}

void PartialRealization::record_edge(int edge_id, bool live) {
  TriState next = live ? TriState::kYes : TriState::kNo;
  if (edge_states_[edge_id] != TriState::kUnknown && edge_states_[edge_id] != next)
    throw ContractError("record_edge: edge " + std::to_string(edge_id) +
                        " re-observed with a different state");
  edge_states_[edge_id] = next;
}

void PartialRealization::activate_via_edge(NodeId u) {
  if (!active_[u]) {
    active_[u] = 1;
    ++active_count_;
  }
  diffused_[u] = 1;
}

void PartialRealization::mark_diffused(NodeId u) { diffused_[u] = 1; }

int PartialRealization::trial_domain_size() const {
  int total = 0;
  for (int r : resolved_) total += r;
  return total;
}

std::string PartialRealization::debug_dump(const Graph& g) const {
  std::ostringstream out;
  auto symbol = [](TriState s) {
    switch (s) {
      case TriState::kNo: return '0';
      case TriState::kYes: return '1';
      default: return '?';
    }
  };
  out << "trials:\n";
  for (NodeId u = 0; u < node_count(); ++u) {
    out << "  " << u << ":";
    for (int i = 1; i <= caps_[u]; ++i) out << ' ' << symbol(trial_state(u, i));
    if (active_[u]) out << "  [active]";
    out << '\n';
  }
  out << "edges:\n";
  for (int e = 0; e < edge_count(); ++e)
    out << "  " << g.edge(e).src << "->" << g.edge(e).dst << ": " << symbol(edge_states_[e])
        << '\n';
  return out.str();
}

std::string PartialRealization::canonical_key() const {
  std::string key;
  key.reserve(trial_domain_size() + edge_count() + node_count() * 2);
  for (NodeId u = 0; u < node_count(); ++u) {
    for (int i = 0; i < caps_[u]; ++i)
      key.push_back('0' + static_cast<char>(trial_states_[u][i]));
    key.push_back('|');
  }
  for (TriState s : edge_states_) key.push_back('0' + static_cast<char>(s));
  return key;
}

bool is_consistent(const FullRealization& phi, const PartialRealization& psi) {
  if (static_cast<int>(phi.trial_success.size()) != psi.node_count() ||
      static_cast<int>(phi.edges.edge_live.size()) != psi.edge_count())
    throw ValidationError("is_consistent: dimension mismatch");
  for (NodeId u = 0; u < psi.node_count(); ++u)
    for (int i = 1; i <= psi.resolved_trials(u); ++i)
      if ((psi.trial_state(u, i) == TriState::kYes) != (phi.trial_success[u][i - 1] != 0))
        return false;
  for (int e = 0; e < psi.edge_count(); ++e) {
    TriState s = psi.edge_state(e);
    if (s == TriState::kUnknown) continue;
    if ((s == TriState::kYes) != (phi.edges.edge_live[e] != 0)) return false;
  }
  return true;
}

bool is_subrealization(const PartialRealization& psi, const PartialRealization& psi2) {
  if (psi.node_count() != psi2.node_count() || psi.edge_count() != psi2.edge_count())
    throw ValidationError("is_subrealization: dimension mismatch");
  for (NodeId u = 0; u < psi.node_count(); ++u) {
    if (psi.resolved_trials(u) > psi2.resolved_trials(u)) return false;
    for (int i = 1; i <= psi.resolved_trials(u); ++i)
      if (psi.trial_state(u, i) != psi2.trial_state(u, i)) return false;
  }
  for (int e = 0; e < psi.edge_count(); ++e) {
    TriState s = psi.edge_state(e);
    if (s == TriState::kUnknown) continue;
    if (psi2.edge_state(e) != s) return false;
  }
  return true;
}

ResidualGraph residual_graph(const Instance& inst, const PartialRealization& psi) {
  const Graph& g = inst.graph();
  ResidualGraph res;
  res.from_original.assign(g.node_count(), -1);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (psi.is_active(u)) continue;
    res.from_original[u] = static_cast<NodeId>(res.to_original.size());
    res.to_original.push_back(u);
  }
  std::vector<Edge> edges;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    NodeId s = res.from_original[ed.src];
    NodeId d = res.from_original[ed.dst];
    if (s < 0 || d < 0) continue;
    edges.push_back(Edge{s, d, ed.prob, ed.prob_explicit});
  }
  res.graph = Graph(static_cast<int>(res.to_original.size()), std::move(edges));
  return res;
}

ResidualGraph full_residual(const Instance& inst) {
  return residual_graph(inst, PartialRealization(inst));
}

RealizationOracle::RealizationOracle(const Instance& inst, std::uint64_t seed)
    : inst_(&inst), seed_(seed), edge_memo_(inst.graph().edge_count(), TriState::kUnknown) {
  trial_memo_.resize(inst.node_count());
  trial_item_base_.resize(inst.node_count());
  int items = 0;
  for (NodeId u = 0; u < inst.node_count(); ++u) {
    trial_memo_[u].assign(inst.cap(u), TriState::kUnknown);
    trial_item_base_[u] = items;
    items += inst.cap(u);
  }
}

bool RealizationOracle::trial_outcome(NodeId u, int trial_index) {
  if (u < 0 || u >= inst_->node_count())
    throw ValidationError("trial_outcome: node id out of range");
  if (trial_index < 1 || trial_index > inst_->cap(u))
    throw ValidationError("trial_outcome: trial index " + std::to_string(trial_index) +
                          " past cap of node " + std::to_string(u));
  TriState& memo = trial_memo_[u][trial_index - 1];
  if (memo == TriState::kUnknown) {
    std::uint64_t state = derive_seed(seed_, 0x7261, trial_item_base_[u] + trial_index - 1);
    memo = to_unit_interval(splitmix64(state)) < inst_->beta(u) ? TriState::kYes : TriState::kNo;
  }
  return memo == TriState::kYes;
}

bool RealizationOracle::edge_live(int edge_id) {
  if (edge_id < 0 || edge_id >= inst_->graph().edge_count())
    throw ValidationError("edge_live: edge id out of range");
  TriState& memo = edge_memo_[edge_id];
  if (memo == TriState::kUnknown) {
    std::uint64_t state = derive_seed(seed_, 0x6564, edge_id);
    memo = to_unit_interval(splitmix64(state)) < inst_->graph().edge(edge_id).prob
               ? TriState::kYes
               : TriState::kNo;
  }
  return memo == TriState::kYes;
}

FullRealization RealizationOracle::materialize() {
  FullRealization phi;
  phi.trial_success.resize(inst_->node_count());
  for (NodeId u = 0; u < inst_->node_count(); ++u) {
    phi.trial_success[u].resize(inst_->cap(u));
    for (int i = 1; i <= inst_->cap(u); ++i)
      phi.trial_success[u][i - 1] = trial_outcome(u, i) ? 1 : 0;
  }
  phi.edges.edge_live.resize(inst_->graph().edge_count());
  for (int e = 0; e < inst_->graph().edge_count(); ++e)
    phi.edges.edge_live[e] = edge_live(e) ? 1 : 0;
  return phi;
}

}  // namespace imma
