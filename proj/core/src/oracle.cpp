#include "imma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "imma/diffusion.hpp"
#include "imma/errors.hpp"

namespace imma {

double exact_sigma(const Graph& g, const std::vector<NodeId>& seeds, int max_edges) {
  const int m = g.edge_count();
  if (m > max_edges)
    throw ValidationError("exact_sigma: " + std::to_string(m) +
                          " edges exceed the enumeration cap " + std::to_string(max_edges));
  if (seeds.empty()) return 0.0;
  std::vector<std::uint8_t> states(m, 0);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double prob = 1.0;
    for (int e = 0; e < m; ++e) {
      bool live = (mask >> e) & 1;
      states[e] = live;
      prob *= live ? g.edge(e).prob : (1.0 - g.edge(e).prob);
    }
    if (prob == 0.0) continue;
    total += prob * spread(g, states, seeds);
  }
  return total;
}

double exact_mu(const Instance& inst, const SeedingVector& x, int max_edges,
                int max_support) {
  std::vector<NodeId> support = x.support();
  const int s = static_cast<int>(support.size());
  if (s > max_support)
    throw ValidationError("exact_mu: support size exceeds the enumeration cap");
  double total = 0.0;
  std::vector<NodeId> seeds;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
    double prob = 1.0;
    seeds.clear();
    for (int j = 0; j < s; ++j) {
      NodeId u = support[j];
      double p_active = 1.0 - std::pow(1.0 - inst.beta(u), x[u]);
      if ((mask >> j) & 1) {
        prob *= p_active;
        seeds.push_back(u);
      } else {
        prob *= 1.0 - p_active;
      }
    }
    if (prob == 0.0) continue;
    total += prob * exact_sigma(inst.graph(), seeds, max_edges);
  }
  return total;
}

namespace {

// Seeds of the spread function under a seeding vector: the nodes whose
// recorded trials contain a success.
std::vector<NodeId> trial_activated_nodes(const PartialRealization& psi) {
  std::vector<NodeId> seeds;
  for (NodeId u = 0; u < psi.node_count(); ++u)
    for (int i = 1; i <= psi.resolved_trials(u); ++i)
      if (psi.trial_state(u, i) == TriState::kYes) {
        seeds.push_back(u);
        break;
      }
  return seeds;
}

std::vector<int> unresolved_edges(const PartialRealization& psi) {
  std::vector<int> ids;
  for (int e = 0; e < psi.edge_count(); ++e)
    if (psi.edge_state(e) == TriState::kUnknown) ids.push_back(e);
  return ids;
}

}  // namespace

double exact_marginal_gain(const Instance& inst, const SeedingVector& x,
                           const PartialRealization& psi, NodeId u, double tol) {
  if (x[u] >= inst.cap(u))
    throw ValidationError("exact_marginal_gain: node " + std::to_string(u) +
                          " already at its trial cap");
  if (psi.is_active(u)) return 0.0;  // an active seed has no marginal gain

  // Route one: residual-graph form, beta_u * sigma_{G(psi)}({u}).
  ResidualGraph res = residual_graph(inst, psi);
  double via_residual =
      inst.beta(u) * exact_sigma(res.graph, {res.from_original[u]}, kDefaultEdgeCap);

  // Route two: direct enumeration over the worlds consistent with psi. The
  // spread difference depends only on the unresolved edges and the outcome
  // of trial <u, x(u)+1>, which contributes the beta_u factor.
  const Graph& g = inst.graph();
  std::vector<int> open = unresolved_edges(psi);
  if (static_cast<int>(open.size()) > kDefaultEdgeCap)
    throw ValidationError("exact_marginal_gain: unresolved edges exceed the enumeration cap");
  std::vector<std::uint8_t> states(g.edge_count(), 0);
  for (int e = 0; e < g.edge_count(); ++e)
    states[e] = psi.edge_state(e) == TriState::kYes ? 1 : 0;
  std::vector<NodeId> seeds = trial_activated_nodes(psi);
  std::vector<NodeId> seeds_plus = seeds;
  seeds_plus.push_back(u);
  double gain = 0.0;
  const int open_count = static_cast<int>(open.size());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << open_count); ++mask) {
    double prob = 1.0;
    for (int j = 0; j < open_count; ++j) {
      bool live = (mask >> j) & 1;
      states[open[j]] = live;
      prob *= live ? g.edge(open[j]).prob : (1.0 - g.edge(open[j]).prob);
    }
    if (prob == 0.0) continue;
    gain += prob * (spread(g, states, seeds_plus) - spread(g, states, seeds));
  }
  double direct = inst.beta(u) * gain;

  if (std::abs(direct - via_residual) > tol)
    throw ContractError("exact_marginal_gain: enumeration gives " + std::to_string(direct) +
                        " but the residual form gives " + std::to_string(via_residual));
  return direct;
}

std::vector<std::pair<PartialRealization, double>> enumerate_diffusion_branches(
    const Instance& inst, const PartialRealization& psi, NodeId seed) {
  if (!psi.awaiting_diffusion(seed))
    throw ContractError("enumerate_diffusion_branches: seed is not awaiting diffusion");
  const Graph& g = inst.graph();

  std::vector<std::pair<PartialRealization, double>> leaves;
  // Fixpoint: a branch is complete when no active node has an unresolved
  // out-edge; otherwise the lowest such node's first unresolved edge splits
  // the branch in two.
  std::deque<std::pair<PartialRealization, double>> work;
  {
    PartialRealization start = psi;
    start.mark_diffused(seed);
    work.emplace_back(std::move(start), 1.0);
  }
  while (!work.empty()) {
    auto [state, prob] = std::move(work.front());
    work.pop_front();
    int open_edge = -1;
    for (NodeId v = 0; v < g.node_count() && open_edge < 0; ++v) {
      if (!state.is_active(v)) continue;
      for (int e : g.out_edges(v))
        if (state.edge_state(e) == TriState::kUnknown) {
          open_edge = e;
          break;
        }
    }
    if (open_edge < 0) {
      leaves.emplace_back(std::move(state), prob);
      continue;
    }
    const Edge& ed = g.edge(open_edge);
    PartialRealization live_state = state;
    live_state.record_edge(open_edge, true);
    if (!live_state.is_active(ed.dst)) live_state.activate_via_edge(ed.dst);
    work.emplace_back(std::move(live_state), prob * ed.prob);
    PartialRealization blocked_state = std::move(state);
    blocked_state.record_edge(open_edge, false);
    work.emplace_back(std::move(blocked_state), prob * (1.0 - ed.prob));
  }
  return leaves;
}

namespace {

SeedingVector state_vector(const PartialRealization& psi) {
  SeedingVector x = SeedingVector{std::vector<int>(psi.node_count(), 0)};
  for (NodeId u = 0; u < psi.node_count(); ++u) x.trials[u] = psi.resolved_trials(u);
  return x;
}

}  // namespace

std::vector<ReachableState> enumerate_reachable_states(const Instance& inst,
                                                       std::size_t state_cap) {
  std::vector<ReachableState> states;
  std::unordered_map<std::string, std::size_t> seen;
  std::deque<PartialRealization> frontier;

  PartialRealization initial(inst);
  seen.emplace(initial.canonical_key(), 0);
  states.push_back(ReachableState{state_vector(initial), initial});
  frontier.push_back(std::move(initial));

  auto visit = [&](PartialRealization psi) {
    std::string key = psi.canonical_key();
    if (seen.contains(key)) return;
    if (states.size() >= state_cap)
      throw ValidationError("enumerate_reachable_states: state cap exceeded");
    seen.emplace(std::move(key), states.size());
    states.push_back(ReachableState{state_vector(psi), psi});
    frontier.push_back(std::move(psi));
  };

  while (!frontier.empty()) {
    PartialRealization psi = std::move(frontier.front());
    frontier.pop_front();
    for (NodeId u = 0; u < inst.node_count(); ++u) {
      if (psi.is_active(u) || psi.resolved_trials(u) >= inst.cap(u)) continue;
      PartialRealization fail = psi;
      fail.record_trial(u, fail.resolved_trials(u) + 1, false);
      visit(std::move(fail));
      PartialRealization success = psi;
      success.record_trial(u, success.resolved_trials(u) + 1, true);
      for (auto& [branch, prob] : enumerate_diffusion_branches(inst, success, u))
        visit(std::move(branch));
    }
  }
  return states;
}

namespace {

struct ValueMass {
  double value = 0.0;
  double mass = 0.0;
};

class PolicyValueEnumerator {
 public:
  PolicyValueEnumerator(const Instance& inst, NodeSelector& selector)
      : inst_(inst), selector_(selector), kappa_(0), omega_(0) {}

  ValueMass evaluate(const PartialRealization& psi) {
    std::string key = psi.canonical_key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    SeedingVector x = state_vector(psi);
    double spent = inst_.vector_cost(x);
    ValueMass out;
    if (spent >= inst_.budget() - kCostSlack) {
      out = ValueMass{static_cast<double>(psi.active_count()), 1.0};
      memo_.emplace(std::move(key), out);
      return out;
    }
    ResidualGraph residual = residual_graph(inst_, psi);
    SelectionContext ctx{inst_, x, psi, residual, kappa_, omega_};
    auto dist = selector_.selection_distribution(ctx);
    if (dist.empty()) {
      out = ValueMass{static_cast<double>(psi.active_count()), 1.0};
      memo_.emplace(std::move(key), out);
      return out;
    }
    for (auto [u, p_choice] : dist) {
      double next_cost = inst_.trial_cost(u, x[u] + 1);
      double p_go = 1.0;
      if (spent + next_cost > inst_.budget() + kCostSlack) {
        p_go = (inst_.budget() - spent) / next_cost;
        double p_stop = 1.0 - p_go;
        out.value += p_choice * p_stop * psi.active_count();
        out.mass += p_choice * p_stop;
      }
      PartialRealization fail = psi;
      fail.record_trial(u, x[u] + 1, false);
      ValueMass on_fail = evaluate(fail);
      double beta = inst_.beta(u);
      out.value += p_choice * p_go * (1.0 - beta) * on_fail.value;
      out.mass += p_choice * p_go * (1.0 - beta) * on_fail.mass;

      PartialRealization success = psi;
      success.record_trial(u, x[u] + 1, true);
      for (auto& [branch, p_branch] : enumerate_diffusion_branches(inst_, success, u)) {
        ValueMass on_branch = evaluate(branch);
        out.value += p_choice * p_go * beta * p_branch * on_branch.value;
        out.mass += p_choice * p_go * beta * p_branch * on_branch.mass;
      }
    }
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  const Instance& inst_;
  NodeSelector& selector_;
  RngStream kappa_;
  RngStream omega_;
  std::unordered_map<std::string, ValueMass> memo_;
};

}  // namespace

PolicyValue exact_policy_value(const Instance& inst, NodeSelector& selector) {
  PolicyValueEnumerator enumerator(inst, selector);
  ValueMass vm = enumerator.evaluate(PartialRealization(inst));
  return PolicyValue{vm.value, vm.mass};
}

namespace {

class OptimalValueEnumerator {
 public:
  explicit OptimalValueEnumerator(const Instance& inst) : inst_(inst) {}

  double evaluate(const PartialRealization& psi) {
    std::string key = psi.canonical_key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    SeedingVector x = state_vector(psi);
    double spent = inst_.vector_cost(x);
    double best = psi.active_count();  // stopping is always available
    if (spent < inst_.budget() - kCostSlack) {
      for (NodeId u = 0; u < inst_.node_count(); ++u) {
        if (psi.is_active(u) || x[u] >= inst_.cap(u)) continue;
        double next_cost = inst_.trial_cost(u, x[u] + 1);
        PartialRealization fail = psi;
        fail.record_trial(u, x[u] + 1, false);
        double beta = inst_.beta(u);
        double acted = (1.0 - beta) * evaluate(fail);
        PartialRealization success = psi;
        success.record_trial(u, x[u] + 1, true);
        for (auto& [branch, p_branch] : enumerate_diffusion_branches(inst_, success, u))
          acted += beta * p_branch * evaluate(branch);
        double value = acted;
        if (spent + next_cost > inst_.budget() + kCostSlack) {
          // An overshooting trial enters through the truncation gate, which
          // keeps the expected cost at the budget.
          double p_go = (inst_.budget() - spent) / next_cost;
          value = p_go * acted + (1.0 - p_go) * psi.active_count();
        }
        best = std::max(best, value);
      }
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  const Instance& inst_;
  std::unordered_map<std::string, double> memo_;
};

}  // namespace

double optimal_policy_value(const Instance& inst) {
  OptimalValueEnumerator enumerator(inst);
  return enumerator.evaluate(PartialRealization(inst));
}

std::string ViolationReport::to_text() const {
  std::ostringstream out;
  for (const Violation& v : items)
    out << v.what << "  (lhs=" << v.lhs << ", rhs=" << v.rhs << ")\n";
  return out.str();
}

namespace {

std::string format_vector(const SeedingVector& x) {
  std::string s = "(";
  for (int u = 0; u < x.size(); ++u) {
    if (u) s += ",";
    s += std::to_string(x[u]);
  }
  return s + ")";
}

GainFunction default_gain() {
  return [](const Instance& inst, const SeedingVector& x, const PartialRealization& psi,
            NodeId u) { return exact_marginal_gain(inst, x, psi, u); };
}

}  // namespace

ViolationReport check_adaptive_monotone(const Instance& inst, const GainFunction& gain) {
  GainFunction g = gain ? gain : default_gain();
  ViolationReport report;
  for (const ReachableState& state : enumerate_reachable_states(inst)) {
    for (NodeId u = 0; u < inst.node_count(); ++u) {
      if (state.x[u] >= inst.cap(u)) continue;
      double delta = g(inst, state.x, state.psi, u);
      if (delta < -1e-9) {
        report.items.push_back(Violation{
            "negative gain at x=" + format_vector(state.x) + ", node " + std::to_string(u) +
                "\npsi:\n" + state.psi.debug_dump(inst.graph()),
            delta, 0.0});
      }
    }
  }
  return report;
}

ViolationReport check_adaptive_dr_submodular(const Instance& inst,
                                             const GainFunction& gain) {
  GainFunction g = gain ? gain : default_gain();
  ViolationReport report;
  std::vector<ReachableState> states = enumerate_reachable_states(inst);

  // Gains are reused across many pairs; cache them per (state, node).
  std::vector<std::vector<double>> cache(states.size(),
                                         std::vector<double>(inst.node_count(),
                                                             std::numeric_limits<double>::quiet_NaN()));
  auto cached_gain = [&](std::size_t i, NodeId u) {
    double& slot = cache[i][u];
    if (std::isnan(slot)) slot = g(inst, states[i].x, states[i].psi, u);
    return slot;
  };

  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (!leq(states[i].x, states[j].x)) continue;
      if (!is_subrealization(states[i].psi, states[j].psi)) continue;
      for (NodeId u = 0; u < inst.node_count(); ++u) {
        if (states[j].x[u] >= inst.cap(u)) continue;
        double small_state = cached_gain(i, u);
        double large_state = cached_gain(j, u);
        if (small_state < large_state - 1e-9) {
          report.items.push_back(Violation{
              "gain grows from x=" + format_vector(states[i].x) + " to y=" +
                  format_vector(states[j].x) + " at node " + std::to_string(u) +
                  "\npsi:\n" + states[i].psi.debug_dump(inst.graph()) + "psi':\n" +
                  states[j].psi.debug_dump(inst.graph()),
              small_state, large_state});
        }
      }
    }
  }
  return report;
}

}  // namespace imma
