#include "imma/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imma/errors.hpp"
#include "imma/oracle.hpp"

namespace imma {

std::vector<std::pair<NodeId, double>> NodeSelector::selection_distribution(
    const SelectionContext& ctx) {
  auto pick = select(ctx);
  if (!pick) return {};
  return {{*pick, 1.0}};
}

double ExactGainEstimator::estimate(const SelectionContext& ctx, NodeId u) {
  NodeId local = ctx.residual.from_original[u];
  if (local < 0) return 0.0;
  return ctx.inst.beta(u) * exact_sigma(ctx.residual.graph, {local}, max_edges_);
}

double McGainEstimator::estimate(const SelectionContext& ctx, NodeId u) {
  NodeId local = ctx.residual.from_original[u];
  if (local < 0) return 0.0;
  return ctx.inst.beta(u) * mc_sigma(ctx.residual.graph, {local}, n_sims_, ctx.omega).value;
}

namespace {

std::vector<NodeId> feasible_nodes(const SelectionContext& ctx) {
  std::vector<NodeId> nodes;
  for (NodeId u = 0; u < ctx.inst.node_count(); ++u)
    if (!ctx.psi.is_active(u) && ctx.x[u] < ctx.inst.cap(u)) nodes.push_back(u);
  return nodes;
}

// Argmax of score / next-trial cost with the shared tie rule: higher score,
// then lower next-trial cost, then lower id. An all-zero field falls back
// to the cheapest next trial.
std::optional<NodeId> pick_by_score(const SelectionContext& ctx,
                                    const std::function<double(NodeId)>& score) {
  std::optional<NodeId> best;
  double best_score = -1.0;
  double best_cost = 0.0;
  bool any_positive = false;
  for (NodeId u = 0; u < ctx.inst.node_count(); ++u) {
    if (ctx.psi.is_active(u) || ctx.x[u] >= ctx.inst.cap(u)) continue;
    double cost = ctx.inst.trial_cost(u, ctx.x[u] + 1);
    double s = score(u) / cost;
    if (s > 0.0) any_positive = true;
    if (!best || s > best_score || (s == best_score && cost < best_cost)) {
      best = u;
      best_score = s;
      best_cost = cost;
    }
  }
  if (best && !any_positive) {
    // Zero-gain field: cost-minimizing completion, lowest id on ties.
    NodeId cheapest = *best;
    double cheapest_cost = best_cost;
    for (NodeId u = 0; u < ctx.inst.node_count(); ++u) {
      if (ctx.psi.is_active(u) || ctx.x[u] >= ctx.inst.cap(u)) continue;
      double cost = ctx.inst.trial_cost(u, ctx.x[u] + 1);
      if (cost < cheapest_cost) {
        cheapest = u;
        cheapest_cost = cost;
      }
    }
    return cheapest;
  }
  return best;
}

class AdaptiveGreedySelector : public NodeSelector {
 public:
  explicit AdaptiveGreedySelector(GainEstimator& estimator) : estimator_(&estimator) {}

  std::optional<NodeId> select(const SelectionContext& ctx) override {
    return pick_by_score(ctx, [&](NodeId u) { return estimator_->estimate(ctx, u); });
  }

  std::string name() const override { return "adaptive_greedy_" + estimator_->name(); }

 private:
  GainEstimator* estimator_;
};

class SampledAdaptiveGreedySelector : public NodeSelector {
 public:
  explicit SampledAdaptiveGreedySelector(double epsilon) : epsilon_(epsilon) {}

  std::optional<NodeId> select(const SelectionContext& ctx) override {
    if (ctx.residual.graph.node_count() == 0) return std::nullopt;
    bool any_feasible = false;
    for (NodeId orig : ctx.residual.to_original)
      if (ctx.x[orig] < ctx.inst.cap(orig)) any_feasible = true;
    if (!any_feasible) return std::nullopt;
    return generalized_epic(ctx.residual, ctx.inst, ctx.x, epsilon_, ctx.omega);
  }

  std::string name() const override { return "sampled_adaptive_greedy"; }

 private:
  double epsilon_;
};

class HeuristicSelector : public NodeSelector {
 public:
  explicit HeuristicSelector(HeuristicKind kind) : kind_(kind) {}

  std::optional<NodeId> select(const SelectionContext& ctx) override {
    if (kind_ == HeuristicKind::kRandom) {
      std::vector<NodeId> nodes = feasible_nodes(ctx);
      if (nodes.empty()) return std::nullopt;
      return nodes[ctx.kappa.uniform_int(0, static_cast<int>(nodes.size()) - 1)];
    }
    return pick_by_score(ctx, [&](NodeId u) { return raw_score(ctx, u); });
  }

  std::vector<std::pair<NodeId, double>> selection_distribution(
      const SelectionContext& ctx) override {
    if (kind_ != HeuristicKind::kRandom) return NodeSelector::selection_distribution(ctx);
    std::vector<NodeId> nodes = feasible_nodes(ctx);
    std::vector<std::pair<NodeId, double>> dist;
    for (NodeId u : nodes) dist.emplace_back(u, 1.0 / nodes.size());
    return dist;
  }

  std::string name() const override { return heuristic_name(kind_); }

 private:
  double raw_score(const SelectionContext& ctx, NodeId u) const {
    switch (kind_) {
      case HeuristicKind::kMaxDegree:
        return static_cast<double>(ctx.inst.graph().out_degree(u));
      case HeuristicKind::kMaxProb:
        return ctx.inst.beta(u);
      case HeuristicKind::kMaxDegreeProb:
        return ctx.inst.beta(u) * ctx.inst.graph().out_degree(u);
      default:
        return 0.0;
    }
  }

  HeuristicKind kind_;
};

}  // namespace

std::unique_ptr<NodeSelector> adaptive_greedy_selector(GainEstimator& estimator) {
  return std::make_unique<AdaptiveGreedySelector>(estimator);
}

std::unique_ptr<NodeSelector> sampled_adaptive_greedy_selector(double epsilon) {
  return std::make_unique<SampledAdaptiveGreedySelector>(epsilon);
}

std::unique_ptr<NodeSelector> heuristic_selector(HeuristicKind kind) {
  return std::make_unique<HeuristicSelector>(kind);
}

const char* heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kRandom: return "random";
    case HeuristicKind::kMaxDegree: return "max_degree";
    case HeuristicKind::kMaxProb: return "max_prob";
    case HeuristicKind::kMaxDegreeProb: return "max_degree_prob";
  }
  return "unknown";
}

GateDecision budget_gate(double spent, double budget, double next_cost, RngStream& kappa) {
  if (spent >= budget - kCostSlack)
    throw ContractError("budget_gate: budget already exhausted");
  if (!(next_cost > 0.0)) throw ContractError("budget_gate: next cost must be positive");
  if (spent + next_cost <= budget + kCostSlack) return GateDecision::kProceed;
  double proceed_prob = (budget - spent) / next_cost;
  return kappa.uniform01() < proceed_prob ? GateDecision::kProceed : GateDecision::kStop;
}

int max_iterations_r(const Instance& inst, double budget) {
  std::vector<double> first_costs(inst.node_count());
  for (NodeId u = 0; u < inst.node_count(); ++u) first_costs[u] = inst.trial_cost(u, 1);
  std::sort(first_costs.begin(), first_costs.end());
  double total = 0.0;
  if (total >= budget - kCostSlack) return 0;
  for (int q = 0; q < inst.node_count(); ++q) {
    total += first_costs[q];
    if (total >= budget - kCostSlack) return q + 1;
  }
  return inst.node_count();
}

std::string PolicyTrace::to_log() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const TrialRecord& t : trials)
    out << t.node << ' ' << t.trial_index << ' ' << t.cost << ' ' << (t.success ? 1 : 0) << ' '
        << t.cumulative_spread << '\n';
  return out.str();
}

PolicyTrace run_adaptive_policy(NodeSelector& selector, const Instance& inst,
                                RealizationOracle& oracle, std::uint64_t run_seed) {
  RngStream kappa(derive_seed(run_seed, 0x6B61));
  RngStream omega(derive_seed(run_seed, 0x6F6D));

  SeedingVector x = SeedingVector::zeros(inst.node_count());
  PartialRealization psi(inst);
  ResidualGraph residual = residual_graph(inst, psi);

  PolicyTrace trace{.trials = {},
                    .final_x = x,
                    .final_psi = psi,
                    .realized_spread = 0,
                    .total_cost = 0.0,
                    .iterations = 0,
                    .kappa_seed = kappa.seed(),
                    .omega_seed = omega.seed(),
                    .phi_seed = oracle.seed()};

  double spent = 0.0;
  while (spent < inst.budget() - kCostSlack) {
    SelectionContext ctx{inst, x, psi, residual, kappa, omega};
    std::optional<NodeId> pick = selector.select(ctx);
    if (!pick) break;
    NodeId u = *pick;
    double next_cost = inst.trial_cost(u, x[u] + 1);
    if (budget_gate(spent, inst.budget(), next_cost, kappa) == GateDecision::kStop) break;

    x.bump(u);
    spent += next_cost;
    bool success = oracle.trial_outcome(u, x[u]);
    psi.record_trial(u, x[u], success);
    if (success) {
      observe_diffusion(oracle, psi, u);
      residual = residual_graph(inst, psi);
    }
    trace.trials.push_back(TrialRecord{u, x[u], next_cost, success, psi.active_count()});
    ++trace.iterations;
  }

  trace.final_x = x;
  trace.final_psi = psi;
  trace.realized_spread = psi.active_count();
  trace.total_cost = spent;
  return trace;
}

SeedingVector greedy_nonadaptive(const Instance& inst,
                                 const std::function<double(const SeedingVector&)>& mu_eval,
                                 RngStream& kappa) {
  SeedingVector x = SeedingVector::zeros(inst.node_count());
  double spent = 0.0;
  double mu_current = mu_eval(x);
  while (spent < inst.budget() - kCostSlack) {
    std::optional<NodeId> best;
    double best_score = -1.0;
    double best_cost = 0.0;
    double best_mu = 0.0;
    bool any_positive = false;
    for (NodeId u = 0; u < inst.node_count(); ++u) {
      if (x[u] >= inst.cap(u)) continue;
      double cost = inst.trial_cost(u, x[u] + 1);
      SeedingVector bumped = x;
      bumped.bump(u);
      double mu_next = mu_eval(bumped);
      double s = (mu_next - mu_current) / cost;
      if (s > 0.0) any_positive = true;
      if (!best || s > best_score || (s == best_score && cost < best_cost)) {
        best = u;
        best_score = s;
        best_cost = cost;
        best_mu = mu_next;
      }
    }
    if (!best) break;
    NodeId u = *best;
    if (!any_positive) {
      // Zero-gain field, same completion rule as the adaptive greedy.
      for (NodeId v = 0; v < inst.node_count(); ++v) {
        if (x[v] >= inst.cap(v)) continue;
        double cost = inst.trial_cost(v, x[v] + 1);
        if (cost < best_cost) {
          u = v;
          best_cost = cost;
        }
      }
      best_mu = mu_current;
    }
    double next_cost = inst.trial_cost(u, x[u] + 1);
    if (budget_gate(spent, inst.budget(), next_cost, kappa) == GateDecision::kStop) break;
    x.bump(u);
    spent += next_cost;
    mu_current = best_mu;
  }
  return x;
}

SeedingVector sampled_greedy_nonadaptive(const Instance& inst, long theta, RngStream& kappa,
                                         RngStream& omega) {
  if (theta < 1) throw ValidationError("sampled_greedy_nonadaptive: theta must be >= 1");
  RRCollection coll(inst.node_count());
  generate_rr_sets(inst.graph(), static_cast<int>(theta), omega, coll);
  return sampled_greedy_nonadaptive(inst, coll, kappa);
}

SeedingVector sampled_greedy_nonadaptive(const Instance& inst, const RRCollection& coll,
                                         RngStream& kappa) {
  if (coll.size() < 1) throw ValidationError("sampled_greedy_nonadaptive: empty collection");
  const int n = inst.node_count();

  // Per-set survival weight W_i = prod_{w in R_i} (1-beta_w)^x(w) and the
  // per-node marginal sums beta_u * sum_{R_i containing u} W_i; updating both
  // incrementally makes each pick O(sets touched).
  std::vector<double> weight(coll.size(), 1.0);
  std::vector<double> marginal_sum(n, 0.0);
  std::vector<std::vector<int>> sets_with(n);
  for (int i = 0; i < coll.size(); ++i)
    for (NodeId u : coll.set(i).members) sets_with[u].push_back(i);
  for (NodeId u = 0; u < n; ++u)
    marginal_sum[u] = static_cast<double>(coll.cover_count(u));

  SeedingVector x = SeedingVector::zeros(n);
  double spent = 0.0;
  while (spent < inst.budget() - kCostSlack) {
    std::optional<NodeId> best;
    double best_score = -1.0;
    double best_cost = 0.0;
    bool any_positive = false;
    for (NodeId u = 0; u < n; ++u) {
      if (x[u] >= inst.cap(u)) continue;
      double cost = inst.trial_cost(u, x[u] + 1);
      double gain = inst.beta(u) * marginal_sum[u] / coll.size();
      double s = gain / cost;
      if (s > 0.0) any_positive = true;
      if (!best || s > best_score || (s == best_score && cost < best_cost)) {
        best = u;
        best_score = s;
        best_cost = cost;
      }
    }
    if (!best) break;
    NodeId u = *best;
    if (!any_positive) {
      for (NodeId v = 0; v < n; ++v) {
        if (x[v] >= inst.cap(v)) continue;
        double cost = inst.trial_cost(v, x[v] + 1);
        if (cost < best_cost) {
          u = v;
          best_cost = cost;
        }
      }
    }
    double next_cost = inst.trial_cost(u, x[u] + 1);
    if (budget_gate(spent, inst.budget(), next_cost, kappa) == GateDecision::kStop) break;
    x.bump(u);
    spent += next_cost;
    double shrink = 1.0 - inst.beta(u);
    for (int i : sets_with[u]) {
      double delta = weight[i] * (shrink - 1.0);
      weight[i] += delta;
      for (NodeId w : coll.set(i).members) marginal_sum[w] += delta;
    }
  }
  return x;
}

PolicyTrace execute_seeding_vector(const Instance& inst, const SeedingVector& x,
                                   RealizationOracle& oracle) {
  if (x.size() != inst.node_count())
    throw ValidationError("execute_seeding_vector: seeding vector size mismatch");
  PartialRealization psi(inst);
  PolicyTrace trace{.trials = {},
                    .final_x = x,
                    .final_psi = psi,
                    .realized_spread = 0,
                    .total_cost = 0.0,
                    .iterations = 0,
                    .kappa_seed = 0,
                    .omega_seed = 0,
                    .phi_seed = oracle.seed()};
  // Every trial of the fixed plan is executed and paid, including trials
  // made redundant by an earlier success on the same node.
  for (NodeId u = 0; u < inst.node_count(); ++u) {
    for (int i = 1; i <= x[u]; ++i) {
      double cost = inst.trial_cost(u, i);
      bool success = oracle.trial_outcome(u, i);
      psi.record_trial(u, i, success);
      if (success && psi.awaiting_diffusion(u)) observe_diffusion(oracle, psi, u);
      trace.trials.push_back(TrialRecord{u, i, cost, success, psi.active_count()});
      trace.total_cost += cost;
      ++trace.iterations;
    }
  }
  trace.final_psi = psi;
  trace.realized_spread = psi.active_count();
  return trace;
}

}  // namespace imma
