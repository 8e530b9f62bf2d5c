#include <doctest.h>

#include <cmath>
#include <map>

#include "imma/oracle.hpp"
#include "imma/policies.hpp"
#include "test_util.hpp"

using namespace imma;

TEST_SUITE_BEGIN("policies");

namespace {

Instance single_node_instance(double budget) {
  Graph g(1, {});
  return make_uniform_instance(std::move(g), 0.5, 2, CostModel{}, budget);
}

SelectionContext make_context(const Instance& inst, const SeedingVector& x,
                              const PartialRealization& psi, const ResidualGraph& residual,
                              RngStream& kappa, RngStream& omega) {
  return SelectionContext{inst, x, psi, residual, kappa, omega};
}

}  // namespace

TEST_CASE("budget gate formula") {
  RngStream rng(500);
  SUBCASE("within budget always proceeds") {
    for (int t = 0; t < 100; ++t)
      CHECK(budget_gate(5.0, 10.0, 2.0, rng) == GateDecision::kProceed);
  }
  SUBCASE("overshoot stops with probability 1 - (k - spent)/next") {
    const long draws = 100000;
    long stops = 0;
    for (long t = 0; t < draws; ++t)
      if (budget_gate(9.0, 10.0, 2.0, rng) == GateDecision::kStop) ++stops;
    double fraction = static_cast<double>(stops) / draws;
    CHECK(std::abs(fraction - 0.5) <= 3.0 * std::sqrt(0.25 / draws));
  }
  SUBCASE("tight budgets stop almost surely") {
    const long draws = 100000;
    long stops = 0;
    for (long t = 0; t < draws; ++t)
      if (budget_gate(9.9, 10.0, 1.0, rng) == GateDecision::kStop) ++stops;
    double fraction = static_cast<double>(stops) / draws;
    CHECK(std::abs(fraction - 0.9) <= 3.0 * std::sqrt(0.9 * 0.1 / draws));
  }
  SUBCASE("an exhausted budget is a contract violation") {
    CHECK_THROWS_AS(budget_gate(10.0, 10.0, 1.0, rng), ContractError);
  }
}

TEST_CASE("iteration bound from sorted first-trial costs") {
  Graph g = testing::path3_graph();
  Instance unit = make_uniform_instance(g, 0.5, 2, CostModel{}, 2.5);
  CHECK(max_iterations_r(unit, 2.5) == 3);

  CostModel staircase;
  staircase.overrides[{1, 1}] = 2.0;
  staircase.overrides[{1, 2}] = 2.0;
  staircase.overrides[{2, 1}] = 3.0;
  staircase.overrides[{2, 2}] = 3.0;
  Instance varied = make_uniform_instance(g, 0.5, 2, staircase, 10.0);
  CHECK(max_iterations_r(varied, 10.0) == 3);  // 1 + 2 + 3 fits entirely
  CHECK(max_iterations_r(varied, 1.0) == 1);
  CHECK(max_iterations_r(varied, 0.0) == 0);
}

TEST_CASE("adaptive run with zero budget does nothing") {
  Instance inst = testing::path3_instance(0.0);
  ExactGainEstimator estimator;
  auto selector = adaptive_greedy_selector(estimator);
  RealizationOracle oracle(inst, 1);
  PolicyTrace trace = run_adaptive_policy(*selector, inst, oracle, 9);
  CHECK(trace.trials.empty());
  CHECK(trace.realized_spread == 0);
  CHECK(trace.total_cost == doctest::Approx(0.0));
  CHECK(trace.to_log().empty());
}

TEST_CASE("single-node run takes exactly one trial under budget 1") {
  Instance inst = single_node_instance(1.0);
  ExactGainEstimator estimator;
  auto selector = adaptive_greedy_selector(estimator);
  const int runs = 10000;
  double total_spread = 0.0;
  for (int r = 0; r < runs; ++r) {
    RealizationOracle oracle(inst, derive_seed(501, r));
    PolicyTrace trace = run_adaptive_policy(*selector, inst, oracle, derive_seed(502, r));
    REQUIRE(trace.trials.size() == 1);
    total_spread += trace.realized_spread;
  }
  double mean = total_spread / runs;
  CHECK(std::abs(mean - 0.5) <= 3.0 * std::sqrt(0.25 / runs));
}

TEST_CASE("replays are byte-identical") {
  Instance inst = testing::path3_instance();
  ExactGainEstimator estimator;
  auto selector = adaptive_greedy_selector(estimator);
  RealizationOracle oracle_a(inst, 77);
  PolicyTrace a = run_adaptive_policy(*selector, inst, oracle_a, 33);
  RealizationOracle oracle_b(inst, 77);
  PolicyTrace b = run_adaptive_policy(*selector, inst, oracle_b, 33);
  CHECK(a.to_log() == b.to_log());
  CHECK(a.final_x == b.final_x);
  CHECK(a.realized_spread == b.realized_spread);
  CHECK(a.total_cost == doctest::Approx(b.total_cost));
}

TEST_CASE("exact greedy selector ranks the path correctly") {
  Instance inst = testing::path3_instance();
  ExactGainEstimator estimator;
  auto selector = adaptive_greedy_selector(estimator);
  RngStream kappa(503), omega(504);

  SUBCASE("fresh state picks the source") {
    SeedingVector x = SeedingVector::zeros(3);
    PartialRealization psi(inst);
    ResidualGraph residual = residual_graph(inst, psi);
    auto ctx = make_context(inst, x, psi, residual, kappa, omega);
    CHECK(selector->select(ctx) == NodeId{0});
  }
  SUBCASE("a tie goes to the lowest id") {
    SeedingVector x{{0, 1, 0}};
    PartialRealization psi(inst);
    psi.record_trial(1, 1, true);
    psi.record_edge(1, false);
    psi.mark_diffused(1);
    ResidualGraph residual = residual_graph(inst, psi);
    auto ctx = make_context(inst, x, psi, residual, kappa, omega);
    // both remaining nodes score 0.5 / 1
    CHECK(selector->select(ctx) == NodeId{0});
  }
  SUBCASE("exhausted caps leave nothing to select") {
    SeedingVector x{{2, 2, 2}};
    PartialRealization psi(inst);
    for (NodeId u : {0, 1, 2}) {
      psi.record_trial(u, 1, false);
      psi.record_trial(u, 2, false);
    }
    ResidualGraph residual = residual_graph(inst, psi);
    auto ctx = make_context(inst, x, psi, residual, kappa, omega);
    CHECK_FALSE(selector->select(ctx).has_value());
  }
}

TEST_CASE("sampled selector agrees with the exact one most of the time") {
  Instance inst = testing::path3_instance();
  auto selector = sampled_adaptive_greedy_selector(0.5);
  SeedingVector x = SeedingVector::zeros(3);
  PartialRealization psi(inst);
  ResidualGraph residual = residual_graph(inst, psi);
  int picked_first = 0;
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    RngStream kappa(derive_seed(505, r)), omega(derive_seed(506, r));
    auto ctx = make_context(inst, x, psi, residual, kappa, omega);
    if (selector->select(ctx) == NodeId{0}) ++picked_first;
  }
  CHECK(picked_first >= 850);
}

TEST_CASE("sampled selector returns nothing on an empty residual graph") {
  Instance inst = testing::path3_instance();
  auto selector = sampled_adaptive_greedy_selector(0.5);
  SeedingVector x = SeedingVector::zeros(3);
  PartialRealization psi(inst);
  for (NodeId u : {0, 1, 2}) {
    psi.record_trial(u, 1, true);
    psi.mark_diffused(u);
  }
  for (int e : {0, 1}) psi.record_edge(e, true);
  ResidualGraph residual = residual_graph(inst, psi);
  RngStream kappa(507), omega(508);
  auto ctx = make_context(inst, x, psi, residual, kappa, omega);
  CHECK_FALSE(selector->select(ctx).has_value());
}

TEST_CASE("sampled and exact adaptive greedy agree end to end") {
  Instance inst = testing::path3_instance(2.0);
  ExactGainEstimator estimator;
  auto exact_sel = adaptive_greedy_selector(estimator);
  auto sampled_sel = sampled_adaptive_greedy_selector(0.5);
  const int runs = 10000;
  double sum_e = 0.0, sq_e = 0.0, sum_s = 0.0, sq_s = 0.0;
  for (int r = 0; r < runs; ++r) {
    RealizationOracle oracle_e(inst, derive_seed(509, r));
    double fe = run_adaptive_policy(*exact_sel, inst, oracle_e, derive_seed(510, r))
                    .realized_spread;
    sum_e += fe;
    sq_e += fe * fe;
    RealizationOracle oracle_s(inst, derive_seed(511, r));
    double fs = run_adaptive_policy(*sampled_sel, inst, oracle_s, derive_seed(512, r))
                    .realized_spread;
    sum_s += fs;
    sq_s += fs * fs;
  }
  double mean_e = sum_e / runs, mean_s = sum_s / runs;
  double se_e = std::sqrt((sq_e - sum_e * sum_e / runs) / (runs - 1) / runs);
  double se_s = std::sqrt((sq_s - sum_s * sum_s / runs) / (runs - 1) / runs);
  CHECK(std::abs(mean_e - mean_s) <= 3.0 * std::sqrt(se_e * se_e + se_s * se_s));
}

TEST_CASE("heuristic selectors") {
  RngStream kappa(513), omega(514);

  SUBCASE("max degree favors the star center") {
    std::vector<Edge> edges;
    for (NodeId leaf = 1; leaf <= 4; ++leaf) edges.push_back(Edge{0, leaf, 0.5, true});
    Instance star = make_uniform_instance(Graph(5, std::move(edges)), 0.5, 2, CostModel{}, 3.0);
    auto selector = heuristic_selector(HeuristicKind::kMaxDegree);
    SeedingVector x = SeedingVector::zeros(5);
    PartialRealization psi(star);
    ResidualGraph residual = residual_graph(star, psi);
    auto ctx = make_context(star, x, psi, residual, kappa, omega);
    CHECK(selector->select(ctx) == NodeId{0});
  }
  SUBCASE("max prob favors the largest beta") {
    Instance inst(testing::path3_graph(), {0.9, 0.1, 0.1}, {2, 2, 2}, CostModel{}, 2.0);
    auto selector = heuristic_selector(HeuristicKind::kMaxProb);
    SeedingVector x = SeedingVector::zeros(3);
    PartialRealization psi(inst);
    ResidualGraph residual = residual_graph(inst, psi);
    auto ctx = make_context(inst, x, psi, residual, kappa, omega);
    CHECK(selector->select(ctx) == NodeId{0});
  }
  SUBCASE("random selects uniformly over the feasible set") {
    Instance inst = testing::path3_instance();
    auto selector = heuristic_selector(HeuristicKind::kRandom);
    SeedingVector x = SeedingVector::zeros(3);
    PartialRealization psi(inst);
    ResidualGraph residual = residual_graph(inst, psi);
    std::map<NodeId, int> counts;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
      auto ctx = make_context(inst, x, psi, residual, kappa, omega);
      ++counts[*selector->select(ctx)];
    }
    for (NodeId u : {0, 1, 2}) {
      double fraction = static_cast<double>(counts[u]) / draws;
      CHECK(std::abs(fraction - 1.0 / 3) <= 3.0 * std::sqrt((1.0 / 3) * (2.0 / 3) / draws));
    }
  }
}

TEST_CASE("non-adaptive greedy with the exact evaluator") {
  Instance inst = testing::path3_instance(1.0);
  auto mu_eval = [&](const SeedingVector& x) { return exact_mu(inst, x); };

  SUBCASE("budget one buys the best single trial") {
    RngStream kappa(515);
    SeedingVector x = greedy_nonadaptive(inst, mu_eval, kappa);
    CHECK(x == SeedingVector{{1, 0, 0}});
  }
  SUBCASE("zero budget buys nothing") {
    Instance idle = testing::path3_instance(0.0);
    RngStream kappa(516);
    SeedingVector x = greedy_nonadaptive(idle, mu_eval, kappa);
    CHECK(x == SeedingVector::zeros(3));
  }
  SUBCASE("certain activation at unit caps reduces to classic greedy") {
    Instance sure = make_uniform_instance(testing::path3_graph(), 1.0, 1, CostModel{}, 2.0);
    auto sure_eval = [&](const SeedingVector& x) { return exact_mu(sure, x); };
    RngStream kappa(517);
    SeedingVector x = greedy_nonadaptive(sure, sure_eval, kappa);
    // classic greedy picks node 0 (sigma 1.75); nodes 1 and 2 then tie at
    // marginal 0.75, and the tie rule takes the lower id
    CHECK(x == SeedingVector{{1, 1, 0}});
    CHECK(exact_mu(sure, x) == doctest::Approx(exact_sigma(sure.graph(), {0, 1})));
  }
}

TEST_CASE("sampled non-adaptive greedy") {
  Instance inst = testing::path3_instance(1.0);

  SUBCASE("marginal identity: incremental equals naive recomputation") {
    RngStream omega(518);
    RRCollection coll(3);
    generate_rr_sets(inst.graph(), 500, omega, coll);
    SeedingVector x = SeedingVector::zeros(3);
    for (NodeId step : {0, 1, 0}) {
      for (NodeId u = 0; u < 3; ++u) {
        if (x[u] >= inst.cap(u)) continue;
        SeedingVector bumped = x;
        bumped.bump(u);
        double naive = coll.lattice_coverage(bumped, inst.betas()) -
                       coll.lattice_coverage(x, inst.betas());
        double shortcut = 0.0;
        for (int i = 0; i < coll.size(); ++i) {
          bool contains = false;
          double survive = 1.0;
          for (NodeId w : coll.set(i).members) {
            if (w == u) contains = true;
            if (x[w] > 0) survive *= std::pow(1.0 - inst.beta(w), x[w]);
          }
          if (contains) shortcut += inst.beta(u) * survive;
        }
        shortcut /= coll.size();
        CHECK(naive == doctest::Approx(shortcut).epsilon(1e-12));
      }
      x.bump(step);
    }
  }
  SUBCASE("large collections recover the best single trial") {
    int hits = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
      RngStream kappa(derive_seed(519, r)), omega(derive_seed(520, r));
      SeedingVector x = sampled_greedy_nonadaptive(inst, 100000, kappa, omega);
      if (x == SeedingVector{{1, 0, 0}}) ++hits;
    }
    CHECK(hits >= 99);
  }
  SUBCASE("zero budget buys nothing") {
    Instance idle = testing::path3_instance(0.0);
    RngStream kappa(521), omega(522);
    CHECK(sampled_greedy_nonadaptive(idle, 1000, kappa, omega) == SeedingVector::zeros(3));
  }
}

TEST_CASE("traces respect caps, order and the expected knapsack") {
  Instance inst = testing::path3_instance(2.0);
  auto selector = heuristic_selector(HeuristicKind::kRandom);
  const int runs = 10000;
  double sum_cost = 0.0, sq_cost = 0.0;
  for (int r = 0; r < runs; ++r) {
    RealizationOracle oracle(inst, derive_seed(523, r));
    PolicyTrace trace = run_adaptive_policy(*selector, inst, oracle, derive_seed(524, r));
    sum_cost += trace.total_cost;
    sq_cost += trace.total_cost * trace.total_cost;

    std::map<NodeId, int> last_index;
    std::map<NodeId, bool> succeeded;
    SeedingVector recount = SeedingVector::zeros(3);
    for (const TrialRecord& t : trace.trials) {
      CHECK(t.trial_index == last_index[t.node] + 1);  // sequential per node
      CHECK_FALSE(succeeded[t.node]);                  // only after failures
      last_index[t.node] = t.trial_index;
      succeeded[t.node] = t.success;
      recount.bump(t.node);
    }
    CHECK(recount == trace.final_x);
    for (NodeId u = 0; u < 3; ++u) CHECK(trace.final_x[u] <= inst.cap(u));
    CHECK(trace.realized_spread == trace.final_psi.active_count());
  }
  double mean = sum_cost / runs;
  double se = std::sqrt((sq_cost - sum_cost * sum_cost / runs) / (runs - 1) / runs);
  CHECK(mean <= 2.0 + 3.0 * se);
}

TEST_CASE("observations stay consistent with the oracle's world") {
  Instance inst = testing::path3_instance(3.0);
  auto selector = heuristic_selector(HeuristicKind::kRandom);
  for (int r = 0; r < 200; ++r) {
    RealizationOracle oracle(inst, derive_seed(526, r));
    PolicyTrace trace = run_adaptive_policy(*selector, inst, oracle, derive_seed(527, r));
    // the run's final psi agrees with the fully materialized world, and
    // every intermediate psi is one of its subrealizations
    FullRealization phi = oracle.materialize();
    CHECK(is_consistent(phi, trace.final_psi));
  }
}

TEST_CASE("fixed plans execute every scheduled trial") {
  Instance inst = testing::path3_instance(10.0);
  SeedingVector x{{2, 0, 1}};
  RealizationOracle oracle(inst, 525);
  PolicyTrace trace = execute_seeding_vector(inst, x, oracle);
  CHECK(trace.final_x == x);
  CHECK(trace.trials.size() == 3);
  CHECK(trace.total_cost == doctest::Approx(inst.vector_cost(x)));
}

TEST_SUITE_END();
