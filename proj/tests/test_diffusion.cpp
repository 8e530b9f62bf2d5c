#include <doctest.h>

#include <cmath>

#include "imma/diffusion.hpp"
#include "imma/oracle.hpp"
#include "test_util.hpp"

using namespace imma;

TEST_SUITE_BEGIN("diffusion");

TEST_CASE("spread counts live-edge reachability") {
  Graph g = testing::path3_graph();
  CHECK(spread(g, {1, 1}, {0}) == 3);
  CHECK(spread(g, {1, 1}, {}) == 0);
  CHECK(spread(g, {0, 1}, {0}) == 1);
  CHECK(spread(g, {1, 0}, {0}) == 2);
}

TEST_CASE("spread is monotone in the seed set") {
  RngStream rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = testing::random_tiny_instance(rng, 3, 4);
    const Graph& g = inst.graph();
    const int m = g.edge_count();
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::vector<std::uint8_t> states(m);
      for (int e = 0; e < m; ++e) states[e] = (mask >> e) & 1;
      for (int seed_mask = 0; seed_mask < (1 << g.node_count()); ++seed_mask) {
        std::vector<NodeId> seeds;
        for (NodeId u = 0; u < g.node_count(); ++u)
          if ((seed_mask >> u) & 1) seeds.push_back(u);
        int base = spread(g, states, seeds);
        for (NodeId v = 0; v < g.node_count(); ++v) {
          std::vector<NodeId> grown = seeds;
          grown.push_back(v);
          CHECK(spread(g, states, grown) >= base);
        }
      }
    }
  }
}

TEST_CASE("mc_sigma matches the enumeration oracle on the path") {
  Graph g = testing::path3_graph();
  CHECK(exact_sigma(g, {0}) == doctest::Approx(1.75));  // the frozen oracle value
  RngStream rng(300);
  Estimate est = mc_sigma(g, {0}, 100000, rng);
  CHECK(std::abs(est.value - 1.75) <= 3.0 * est.std_error);
}

TEST_CASE("mc_sigma degenerate cases") {
  Graph g = testing::path3_graph();
  RngStream rng(301);
  CHECK(mc_sigma(g, {}, 1000, rng).value == doctest::Approx(0.0));

  Graph sure(3, {Edge{0, 1, 1.0, true}, Edge{1, 2, 1.0, true}});
  Estimate est = mc_sigma(sure, {0}, 1000, rng);
  CHECK(est.value == doctest::Approx(3.0));
  CHECK(est.std_error == doctest::Approx(0.0));
}

TEST_CASE("mc_sigma is unbiased against the oracle on random tiny instances") {
  RngStream rng(302);
  int agreements = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    Instance inst = testing::random_tiny_instance(rng, 3, 4);
    std::vector<NodeId> seeds{rng.uniform_int(0, inst.node_count() - 1)};
    double truth = exact_sigma(inst.graph(), seeds);
    Estimate est = mc_sigma(inst.graph(), seeds, 20000, rng);
    double tol = 3.0 * est.std_error + 1e-12;
    if (std::abs(est.value - truth) <= tol) ++agreements;
  }
  CHECK(agreements >= trials - 1);  // ~99.7% per trial by construction
}

TEST_CASE("constructed graph carries the virtual-seed reduction") {
  Instance inst = testing::path3_instance();

  SUBCASE("two trials on node 0") {
    SeedingVector x{{2, 0, 0}};
    ConstructedGraph built = constructed_graph(inst, x);
    CHECK(built.graph.node_count() == 6);
    CHECK(built.virtual_seeds == std::vector<NodeId>{3, 4, 5});
    REQUIRE(built.graph.edge_count() == 3);  // two original + one virtual
    const Edge& virt = built.graph.edge(2);
    CHECK(virt.src == 3);
    CHECK(virt.dst == 0);
    CHECK(virt.prob == doctest::Approx(0.75));
    // sigma over the constructed graph minus |V| equals mu: frozen oracle
    // value 0.75 * 1.75 = 1.3125.
    CHECK(exact_mu(inst, x) == doctest::Approx(1.3125));
    double sigma = exact_sigma(built.graph, built.virtual_seeds);
    CHECK(sigma - 3.0 == doctest::Approx(1.3125));
  }
  SUBCASE("all-zero vector spreads nothing") {
    SeedingVector x = SeedingVector::zeros(3);
    ConstructedGraph built = constructed_graph(inst, x);
    CHECK(built.graph.edge_count() == 2);  // no virtual edges at probability 0
    CHECK(exact_sigma(built.graph, built.virtual_seeds) - 3.0 == doctest::Approx(0.0));
  }
  SUBCASE("certain activation reduces to plain influence maximization") {
    Instance sure = make_uniform_instance(testing::path3_graph(), 1.0, 2, CostModel{}, 2.0);
    SeedingVector x{{1, 0, 0}};
    RngStream rng(303);
    ConstructedGraph built = constructed_graph(sure, x);
    Estimate est = mc_sigma(built.graph, built.virtual_seeds, 100000, rng);
    CHECK(std::abs((est.value - 3.0) - 1.75) <= 3.0 * est.std_error);
  }
}

TEST_CASE("mc_mu matches the enumeration oracle") {
  Instance inst = testing::path3_instance();
  RngStream rng(304);

  SUBCASE("single trial on the source") {
    CHECK(exact_mu(inst, SeedingVector{{1, 0, 0}}) == doctest::Approx(0.875));
    Estimate est = mc_mu(inst, SeedingVector{{1, 0, 0}}, 100000, rng);
    CHECK(std::abs(est.value - 0.875) <= 3.0 * est.std_error);
  }
  SUBCASE("trials on two nodes") {
    CHECK(exact_mu(inst, SeedingVector{{1, 1, 0}}) == doctest::Approx(1.4375));
    Estimate est = mc_mu(inst, SeedingVector{{1, 1, 0}}, 100000, rng);
    CHECK(std::abs(est.value - 1.4375) <= 3.0 * est.std_error);
  }
  SUBCASE("zero vector is exactly zero") {
    Estimate est = mc_mu(inst, SeedingVector::zeros(3), 1000, rng);
    CHECK(est.value == doctest::Approx(0.0));
    CHECK(est.std_error == doctest::Approx(0.0));
  }
}

TEST_CASE("constructed-graph simulation agrees with exact_mu on random instances") {
  RngStream rng(305);
  int agreements = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    Instance inst = testing::random_tiny_instance(rng, 3, 4, 2);
    SeedingVector x = SeedingVector::zeros(inst.node_count());
    for (NodeId u = 0; u < inst.node_count(); ++u)
      x.trials[u] = rng.uniform_int(0, inst.cap(u));
    double truth = exact_mu(inst, x);
    ConstructedGraph built = constructed_graph(inst, x);
    Estimate est = mc_sigma(built.graph, built.virtual_seeds, 20000, rng);
    double tol = 3.0 * est.std_error + 1e-12;
    if (std::abs((est.value - inst.node_count()) - truth) <= tol) ++agreements;
  }
  CHECK(agreements >= trials - 1);
}

TEST_CASE("observe_diffusion walks the full-adoption closure") {
  Instance inst = testing::path3_instance();

  SUBCASE("live then blocked edge") {
    // An oracle whose world has e01 live and e12 blocked.
    std::uint64_t seed = 0;
    for (std::uint64_t candidate = 0; candidate < 10000; ++candidate) {
      RealizationOracle probe(inst, candidate);
      if (probe.edge_live(0) && !probe.edge_live(1)) {
        seed = candidate;
        break;
      }
    }
    RealizationOracle oracle(inst, seed);
    REQUIRE(oracle.edge_live(0));
    REQUIRE_FALSE(oracle.edge_live(1));

    PartialRealization psi(inst);
    psi.record_trial(0, 1, true);
    DiffusionOutcome outcome = observe_diffusion(oracle, psi, 0);
    CHECK(outcome.newly_active == std::vector<NodeId>{0, 1});
    REQUIRE(outcome.observations.size() == 2);
    CHECK(outcome.observations[0] == std::pair<int, bool>{0, true});
    CHECK(outcome.observations[1] == std::pair<int, bool>{1, false});
    CHECK(psi.is_active(1));
    CHECK_FALSE(psi.is_active(2));
    // closure: no active node keeps an unresolved out-edge
    for (NodeId u = 0; u < 3; ++u)
      if (psi.is_active(u))
        for (int e : inst.graph().out_edges(u))
          CHECK(psi.edge_state(e) != TriState::kUnknown);
  }

  SUBCASE("seed with no out-edges observes nothing") {
    RealizationOracle oracle(inst, 9);
    PartialRealization psi(inst);
    psi.record_trial(2, 1, true);
    DiffusionOutcome outcome = observe_diffusion(oracle, psi, 2);
    CHECK(outcome.newly_active == std::vector<NodeId>{2});
    CHECK(outcome.observations.empty());
  }

  SUBCASE("live edge into an active node reveals without activating") {
    Graph g(2, {Edge{0, 1, 1.0, true}, Edge{1, 0, 1.0, true}});
    Instance two = make_uniform_instance(std::move(g), 0.5, 2, CostModel{}, 4.0);
    RealizationOracle oracle(two, 11);
    PartialRealization psi(two);
    psi.record_trial(1, 1, true);
    observe_diffusion(oracle, psi, 1);
    CHECK(psi.is_active(0));
    CHECK(psi.is_active(1));
    // both edges observed, nothing further to activate
    CHECK(psi.edge_state(0) == TriState::kYes);
    CHECK(psi.edge_state(1) == TriState::kYes);
  }

  SUBCASE("a non-activated seed is a contract violation") {
    RealizationOracle oracle(inst, 12);
    PartialRealization psi(inst);
    CHECK_THROWS_AS(observe_diffusion(oracle, psi, 0), ContractError);
    psi.record_trial(0, 1, false);
    CHECK_THROWS_AS(observe_diffusion(oracle, psi, 0), ContractError);
  }
}

TEST_SUITE_END();
