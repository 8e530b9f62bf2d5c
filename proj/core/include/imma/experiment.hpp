#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "imma/graph.hpp"
#include "imma/rng.hpp"

namespace imma {

// Experiment protocol: which dataset, how node activation probabilities are
// drawn, the cost schedule, the budget sweep, and the policy roster. Parsed
// from a flat key=value text file.
struct ExperimentConfig {
  std::string dataset;
  bool directed = true;
  std::string default_prob = "indegree";  // or "constant:<p>"

  double beta_mean = 0.5;
  double beta_var = 1.0;
  double beta_lo = 0.0;
  double beta_hi = 1.0;

  int trial_cap = 5;
  double cost_base = 1.0;
  double cost_growth = 1.2;

  std::vector<double> budgets = {0, 10, 20, 30, 40, 50};
  int replications = 20;
  double epsilon = 0.5;
  std::vector<std::string> policies = {"sampled_adaptive_greedy", "random", "max_degree",
                                       "max_prob", "max_degree_prob"};
  long mc_sims = 300;
  std::string rr_count = "5000+1000*(k/10)";
  std::uint64_t master_seed = 1;

  std::string output = "results.csv";
  std::string summary_output = "summary.csv";
  bool parallel = false;
  bool record_timing = true;  // false zeroes wall_ms so CSV bytes replay exactly
};

ExperimentConfig parse_config(std::istream& input);
ExperimentConfig parse_config_file(const std::string& path);

// Known policy names; run_experiment rejects anything else before running.
const std::vector<std::string>& known_policies();

// RR-set count expression for the sampled non-adaptive greedy, either a
// plain integer or the form "A+B*(k/C)".
long rr_count_for_budget(const std::string& expr, double k);

// Draws from a normal(mean, sqrt(variance)) until the value lands in
// [lo, hi]; an exact 0 is redrawn so the result can serve as an activation
// probability.
double sample_truncated_normal(double mean, double variance, double lo, double hi,
                               RngStream& rng);

struct ResultRow {
  std::string dataset;
  std::string policy;
  double k = 0.0;
  int replication = 0;
  std::uint64_t master_seed = 0;
  int spread = 0;
  double cost = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

struct SummaryRow {
  std::string policy;
  double k = 0.0;
  int replications = 0;
  double mean_spread = 0.0;
  double stderr_spread = 0.0;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double mean_wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summaries() const;
  std::string csv() const;
  std::string summary_csv() const;
};

// Runs every (policy, budget, replication) cell: the activation
// probabilities and the underlying realization are drawn once per
// replication, so all policies face the same world; each cell derives its
// own selector/sampling streams from the master seed. Rows come back sorted
// by policy, budget, replication regardless of execution order.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace imma
