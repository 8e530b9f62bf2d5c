#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "imma/experiment.hpp"
#include "imma/oracle.hpp"
#include "imma/rng.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::string dataset_override;
  std::string default_prob_override;
  int directed_override = -1;  // -1 keep, 0 undirected, 1 directed
  std::string output_override;
  std::string summary_override;
  long long master_seed_override = -1;
  int replications_override = -1;
  bool parallel = false;
  bool no_timing = false;
};

imma::ExperimentConfig load_config(const RunOptions& opt) {
  imma::ExperimentConfig config = imma::parse_config_file(opt.config_path);
  if (!opt.dataset_override.empty()) config.dataset = opt.dataset_override;
  if (!opt.default_prob_override.empty()) config.default_prob = opt.default_prob_override;
  if (opt.directed_override >= 0) config.directed = opt.directed_override == 1;
  if (!opt.output_override.empty()) config.output = opt.output_override;
  if (!opt.summary_override.empty()) config.summary_output = opt.summary_override;
  if (opt.master_seed_override >= 0)
    config.master_seed = static_cast<std::uint64_t>(opt.master_seed_override);
  if (opt.replications_override > 0) config.replications = opt.replications_override;
  if (opt.parallel) config.parallel = true;
  if (opt.no_timing) config.record_timing = false;
  return config;
}

void add_run_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("config", opt.config_path, "experiment config file")->required();
  cmd->add_option("--dataset", opt.dataset_override, "override the dataset path");
  cmd->add_option("--default-prob", opt.default_prob_override,
                  "indegree or constant:<p> for edges without probabilities");
  cmd->add_flag_callback("--directed", [&opt]() { opt.directed_override = 1; },
                         "treat the edge list as directed");
  cmd->add_flag_callback("--undirected", [&opt]() { opt.directed_override = 0; },
                         "expand each input edge into both directions");
  cmd->add_option("--output", opt.output_override, "override the result CSV path");
  cmd->add_option("--summary-output", opt.summary_override, "override the summary CSV path");
  cmd->add_option("--master-seed", opt.master_seed_override, "override the master seed");
  cmd->add_option("--replications", opt.replications_override, "override the replication count");
  cmd->add_flag("--parallel", opt.parallel, "fan replications out across worker threads");
  cmd->add_flag("--no-timing", opt.no_timing, "zero the wall_ms column for exact replays");
}

int cmd_run(const RunOptions& opt) {
  imma::ExperimentConfig config = load_config(opt);
  imma::ExperimentResult result = imma::run_experiment(config);
  std::ofstream rows(config.output);
  if (!rows) {
    std::cerr << "cannot write " << config.output << "\n";
    return 1;
  }
  rows << result.csv();
  std::ofstream summary(config.summary_output);
  if (!summary) {
    std::cerr << "cannot write " << config.summary_output << "\n";
    return 1;
  }
  summary << result.summary_csv();
  std::cout << result.summary_csv();
  std::cout << "wrote " << result.rows.size() << " rows to " << config.output << "\n";
  return 0;
}

int cmd_bench(const RunOptions& opt) {
  imma::ExperimentConfig config = load_config(opt);
  config.record_timing = true;
  imma::ExperimentResult result = imma::run_experiment(config);
  std::cout << "policy,k,mean_wall_ms\n";
  for (const imma::SummaryRow& s : result.summaries())
    std::cout << s.policy << ',' << s.k << ',' << s.mean_wall_ms << '\n';
  return 0;
}

// Random desk-scale instances for the property suites.
imma::Instance random_tiny_instance(imma::RngStream& rng, int max_nodes, int max_edges,
                                    int max_cap) {
  int n = rng.uniform_int(2, max_nodes);
  int m = rng.uniform_int(1, max_edges);
  std::vector<imma::Edge> edges;
  for (int e = 0; e < m; ++e) {
    int src = rng.uniform_int(0, n - 1);
    int dst = rng.uniform_int(0, n - 1);
    double p = 0.1 + 0.8 * rng.uniform01();
    edges.push_back(imma::Edge{src, dst, p, true});
  }
  imma::Graph g(n, std::move(edges));
  std::vector<double> beta(n);
  std::vector<int> caps(n);
  for (int u = 0; u < n; ++u) {
    beta[u] = 0.2 + 0.7 * rng.uniform01();
    caps[u] = rng.uniform_int(1, max_cap);
  }
  return imma::Instance(std::move(g), std::move(beta), std::move(caps), imma::CostModel{},
                        2.5);
}

int cmd_check(int instances, std::uint64_t seed, int max_nodes, int max_edges, int max_cap) {
  imma::RngStream rng(seed);
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    imma::Instance inst = random_tiny_instance(rng, max_nodes, max_edges, max_cap);
    imma::ViolationReport monotone = imma::check_adaptive_monotone(inst);
    imma::ViolationReport dr = imma::check_adaptive_dr_submodular(inst);
    bool ok = monotone.empty() && dr.empty();
    std::cout << "instance " << i << ": " << (ok ? "ok" : "VIOLATIONS") << "\n";
    if (!monotone.empty()) std::cout << monotone.to_text();
    if (!dr.empty()) std::cout << dr.to_text();
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::cout << "all " << instances << " instances passed the monotonicity and "
              << "diminishing-gain checks\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive influence maximization with repeatable seed activation"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run the experiment protocol of a config file");
  add_run_flags(run, run_opt);

  RunOptions bench_opt;
  CLI::App* bench = app.add_subcommand("bench", "run the protocol and report timing only");
  add_run_flags(bench, bench_opt);

  int check_instances = 20;
  std::uint64_t check_seed = 7;
  int check_nodes = 3, check_edges = 4, check_cap = 2;
  CLI::App* check = app.add_subcommand("check", "exhaustive property suites on tiny instances");
  check->add_option("--instances", check_instances, "number of random instances");
  check->add_option("--seed", check_seed, "seed for instance generation");
  check->add_option("--max-nodes", check_nodes, "node cap per instance");
  check->add_option("--max-edges", check_edges, "edge cap per instance");
  check->add_option("--max-cap", check_cap, "trial cap per node");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (bench->parsed()) return cmd_bench(bench_opt);
    if (check->parsed())
      return cmd_check(check_instances, check_seed, check_nodes, check_edges, check_cap);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
