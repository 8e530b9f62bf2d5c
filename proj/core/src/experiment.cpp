#include "imma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "imma/errors.hpp"
#include "imma/policies.hpp"
#include "imma/realization.hpp"

namespace imma {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("config: boolean expected for '" + key + "', got '" + value + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& input) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    try {
      if (key == "dataset") config.dataset = value;
      else if (key == "directed") config.directed = parse_bool(value, key);
      else if (key == "default_prob") config.default_prob = value;
      else if (key == "beta_mean") config.beta_mean = std::stod(value);
      else if (key == "beta_var") config.beta_var = std::stod(value);
      else if (key == "beta_lo") config.beta_lo = std::stod(value);
      else if (key == "beta_hi") config.beta_hi = std::stod(value);
      else if (key == "b") config.trial_cap = std::stoi(value);
      else if (key == "cost_base") config.cost_base = std::stod(value);
      else if (key == "cost_growth") config.cost_growth = std::stod(value);
      else if (key == "budgets") {
        config.budgets.clear();
        for (const std::string& tok : split_list(value)) config.budgets.push_back(std::stod(tok));
      } else if (key == "replications") config.replications = std::stoi(value);
      else if (key == "epsilon") config.epsilon = std::stod(value);
      else if (key == "policies") config.policies = split_list(value);
      else if (key == "mc_sims") config.mc_sims = std::stol(value);
      else if (key == "rr_count") config.rr_count = value;
      else if (key == "master_seed") config.master_seed = std::stoull(value);
      else if (key == "output") config.output = value;
      else if (key == "summary_output") config.summary_output = value;
      else if (key == "parallel") config.parallel = parse_bool(value, key);
      else if (key == "record_timing") config.record_timing = parse_bool(value, key);
      else throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("config line " + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
  }
  if (config.replications < 1) throw ValidationError("config: replications must be >= 1");
  for (double k : config.budgets)
    if (k < 0.0) throw ValidationError("config: budgets must be nonnegative");
  if (!(config.beta_lo < config.beta_hi) || config.beta_lo < 0.0 || config.beta_hi > 1.0)
    throw ValidationError("config: beta interval must sit inside [0,1]");
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw ParseError("cannot open config file: " + path);
  return parse_config(input);
}

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names = {
      "adaptive_greedy", "sampled_adaptive_greedy", "greedy",        "sampled_greedy",
      "random",          "max_degree",              "max_prob",      "max_degree_prob"};
  return names;
}

long rr_count_for_budget(const std::string& expr, double k) {
  // Accepted forms: "N" or "A+B*(k/C)", whitespace-insensitive.
  std::string compact;
  for (char c : expr)
    if (c != ' ' && c != '\t') compact.push_back(c);
  try {
    std::size_t pos = 0;
    long base = std::stol(compact, &pos);
    if (pos == compact.size()) return std::max(1L, base);
    if (compact[pos] != '+') throw ParseError("");
    std::size_t rest = pos + 1;
    std::size_t used = 0;
    long slope = std::stol(compact.substr(rest), &used);
    rest += used;
    if (compact.compare(rest, 4, "*(k/") != 0) throw ParseError("");
    rest += 4;
    long divisor = std::stol(compact.substr(rest), &used);
    rest += used;
    if (compact.compare(rest, 1, ")") != 0 || rest + 1 != compact.size())
      throw ParseError("");
    if (divisor == 0) throw ParseError("");
    return std::max(1L, base + static_cast<long>(slope * (k / divisor)));
  } catch (const std::exception&) {
    throw ParseError("rr_count: expected 'N' or 'A+B*(k/C)', got '" + expr + "'");
  }
}

double sample_truncated_normal(double mean, double variance, double lo, double hi,
                               RngStream& rng) {
  if (!(lo < hi)) throw ValidationError("sample_truncated_normal: lo must be below hi");
  if (!(variance > 0.0)) throw ValidationError("sample_truncated_normal: variance must be positive");
  double stddev = std::sqrt(variance);
  for (;;) {
    double draw = rng.normal(mean, stddev);
    if (draw < lo || draw > hi || draw == 0.0) continue;
    return draw;
  }
}

namespace {

Graph load_dataset(const ExperimentConfig& config) {
  Graph g = parse_edge_list_file(config.dataset, config.directed);
  if (config.default_prob == "indegree") return default_probabilities(std::move(g));
  if (config.default_prob.starts_with("constant:")) {
    double p = std::stod(config.default_prob.substr(9));
    return constant_probabilities(std::move(g), p);
  }
  throw ValidationError("config: default_prob must be 'indegree' or 'constant:<p>'");
}

struct CellOutcome {
  int spread = 0;
  double cost = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

CellOutcome run_cell(const ExperimentConfig& config, const std::string& policy,
                     const Instance& inst, std::uint64_t run_seed, std::uint64_t phi_seed) {
  RealizationOracle oracle(inst, phi_seed);
  auto started = std::chrono::steady_clock::now();
  PolicyTrace trace = [&]() -> PolicyTrace {
    if (policy == "adaptive_greedy") {
      McGainEstimator estimator(config.mc_sims);
      auto selector = adaptive_greedy_selector(estimator);
      return run_adaptive_policy(*selector, inst, oracle, run_seed);
    }
    if (policy == "sampled_adaptive_greedy") {
      auto selector = sampled_adaptive_greedy_selector(config.epsilon);
      return run_adaptive_policy(*selector, inst, oracle, run_seed);
    }
    if (policy == "random" || policy == "max_degree" || policy == "max_prob" ||
        policy == "max_degree_prob") {
      HeuristicKind kind = policy == "random"       ? HeuristicKind::kRandom
                           : policy == "max_degree" ? HeuristicKind::kMaxDegree
                           : policy == "max_prob"   ? HeuristicKind::kMaxProb
                                                    : HeuristicKind::kMaxDegreeProb;
      auto selector = heuristic_selector(kind);
      return run_adaptive_policy(*selector, inst, oracle, run_seed);
    }
    RngStream kappa(derive_seed(run_seed, 0x6B61));
    RngStream omega(derive_seed(run_seed, 0x6F6D));
    if (policy == "greedy") {
      auto mu_eval = [&](const SeedingVector& x) {
        return mc_mu(inst, x, config.mc_sims, omega).value;
      };
      SeedingVector x = greedy_nonadaptive(inst, mu_eval, kappa);
      return execute_seeding_vector(inst, x, oracle);
    }
    // sampled_greedy
    long theta = rr_count_for_budget(config.rr_count, inst.budget());
    SeedingVector x = sampled_greedy_nonadaptive(inst, theta, kappa, omega);
    return execute_seeding_vector(inst, x, oracle);
  }();
  auto elapsed = std::chrono::steady_clock::now() - started;

  CellOutcome out;
  out.spread = trace.realized_spread;
  out.cost = trace.total_cost;
  out.iterations = trace.iterations;
  if (config.record_timing)
    out.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
  return out;
}

std::string format_budget(double k) {
  std::ostringstream out;
  out << k;
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  for (const std::string& policy : config.policies) {
    const auto& known = known_policies();
    if (std::find(known.begin(), known.end(), policy) == known.end())
      throw ValidationError("config: unknown policy '" + policy + "'");
  }
  Graph graph = load_dataset(config);  // parsing happens before any timing
  const int n = graph.node_count();

  CostModel cost{config.cost_base, config.cost_growth, {}};
  std::vector<int> caps(n, config.trial_cap);

  // Activation probabilities and the realization are per replication; every
  // policy and budget within a replication sees the same world.
  std::vector<std::vector<double>> betas(config.replications);
  std::vector<std::uint64_t> phi_seeds(config.replications);
  for (int rep = 0; rep < config.replications; ++rep) {
    RngStream beta_rng(derive_seed(config.master_seed, 0xB397, rep));
    betas[rep].resize(n);
    for (int u = 0; u < n; ++u)
      betas[rep][u] = sample_truncated_normal(config.beta_mean, config.beta_var,
                                              config.beta_lo, config.beta_hi, beta_rng);
    phi_seeds[rep] = derive_seed(config.master_seed, 0xF1, rep);
  }

  struct Cell {
    std::size_t policy_index;
    std::size_t budget_index;
    int replication;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < config.policies.size(); ++p)
    for (std::size_t b = 0; b < config.budgets.size(); ++b)
      for (int rep = 0; rep < config.replications; ++rep) cells.push_back(Cell{p, b, rep});

  auto run_one = [&](const Cell& cell) {
    const std::string& policy = config.policies[cell.policy_index];
    double k = config.budgets[cell.budget_index];
    Instance inst(graph, betas[cell.replication], caps, cost, k);
    std::uint64_t run_seed = derive_seed(config.master_seed, cell.policy_index,
                                         cell.budget_index, cell.replication);
    CellOutcome outcome = run_cell(config, policy, inst, run_seed, phi_seeds[cell.replication]);
    ResultRow row;
    row.dataset = config.dataset;
    row.policy = policy;
    row.k = k;
    row.replication = cell.replication;
    row.master_seed = config.master_seed;
    row.spread = outcome.spread;
    row.cost = outcome.cost;
    row.iterations = outcome.iterations;
    row.wall_ms = outcome.wall_ms;
    return row;
  };

  ExperimentResult result;
  result.rows.resize(cells.size());
  if (config.parallel) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < workers; ++w)
      tasks.push_back(std::async(std::launch::async, [&]() {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
          result.rows[i] = run_one(cells[i]);
      }));
    for (auto& t : tasks) t.get();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) result.rows[i] = run_one(cells[i]);
  }
  return result;
}

std::vector<SummaryRow> ExperimentResult::summaries() const {
  std::vector<SummaryRow> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    double sum_spread = 0.0, sq_spread = 0.0, sum_cost = 0.0, sq_cost = 0.0, sum_ms = 0.0;
    while (j < rows.size() && rows[j].policy == rows[i].policy && rows[j].k == rows[i].k) {
      sum_spread += rows[j].spread;
      sq_spread += static_cast<double>(rows[j].spread) * rows[j].spread;
      sum_cost += rows[j].cost;
      sq_cost += rows[j].cost * rows[j].cost;
      sum_ms += rows[j].wall_ms;
      ++j;
    }
    double count = static_cast<double>(j - i);
    SummaryRow s;
    s.policy = rows[i].policy;
    s.k = rows[i].k;
    s.replications = static_cast<int>(count);
    s.mean_spread = sum_spread / count;
    s.mean_cost = sum_cost / count;
    s.mean_wall_ms = sum_ms / count;
    if (count > 1) {
      double var_spread = (sq_spread - sum_spread * sum_spread / count) / (count - 1);
      double var_cost = (sq_cost - sum_cost * sum_cost / count) / (count - 1);
      s.stderr_spread = std::sqrt(std::max(0.0, var_spread) / count);
      s.stderr_cost = std::sqrt(std::max(0.0, var_cost) / count);
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

std::string ExperimentResult::csv() const {
  std::ostringstream out;
  out << "dataset,policy,k,replication,master_seed,spread,cost,iterations,wall_ms\n";
  out.setf(std::ios::fixed);
  for (const ResultRow& r : rows) {
    out.precision(6);
    out << r.dataset << ',' << r.policy << ',' << format_budget(r.k) << ',' << r.replication
        << ',' << r.master_seed << ',' << r.spread << ',' << r.cost << ',' << r.iterations
        << ',';
    out.precision(3);
    out << r.wall_ms << '\n';
  }
  return out.str();
}

std::string ExperimentResult::summary_csv() const {
  std::ostringstream out;
  out << "policy,k,replications,mean_spread,stderr_spread,mean_cost,stderr_cost,mean_wall_ms\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const SummaryRow& s : summaries())
    out << s.policy << ',' << format_budget(s.k) << ',' << s.replications << ','
        << s.mean_spread << ',' << s.stderr_spread << ',' << s.mean_cost << ','
        << s.stderr_cost << ',' << s.mean_wall_ms << '\n';
  return out.str();
}

}  // namespace imma
