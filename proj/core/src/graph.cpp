#include "imma/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace imma {

Graph::Graph(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 0) throw ValidationError("graph: node_count must be nonnegative");
  out_.resize(node_count_);
  in_.resize(node_count_);
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.src < 0 || ed.src >= node_count_ || ed.dst < 0 || ed.dst >= node_count_)
      throw ValidationError("graph: edge endpoint out of range");
    if (ed.prob_explicit && !(ed.prob > 0.0 && ed.prob <= 1.0))
      throw ValidationError("graph: edge probability outside (0,1]");
    out_[ed.src].push_back(e);
    in_[ed.dst].push_back(e);
  }
}

bool Graph::all_probabilities_resolved() const {
  for (const Edge& e : edges_)
    if (!(e.prob > 0.0 && e.prob <= 1.0)) return false;
  return true;
}

Graph Graph::transpose() const {
  std::vector<Edge> reversed = edges_;
  for (Edge& e : reversed) std::swap(e.src, e.dst);
  Graph t(node_count_, std::move(reversed));
  t.labels_ = labels_;
  return t;
}

void Graph::set_original_labels(std::vector<long long> labels) {
  if (!labels.empty() && static_cast<int>(labels.size()) != node_count_)
    throw ValidationError("graph: label table size must equal node count");
  labels_ = std::move(labels);
}

namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#' || c == '%';
  }
  return true;
}

long long parse_label(const std::string& token, int line_no) {
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": expected integer node id, got '" +
                     token + "'");
  }
  if (pos != token.size())
    throw ParseError("line " + std::to_string(line_no) + ": expected integer node id, got '" +
                     token + "'");
  return value;
}

}  // namespace

Graph parse_edge_list(std::istream& input, bool directed) {
  std::unordered_map<long long, NodeId> id_of_label;
  std::vector<long long> labels;
  std::vector<Edge> edges;

  auto intern = [&](long long label) -> NodeId {
    auto [it, inserted] = id_of_label.try_emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;

    std::istringstream fields(line);
    std::string tok_u, tok_v, tok_p, extra;
    fields >> tok_u >> tok_v;
    if (tok_v.empty())
      throw ParseError("line " + std::to_string(line_no) + ": expected 'u v' or 'u v p'");
    bool has_p = static_cast<bool>(fields >> tok_p);
    if (fields >> extra)
      throw ParseError("line " + std::to_string(line_no) + ": trailing tokens after 'u v p'");

    NodeId u = intern(parse_label(tok_u, line_no));
    NodeId v = intern(parse_label(tok_v, line_no));

    Edge e{u, v, -1.0, false};
    if (has_p) {
      std::size_t pos = 0;
      double p = 0.0;
      try {
        p = std::stod(tok_p, &pos);
      } catch (const std::exception&) {
        pos = std::string::npos;
      }
      if (pos != tok_p.size() || !(p > 0.0 && p <= 1.0))
        throw ParseError("line " + std::to_string(line_no) + ": probability '" + tok_p +
                         "' outside (0,1]");
      e.prob = p;
      e.prob_explicit = true;
    }
    edges.push_back(e);
    if (!directed) edges.push_back(Edge{v, u, e.prob, e.prob_explicit});
  }

  if (edges.empty()) throw ParseError("edge list is empty");

  Graph g(static_cast<int>(labels.size()), std::move(edges));
  g.set_original_labels(std::move(labels));
  return g;
}

Graph parse_edge_list_file(const std::string& path, bool directed) {
  std::ifstream input(path);
  if (!input) throw ParseError("cannot open edge list file: " + path);
  return parse_edge_list(input, directed);
}

Graph default_probabilities(Graph g) {
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    if (e.prob_explicit) continue;
    e.prob = 1.0 / static_cast<double>(g.in_degree(e.dst));
  }
  Graph filled(g.node_count(), std::move(edges));
  filled.set_original_labels(g.original_labels());
  return filled;
}

Graph constant_probabilities(Graph g, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw ValidationError("constant_probabilities: p outside (0,1]");
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    if (e.prob_explicit) continue;
    e.prob = p;
  }
  Graph filled(g.node_count(), std::move(edges));
  filled.set_original_labels(g.original_labels());
  return filled;
}

double CostModel::trial_cost(NodeId u, int trial_index) const {
  if (auto it = overrides.find({u, trial_index}); it != overrides.end()) return it->second;
  return base * std::pow(growth, trial_index - 1);
}

std::vector<NodeId> SeedingVector::support() const {
  std::vector<NodeId> nodes;
  for (NodeId u = 0; u < size(); ++u)
    if (trials[u] > 0) nodes.push_back(u);
  return nodes;
}

bool leq(const SeedingVector& x, const SeedingVector& y) {
  if (x.size() != y.size()) return false;
  for (int u = 0; u < x.size(); ++u)
    if (x[u] > y[u]) return false;
  return true;
}

Instance::Instance(Graph graph, std::vector<double> beta, std::vector<int> caps,
                   CostModel cost, double budget)
    : graph_(std::move(graph)),
      beta_(std::move(beta)),
      caps_(std::move(caps)),
      cost_(std::move(cost)),
      budget_(budget) {
  const int n = graph_.node_count();
  if (static_cast<int>(beta_.size()) != n)
    throw ValidationError("instance: beta size " + std::to_string(beta_.size()) +
                          " does not match node count " + std::to_string(n));
  if (static_cast<int>(caps_.size()) != n)
    throw ValidationError("instance: b size " + std::to_string(caps_.size()) +
                          " does not match node count " + std::to_string(n));
  for (int u = 0; u < n; ++u) {
    if (!(beta_[u] > 0.0 && beta_[u] <= 1.0))
      throw ValidationError("instance: beta[" + std::to_string(u) + "] outside (0,1]");
    if (caps_[u] < 1)
      throw ValidationError("instance: b[" + std::to_string(u) + "] must be >= 1");
  }
  if (budget_ < 0.0) throw ValidationError("instance: k must be nonnegative");
  if (!graph_.all_probabilities_resolved())
    throw ValidationError("instance: graph has unresolved edge probabilities");
  if (!(cost_.base > 0.0)) throw ValidationError("instance: cost base must be positive");
  if (!(cost_.growth > 0.0)) throw ValidationError("instance: cost growth must be positive");
  // The standing assumption: c(<u,i>) <= c(<u,i+1>), all costs positive.
  for (int u = 0; u < n; ++u) {
    double prev = 0.0;
    for (int i = 1; i <= caps_[u]; ++i) {
      double c = cost_.trial_cost(u, i);
      if (!(c > 0.0))
        throw ValidationError("instance: cost(<" + std::to_string(u) + "," + std::to_string(i) +
                              ">) must be positive");
      if (c + 1e-12 < prev)
        throw ValidationError("instance: cost(<" + std::to_string(u) + "," + std::to_string(i) +
                              ">) decreases along the trial schedule");
      prev = c;
    }
  }
}

double Instance::trial_cost(NodeId u, int trial_index) const {
  if (u < 0 || u >= node_count()) throw ValidationError("trial_cost: node id out of range");
  if (trial_index < 1 || trial_index > caps_[u])
    throw ValidationError("trial_cost: trial index " + std::to_string(trial_index) +
                          " out of range 1.." + std::to_string(caps_[u]) + " for node " +
                          std::to_string(u));
  return cost_.trial_cost(u, trial_index);
}

double Instance::vector_cost(const SeedingVector& x) const {
  if (x.size() != node_count())
    throw ValidationError("vector_cost: seeding vector size mismatch");
  double total = 0.0;
  for (NodeId u = 0; u < x.size(); ++u) {
    if (x[u] < 0 || x[u] > caps_[u])
      throw ValidationError("vector_cost: x[" + std::to_string(u) + "] outside 0..b(u)");
    for (int i = 1; i <= x[u]; ++i) total += cost_.trial_cost(u, i);
  }
  return total;
}

Instance make_uniform_instance(Graph graph, double beta, int cap, CostModel cost,
                               double budget) {
  const int n = graph.node_count();
  return Instance(std::move(graph), std::vector<double>(n, beta), std::vector<int>(n, cap),
                  std::move(cost), budget);
}

}  // namespace imma
