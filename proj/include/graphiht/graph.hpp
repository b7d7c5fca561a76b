#pragma once

#include <span>
#include <string>
#include <vector>

#include "graphiht/rng.hpp"

namespace graphiht {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// Undirected weighted graph over coefficient indices. Immutable after
// construction; adjacency is symmetric by construction.
class Graph {
 public:
  Graph(int num_vertices, std::vector<Edge> edges);

  // rows x cols 4-connected lattice with unit weights, row-major vertex ids.
  static Graph grid(int rows, int cols);

  int num_vertices() const { return p_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // (neighbor, edge index) pairs for a vertex.
  std::span<const std::pair<int, int>> neighbors(int v) const;

 private:
  int p_;
  std::vector<Edge> edges_;
  std::vector<std::pair<int, int>> adj_flat_;
  std::vector<int> adj_start_;
};

// Sorted, duplicate-free vertex indices.
using Support = std::vector<int>;

struct WgmModel {
  int sparsity = 1;          // s
  int components = 1;        // g
  double cost_budget = 0.0;  // C
  double head_slack = 2.5;   // head projection may return up to ceil(slack*s)
  double tail_slack = 1.5;   // tail search window before the trim to s

  void validate(int p) const;
  int head_limit() const;  // ceil(head_slack * s)
  int tail_limit() const;  // ceil(tail_slack * s)
};

// Model that admits the slack-inflated supports the projections may emit.
// On unit-weight graphs the budget grows by one per extra vertex.
WgmModel slack_model(const WgmModel& model, int size_limit);

// Number of connected components of the subgraph induced by the support;
// the empty support has 0 components.
int connected_components(const Graph& graph, const Support& support);

// Total weight of a minimum spanning forest of the induced subgraph.
double msf_weight(const Graph& graph, const Support& support);

bool is_in_model(const Graph& graph, const Support& support, const WgmModel& model);

// Exactly s vertices in exactly g components, grown by g random walks on
// disjoint neighborhoods. Deterministic given the generator state. Throws
// GenerationError after `retries` failed attempts.
Support random_connected_support(const Graph& graph, int s, int g, Rng& rng,
                                 int retries = 100);

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Edge-list text format: "p <num_vertices> <num_edges>" then one
// "e <u> <v> <w>" line per edge. Rejects self loops and duplicates.
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& graph, const std::string& path);

}  // namespace graphiht
