#pragma once

// Prize-collecting Steiner forest via Goemans-Williamson moat growing.
//
// Growth phase: every vertex starts as its own cluster with potential equal
// to its prize; active clusters grow moats at unit rate. An edge whose moats
// cover its cost merges the two clusters; a cluster whose accumulated dual
// reaches its prize deactivates. Events are processed in time order with
// ties broken edges-first, then by lowest index, so the output is a pure
// function of the instance.
//
// Pruning phase: each tree of the merge forest is pruned by repeatedly
// dropping leaves whose prize is strictly below their edge cost (ties keep
// the leaf), then re-routed through the minimum spanning forest of its
// positive-prize vertices when that is no more expensive. The best
// `target_components` trees by (prize - cost) are kept, the rest forfeited.

#include <vector>

#include "graphiht/graph.hpp"

namespace graphiht {

struct PcsfInstance {
  const Graph* graph = nullptr;
  std::vector<double> prizes;  // per vertex, >= 0
  std::vector<double> costs;   // per edge, >= 0
  int target_components = 1;   // g
};

struct Forest {
  Support vertices;
  std::vector<int> edge_indices;  // into graph.edges()
  int num_trees = 0;
};

Forest solve_pcsf(const PcsfInstance& instance);

// sum of forfeited prizes plus cost of kept edges.
double forest_objective(const PcsfInstance& instance, const Forest& forest);

}  // namespace graphiht
