#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "graphiht/pcsf.hpp"
#include "graphiht/rng.hpp"

using namespace graphiht;

namespace {

// Exhaustive oracle. For a fixed vertex set S the cheapest admissible
// forest spans S by a minimum spanning forest and then drops the most
// expensive spanning edges while the component budget allows, so the
// optimum is a scan over all subsets with few enough components.
double brute_force_optimum(const PcsfInstance& inst) {
  const Graph& g = *inst.graph;
  const int p = g.num_vertices();
  REQUIRE(p <= 12);
  double total_prize = 0.0;
  for (double pr : inst.prizes) total_prize += pr;

  double best = total_prize;  // empty forest
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    Support s;
    for (int v = 0; v < p; ++v)
      if (mask & (1u << v)) s.push_back(v);
    const int cc = connected_components(g, s);
    if (cc > inst.target_components) continue;

    // MSF of the induced subgraph under the instance's edge costs.
    std::vector<std::pair<double, int>> cands;
    for (int e = 0; e < static_cast<int>(g.edges().size()); ++e) {
      const Edge& ed = g.edges()[e];
      if ((mask & (1u << ed.u)) && (mask & (1u << ed.v)))
        cands.push_back({inst.costs[e], e});
    }
    std::sort(cands.begin(), cands.end());
    std::vector<int> parent(p);
    for (int v = 0; v < p; ++v) parent[v] = v;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<double> kept;
    for (auto [w, e] : cands) {
      const Edge& ed = g.edges()[e];
      if (find(ed.u) != find(ed.v)) {
        parent[find(ed.u)] = find(ed.v);
        kept.push_back(w);
      }
    }
    std::sort(kept.begin(), kept.end());
    double cost = 0.0;
    const int removable = inst.target_components - cc;
    for (int i = 0; i + removable < static_cast<int>(kept.size()); ++i)
      cost += kept[i];
    double forfeited = 0.0;
    for (int v = 0; v < p; ++v)
      if (!(mask & (1u << v))) forfeited += inst.prizes[v];
    best = std::min(best, forfeited + cost);
  }
  return best;
}

void check_forest_shape(const PcsfInstance& inst, const Forest& f) {
  CHECK(std::is_sorted(f.vertices.begin(), f.vertices.end()));
  std::set<int> vs(f.vertices.begin(), f.vertices.end());
  CHECK(vs.size() == f.vertices.size());
  for (int e : f.edge_indices) {
    const Edge& ed = inst.graph->edges()[e];
    CHECK(vs.count(ed.u));
    CHECK(vs.count(ed.v));
  }
  CHECK(f.num_trees <= inst.target_components);
  if (!f.vertices.empty()) {
    CHECK(static_cast<int>(f.vertices.size() - f.edge_indices.size()) == f.num_trees);
    std::vector<int> parent(inst.graph->num_vertices());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int e : f.edge_indices) {
      const Edge& ed = inst.graph->edges()[e];
      CHECK(find(ed.u) != find(ed.v));  // acyclic
      parent[find(ed.u)] = find(ed.v);
    }
  } else {
    CHECK(f.num_trees == 0);
    CHECK(f.edge_indices.empty());
  }
}

Graph random_graph(int p, Rng& rng) {
  // random spanning tree plus a few extras, random weights
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> used;
  for (int v = 1; v < p; ++v) {
    const int u = static_cast<int>(rng.bounded(v));
    edges.push_back({u, v, 0.1 + 2.0 * rng.uniform01()});
    used.insert({u, v});
  }
  const int extras = static_cast<int>(rng.bounded(p));
  for (int i = 0; i < extras; ++i) {
    int u = static_cast<int>(rng.bounded(p));
    int v = static_cast<int>(rng.bounded(p));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (used.count({u, v})) continue;
    used.insert({u, v});
    edges.push_back({u, v, 0.1 + 2.0 * rng.uniform01()});
  }
  return Graph(p, std::move(edges));
}

}  // namespace

TEST_CASE("three-vertex path with a worthless bridge") {
  // Bridging both ends through the zero-prize middle collects prize 2 for
  // cost 2; a single endpoint forfeits the other end for objective 1. The
  // solver drops the strictly negative branch and returns the optimum.
  const Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  PcsfInstance inst{&g, {1.0, 0.0, 1.0}, {1.0, 1.0}, 1};
  const Forest f = solve_pcsf(inst);
  CHECK(f.vertices == Support{0});
  CHECK(f.edge_indices.empty());
  CHECK(f.num_trees == 1);
  CHECK(forest_objective(inst, f) == doctest::Approx(brute_force_optimum(inst)));

  // With two tree slots both endpoints are kept as singletons.
  inst.target_components = 2;
  const Forest f2 = solve_pcsf(inst);
  CHECK(f2.vertices == Support{0, 2});
  CHECK(f2.num_trees == 2);
}

TEST_CASE("zero prizes give an empty forest") {
  const Graph g = Graph::grid(2, 3);
  PcsfInstance inst{&g, std::vector<double>(6, 0.0),
                    std::vector<double>(g.edges().size(), 1.0), 2};
  const Forest f = solve_pcsf(inst);
  CHECK(f.vertices.empty());
  CHECK(f.edge_indices.empty());
  CHECK(f.num_trees == 0);
}

TEST_CASE("far-apart prizes become two singleton trees") {
  const Graph g(6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}});
  PcsfInstance inst{&g, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0},
                    std::vector<double>(5, 1.0), 2};
  const Forest f = solve_pcsf(inst);
  CHECK(f.vertices == Support{0, 5});
  CHECK(f.edge_indices.empty());
  CHECK(f.num_trees == 2);
  CHECK(forest_objective(inst, f) <= 2.0 * brute_force_optimum(inst) + 1e-12);
}

TEST_CASE("forest objective basics") {
  const Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  PcsfInstance inst{&g, {0.4, 0.8, 0.3}, {1.0, 1.0}, 1};
  CHECK(forest_objective(inst, Forest{}) == doctest::Approx(1.5));
  Forest full;
  full.vertices = {0, 1, 2};
  full.edge_indices = {0, 1};
  full.num_trees = 1;
  CHECK(forest_objective(inst, full) == doctest::Approx(2.0));
}

TEST_CASE("input validation") {
  const Graph g = Graph::grid(2, 2);
  PcsfInstance inst{&g, {1, 1, 1}, std::vector<double>(g.edges().size(), 1.0), 1};
  CHECK_THROWS_AS(solve_pcsf(inst), std::invalid_argument);  // prizes size
  inst.prizes = {1, 1, 1, -1};
  CHECK_THROWS_AS(solve_pcsf(inst), std::invalid_argument);  // negative prize
  inst.prizes = {1, 1, 1, 1};
  inst.target_components = 0;
  CHECK_THROWS_AS(solve_pcsf(inst), std::invalid_argument);
}

TEST_CASE("randomized factor-two suite with determinism") {
  Rng rng(2024);
  int instances = 0;
  double worst_ratio = 0.0;
  while (instances < 1000) {
    const int p = 4 + static_cast<int>(rng.bounded(7));  // 4..10 vertices
    const Graph g = random_graph(p, rng);
    PcsfInstance inst;
    inst.graph = &g;
    inst.target_components = 1 + static_cast<int>(rng.bounded(3));
    inst.prizes.resize(p);
    for (double& pr : inst.prizes) {
      const double u = rng.uniform01();
      pr = u < 0.3 ? 0.0 : 3.0 * rng.uniform01();
    }
    inst.costs.resize(g.edges().size());
    for (std::size_t e = 0; e < inst.costs.size(); ++e)
      inst.costs[e] = g.edges()[e].w;

    const Forest f = solve_pcsf(inst);
    check_forest_shape(inst, f);

    const Forest again = solve_pcsf(inst);
    CHECK(f.vertices == again.vertices);
    CHECK(f.edge_indices == again.edge_indices);

    const double opt = brute_force_optimum(inst);
    const double got = forest_objective(inst, f);
    CHECK(got <= 2.0 * opt + 1e-9);
    if (opt > 1e-12) worst_ratio = std::max(worst_ratio, got / opt);
    ++instances;
  }
  MESSAGE("worst objective ratio over suite: ", worst_ratio);
}
