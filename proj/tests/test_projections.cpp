#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "graphiht/projections.hpp"
#include "graphiht/rng.hpp"

using namespace graphiht;

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double t : v) acc += t * t;
  return std::sqrt(acc);
}

// Independent oracle: recursive enumeration of in-model supports grown
// component by component, maximizing captured squared mass. Coded against a
// different representation than the library's bitmask scan on purpose.
struct RecursiveOracle {
  const Graph& graph;
  const WgmModel& model;
  std::span<const double> x;
  double best_norm = 0.0;
  std::vector<int> current;

  RecursiveOracle(const Graph& g, const WgmModel& m, std::span<const double> xs)
      : graph(g), model(m), x(xs) {}

  double capture(const std::vector<int>& s) const {
    double acc = 0.0;
    for (int v : s) acc += x[v] * x[v];
    return acc;
  }

  void run() {
    best_norm = 0.0;
    current.clear();
    grow(0, -1);
  }

  bool in_current(int v) const {
    return std::find(current.begin(), current.end(), v) != current.end();
  }

  bool touches_current(int v) const {
    for (auto [u, e] : graph.neighbors(v)) {
      (void)e;
      if (in_current(u)) return true;
    }
    return false;
  }

  // Components are seeded in increasing vertex order to avoid duplicates;
  // each component must not touch the ones already placed.
  void grow(int comps_used, int last_seed) {
    if (comps_used == model.components) return;
    for (int v = last_seed + 1; v < graph.num_vertices(); ++v) {
      if (in_current(v) || touches_current(v)) continue;
      std::vector<int> comp{v};
      extend(comp, comps_used, v);
    }
  }

  void extend(std::vector<int>& comp, int comps_used, int seed) {
    if (static_cast<int>(current.size() + comp.size()) <= model.sparsity) {
      const std::size_t saved = current.size();
      current.insert(current.end(), comp.begin(), comp.end());
      // Unit-weight graphs: a spanning forest of k trees over n vertices
      // weighs n - k, an independent route to the budget check.
      const double weight =
          static_cast<double>(current.size()) - (comps_used + 1);
      if (weight <= model.cost_budget + 1e-9)
        best_norm = std::max(best_norm, capture(current));
      grow(comps_used + 1, seed);
      current.resize(saved);
    }

    if (static_cast<int>(current.size() + comp.size()) >= model.sparsity) return;
    for (int idx = 0; idx < static_cast<int>(comp.size()); ++idx) {
      for (auto [u, e] : graph.neighbors(comp[idx])) {
        (void)e;
        if (u <= seed) continue;
        if (std::find(comp.begin(), comp.end(), u) != comp.end()) continue;
        if (in_current(u) || touches_current(u)) continue;
        comp.push_back(u);
        extend(comp, comps_used, seed);
        comp.pop_back();
      }
    }
  }
};

WgmModel grid3_model() {
  WgmModel m;
  m.sparsity = 3;
  m.components = 1;
  m.cost_budget = 2.0;
  return m;
}

}  // namespace

TEST_CASE("top_k basics") {
  std::vector<double> x{3.0, -5.0, 1.0};
  CHECK(top_k(x, 2).support == Support{0, 1});
  CHECK(top_k(x, 0).vector == std::vector<double>{0, 0, 0});
  CHECK(top_k(x, 3).vector == x);
  CHECK_THROWS_AS(top_k(x, 4), std::invalid_argument);
  std::vector<double> t{1.0, -1.0, 1.0};
  CHECK(top_k(t, 2).support == Support{0, 1});  // ties to the lower index
}

TEST_CASE("exact projection basics and the dual oracle") {
  const Graph g3 = Graph::grid(3, 3);
  const WgmModel m = grid3_model();

  SUBCASE("dominant entry") {
    std::vector<double> x(9, 0.0);
    x[4] = 5.0;
    x[0] = 0.1;
    WgmModel m1 = m;
    m1.sparsity = 1;
    m1.cost_budget = 0.0;
    CHECK(exact_project(x, g3, m1).support == Support{4});
  }

  SUBCASE("connected pair") {
    std::vector<double> x(9, 0.0);
    x[3] = 1.0;
    x[4] = 1.0;
    WgmModel m2 = m;
    m2.sparsity = 2;
    m2.cost_budget = 1.0;
    CHECK(exact_project(x, g3, m2).support == Support{3, 4});
  }

  SUBCASE("scope guard") {
    const Graph big = Graph::grid(5, 4);
    std::vector<double> x(20, 1.0);
    CHECK_THROWS_AS(exact_project(x, big, m), std::domain_error);
  }

  SUBCASE("agreement with the independently coded enumerator") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(9);
      for (auto& t : x) t = rng.gaussian();
      const ProjectionOutcome got = exact_project(x, g3, m);
      RecursiveOracle oracle(g3, m, x);
      oracle.run();
      const double got_norm = norm2(got.vector);
      CHECK(got_norm * got_norm == doctest::Approx(oracle.best_norm).epsilon(1e-12));
    }
  }

  SUBCASE("two components") {
    WgmModel m2 = grid3_model();
    m2.components = 2;
    m2.cost_budget = 1.0;
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(9);
      for (auto& t : x) t = rng.gaussian();
      const ProjectionOutcome got = exact_project(x, g3, m2);
      RecursiveOracle oracle(g3, m2, x);
      oracle.run();
      const double got_norm = norm2(got.vector);
      CHECK(got_norm * got_norm == doctest::Approx(oracle.best_norm).epsilon(1e-12));
    }
  }
}

TEST_CASE("head projection basics") {
  const Graph g3 = Graph::grid(3, 3);
  const WgmModel m = grid3_model();

  SUBCASE("zero vector") {
    std::vector<double> x(9, 0.0);
    const ProjectionOutcome out = head_project(x, g3, m);
    CHECK(out.support.empty());
    CHECK(norm2(out.vector) == 0.0);
  }

  SUBCASE("model-feasible mass is fully captured") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(9, 0.0);
      Support s = random_connected_support(g3, 3, 1, rng);
      for (int v : s) x[v] = rng.gaussian() + (rng.gaussian() > 0 ? 1.5 : -1.5);
      const ProjectionOutcome out = head_project(x, g3, m);
      Support nz;
      for (int v = 0; v < 9; ++v)
        if (x[v] != 0.0) nz.push_back(v);
      CHECK(std::includes(out.support.begin(), out.support.end(), nz.begin(), nz.end()));
      CHECK(norm2(out.vector) == doctest::Approx(norm2(x)).epsilon(1e-12));
    }
  }

  SUBCASE("scale equivariance of the selected support") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> x(9);
      for (auto& t : x) t = rng.gaussian();
      const Support base = head_project(x, g3, m).support;
      for (double c : {0.25, 3.0, 1024.0}) {
        std::vector<double> xs(x);
        for (auto& t : xs) t *= c;
        CHECK(head_project(xs, g3, m).support == base);
      }
    }
  }
}

TEST_CASE("tail projection basics") {
  const Graph g3 = Graph::grid(3, 3);
  const WgmModel m = grid3_model();

  SUBCASE("zero vector unchanged") {
    std::vector<double> x(9, 0.0);
    CHECK(tail_project(x, g3, m).vector == x);
  }

  SUBCASE("in-model vectors are fixed points") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(9, 0.0);
      Support s = random_connected_support(g3, 3, 1, rng);
      for (int v : s) x[v] = rng.gaussian() + 2.0;
      const ProjectionOutcome out = tail_project(x, g3, m);
      CHECK(out.vector == x);
      CHECK(static_cast<int>(out.support.size()) <= m.sparsity);
    }
  }

  SUBCASE("idempotence") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(9);
      for (auto& t : x) t = rng.gaussian();
      const ProjectionOutcome once = tail_project(x, g3, m);
      if (static_cast<int>(once.support.size()) > m.sparsity) continue;
      const ProjectionOutcome twice = tail_project(once.vector, g3, m);
      CHECK(twice.vector == once.vector);
    }
  }
}

TEST_CASE("oracle ratio suite on the 3x3 grid") {
  const Graph g3 = Graph::grid(3, 3);
  const WgmModel m = grid3_model();
  const WgmModel head_ok = slack_model(m, m.head_limit());

  Rng rng(2025);
  double worst_head_ratio = 2.0;
  double worst_tail_ratio = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(9);
    for (auto& t : x) t = rng.gaussian();
    const double total = norm2(x);

    RecursiveOracle oracle(g3, m, x);
    oracle.run();
    const double best_capture = std::sqrt(oracle.best_norm);

    const ProjectionOutcome head = head_project(x, g3, m);
    CHECK(static_cast<int>(head.support.size()) <= m.head_limit());
    CHECK(connected_components(g3, head.support) <= m.components);
    CHECK(is_in_model(g3, head.support, head_ok));
    if (best_capture > 0.0)
      worst_head_ratio = std::min(worst_head_ratio, norm2(head.vector) / best_capture);

    const ProjectionOutcome tail = tail_project(x, g3, m);
    CHECK(static_cast<int>(tail.support.size()) <= m.sparsity);
    CHECK(connected_components(g3, tail.support) <= m.components);
    CHECK(is_in_model(g3, tail.support, m));
    double tail_dist = 0.0;
    for (int v = 0; v < 9; ++v) {
      const double d = x[v] - tail.vector[v];
      tail_dist += d * d;
    }
    const double best_dist = total * total - oracle.best_norm;
    if (best_dist > 1e-20)
      worst_tail_ratio = std::max(worst_tail_ratio, std::sqrt(tail_dist / best_dist));
  }
  MESSAGE("min head capture ratio: ", worst_head_ratio);
  MESSAGE("max tail distance ratio: ", worst_tail_ratio);
  CHECK(worst_head_ratio >= 0.25);
  CHECK(worst_tail_ratio <= 2.0);
}

TEST_CASE("projection input validation") {
  const Graph g3 = Graph::grid(3, 3);
  const WgmModel m = grid3_model();
  std::vector<double> bad(4, 1.0);
  CHECK_THROWS_AS(head_project(bad, g3, m), std::invalid_argument);
  CHECK_THROWS_AS(tail_project(bad, g3, m), std::invalid_argument);
  std::vector<double> nan(9, 0.0);
  nan[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(head_project(nan, g3, m), std::invalid_argument);
}
