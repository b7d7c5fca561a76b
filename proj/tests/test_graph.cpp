#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "graphiht/graph.hpp"

using namespace graphiht;

TEST_CASE("grid shapes") {
  const Graph g16 = Graph::grid(16, 16);
  CHECK(g16.num_vertices() == 256);
  CHECK(g16.edges().size() == 480);

  const Graph g1 = Graph::grid(1, 1);
  CHECK(g1.num_vertices() == 1);
  CHECK(g1.edges().empty());

  const Graph g3 = Graph::grid(3, 3);
  CHECK(g3.num_vertices() == 9);
  CHECK(g3.edges().size() == 12);

  CHECK_THROWS_AS(Graph::grid(0, 4), std::invalid_argument);

  for (const Edge& e : g16.edges()) CHECK(e.w == 1.0);
  for (int v = 0; v < 256; ++v) {
    const auto deg = g16.neighbors(v).size();
    CHECK(deg >= 2);
    CHECK(deg <= 4);
  }
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph(2, {{0, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1, 1.0}, {1, 0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1, -1.0}}), std::invalid_argument);
}

TEST_CASE("connected components") {
  const Graph g3 = Graph::grid(3, 3);
  CHECK(connected_components(g3, {0, 1, 2}) == 1);
  CHECK(connected_components(g3, {0, 8}) == 2);
  CHECK(connected_components(g3, {}) == 0);
  CHECK(connected_components(g3, {2, 0, 1}) == 1);  // order does not matter
  CHECK_THROWS_AS(connected_components(g3, {0, 9}), std::invalid_argument);
  CHECK_THROWS_AS(connected_components(g3, {0, 0}), std::invalid_argument);

  const Graph g16 = Graph::grid(16, 16);
  Rng rng(5);
  const Support s = random_connected_support(g16, 32, 1, rng);
  CHECK(s.size() == 32);
  CHECK(connected_components(g16, s) == 1);
}

TEST_CASE("msf weight and model membership") {
  const Graph g3 = Graph::grid(3, 3);
  CHECK(msf_weight(g3, {0, 1, 2}) == doctest::Approx(2.0));
  CHECK(msf_weight(g3, {0}) == 0.0);
  CHECK(msf_weight(g3, {0, 8}) == 0.0);  // disconnected pieces contribute 0

  WgmModel m;
  m.sparsity = 3;
  m.components = 1;
  m.cost_budget = 2.0;
  CHECK(is_in_model(g3, {0, 1, 2}, m));
  CHECK(is_in_model(g3, {}, m));
  CHECK_FALSE(is_in_model(g3, {0, 1, 2, 3}, m));  // sparsity violated
  CHECK_FALSE(is_in_model(g3, {0, 8}, m));        // two components, g = 1
}

TEST_CASE("random connected supports") {
  const Graph g16 = Graph::grid(16, 16);

  SUBCASE("requested shape") {
    for (int g = 1; g <= 4; ++g) {
      Rng rng(100 + g);
      const Support s = random_connected_support(g16, 4 * g, g, rng);
      CHECK(static_cast<int>(s.size()) == 4 * g);
      CHECK(connected_components(g16, s) == g);
    }
  }

  SUBCASE("s equals g gives isolated vertices") {
    Rng rng(9);
    const Support s = random_connected_support(g16, 5, 5, rng);
    CHECK(s.size() == 5);
    CHECK(connected_components(g16, s) == 5);
  }

  SUBCASE("determinism") {
    Rng a(77), b(77);
    CHECK(random_connected_support(g16, 32, 2, a) ==
          random_connected_support(g16, 32, 2, b));
  }

  SUBCASE("generated supports live in the default model") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      const int g = 1 + static_cast<int>(seed % 3);
      const int s = g * 6;
      const Support sup = random_connected_support(g16, s, g, rng);
      WgmModel m;
      m.sparsity = s;
      m.components = g;
      m.cost_budget = s - g;  // spanning forest of g trees over s nodes
      CHECK(is_in_model(g16, sup, m));
    }
  }

  SUBCASE("infeasible request fails cleanly") {
    const Graph tiny = Graph::grid(1, 3);
    Rng rng(1);
    CHECK_THROWS_AS(random_connected_support(tiny, 3, 2, rng, 5), GenerationError);
  }
}

TEST_CASE("edge list io") {
  namespace fs = std::filesystem;
  const Graph g = Graph::grid(3, 2);
  const std::string path = (fs::temp_directory_path() / "graphiht_graph.txt").string();
  save_edge_list(g, path);
  const Graph back = load_edge_list(path);
  CHECK(back.num_vertices() == g.num_vertices());
  REQUIRE(back.edges().size() == g.edges().size());
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    CHECK(back.edges()[i].u == g.edges()[i].u);
    CHECK(back.edges()[i].v == g.edges()[i].v);
    CHECK(back.edges()[i].w == g.edges()[i].w);
  }
  fs::remove(path);

  const std::string bad = (fs::temp_directory_path() / "graphiht_bad.txt").string();
  {
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("p 2 2\ne 0 1 1.0\ne 1 0 1.0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS(load_edge_list(bad));
  fs::remove(bad);
}
