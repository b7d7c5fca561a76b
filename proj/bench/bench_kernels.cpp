// Compares the serial reference kernels against the OpenMP ones and checks
// they agree bitwise, then times a projection-heavy solver step for scale.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <vector>

#include "graphiht/kernels.hpp"
#include "graphiht/pcsf.hpp"
#include "graphiht/projections.hpp"
#include "graphiht/rng.hpp"

using namespace graphiht;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void bench_dense(int n, int p, int reps) {
  Rng rng(7);
  std::vector<double> a(static_cast<std::size_t>(n) * p), x(p), y(n), r(n), g(p);
  for (auto& t : a) t = rng.gaussian();
  for (auto& t : x) t = rng.gaussian();
  for (auto& t : y) t = rng.gaussian();
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  auto t0 = Clock::now();
  for (int it = 0; it < reps; ++it) {
    kernels::serial::row_residuals(a, p, rows, x, y, r);
    kernels::serial::accumulate_columns(a, p, rows, r, 1.0 / n, g);
  }
  const double serial_ms = ms_since(t0) / reps;
  const double g0 = g[0], gl = g[p - 1];

  t0 = Clock::now();
  for (int it = 0; it < reps; ++it) {
    kernels::par::row_residuals(a, p, rows, x, y, r);
    kernels::par::accumulate_columns(a, p, rows, r, 1.0 / n, g);
  }
  const double par_ms = ms_since(t0) / reps;
  const bool same = g[0] == g0 && g[p - 1] == gl;

  const double flops = 4.0 * n * p;
  std::printf("gradient %5dx%-5d serial %8.3f ms (%6.2f GF/s)  omp %8.3f ms (%6.2f GF/s)"
              "  speedup %.2fx  bitwise %s\n",
              n, p, serial_ms, flops / serial_ms / 1e6, par_ms, flops / par_ms / 1e6,
              serial_ms / par_ms, same ? "ok" : "MISMATCH");
}

void bench_projection(int rows, int cols, int s) {
  const Graph graph = Graph::grid(rows, cols);
  WgmModel model;
  model.sparsity = s;
  model.components = 1;
  model.cost_budget = s - 1;
  Rng rng(11);
  std::vector<double> x(graph.num_vertices());
  for (auto& t : x) t = rng.gaussian();

  const int reps = 50;
  auto t0 = Clock::now();
  int solves = 0;
  for (int it = 0; it < reps; ++it) {
    solves += head_project(x, graph, model).iterations_used;
    solves += tail_project(x, graph, model).iterations_used;
  }
  const double ms = ms_since(t0) / reps;
  std::printf("head+tail on %dx%d grid (s=%d): %8.3f ms/step, %.1f pcsf solves/step\n",
              rows, cols, s, ms, static_cast<double>(solves) / reps);
}

}  // namespace

int main() {
  bench_dense(80, 256, 2000);
  bench_dense(500, 2048, 50);
  bench_dense(2000, 4096, 10);
  bench_projection(16, 16, 32);
  bench_projection(32, 32, 64);
  return 0;
}
