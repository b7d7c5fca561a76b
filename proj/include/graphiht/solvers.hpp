#pragma once

// The five optimizers. All share one projected-step kernel and one
// deterministic sampling scheme: the per-run PRNG is split into three
// independent streams (inner-step draws, outer batch draws, inner-loop
// length draws) so that structurally equal configurations consume the same
// draws. With a full-size batch and unit mini-batches the batch-anchored
// solver walks the exact sample sequence of the full-gradient one and their
// iterates agree bitwise.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "graphiht/graph.hpp"
#include "graphiht/objectives.hpp"
#include "graphiht/theory.hpp"

namespace graphiht {

enum class Method { Iht, StoIht, GraphStoIht, GraphSvrg, GraphScsg };
enum class ScsgOption { Geometric, Fixed };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct SolverConfig {
  Method method = Method::GraphSvrg;
  double eta = 0.01;
  int outer_loops = 1 << 28;  // J; epochs budget is the usual stop
  int inner_loops = 0;        // K; 0 means n
  int batch_size = 0;         // B; 0 means n
  int minibatch_size = 1;     // b
  ScsgOption scsg_option = ScsgOption::Geometric;
  WgmModel model;
  std::uint64_t seed = 42;
  int max_epochs = 500;
  double residual_stop = 0.0;
};

struct Checkpoint {
  double epoch = 0.0;
  std::uint64_t data_points = 0;
  double residual = 0.0;   // loss value for logistic objectives
  double est_error = 0.0;  // NaN when the target vector is unknown
  int support_size = 0;
  std::int64_t elapsed_ms = 0;
};

struct Trace {
  std::vector<Checkpoint> checkpoints;
};

struct SolveResult {
  std::vector<double> x;
  Trace trace;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// tail_project(x - eta * head_project(grad)), the shared projected step.
std::vector<double> graph_step(std::span<const double> x, std::span<const double> grad,
                               double eta, const Graph& graph, const WgmModel& model);

// x_star, when nonempty, enables the estimation-error column of the trace.
SolveResult run_iht(const Dataset& dataset, const SolverConfig& config,
                    GradientAccount& account, std::span<const double> x_star = {});
SolveResult run_sto_iht(const Dataset& dataset, const SolverConfig& config,
                        GradientAccount& account, std::span<const double> x_star = {});
SolveResult run_graph_sto_iht(const Dataset& dataset, const Graph& graph,
                              const SolverConfig& config, GradientAccount& account,
                              std::span<const double> x_star = {});
SolveResult run_graph_svrg_iht(const Dataset& dataset, const Graph& graph,
                               const SolverConfig& config, GradientAccount& account,
                               std::span<const double> x_star = {});
SolveResult run_graph_scsg_iht(const Dataset& dataset, const Graph& graph,
                               const SolverConfig& config, GradientAccount& account,
                               std::span<const double> x_star = {});

// Dispatch on config.method; graph may be null for the non-graph methods.
SolveResult run_solver(const Dataset& dataset, const Graph* graph,
                       const SolverConfig& config, GradientAccount& account,
                       std::span<const double> x_star = {});

// Geometric inner-loop length with mean B/b; zero draws are promoted to one
// step so every outer loop makes progress.
int draw_inner_loops(Rng& rng, int batch_size, int minibatch_size);

SlopeFit fit_convergence_slope(const Trace& trace, double floor);

}  // namespace graphiht
