#pragma once

// Synthetic instances, experiment sweeps, trace persistence, and static
// plots. Sweeps enumerate the Cartesian product of the parameter lists,
// share one instance per (sparsity, trial) across methods and learning
// rates, and may run points concurrently; the merged output order and the
// CSV bytes do not depend on the schedule.

#include <cstdint>
#include <string>
#include <vector>

#include "graphiht/graph.hpp"
#include "graphiht/objectives.hpp"
#include "graphiht/solvers.hpp"

namespace graphiht {

struct Instance {
  Dataset dataset;
  std::vector<double> x_star;
  Support support;
};

// x_star lives on a random in-model support with standard normal entries;
// A is iid standard normal and y = A x_star + noise_sigma * normal noise.
// m == 0 picks max(60, 6 s) observations.
Instance gen_instance(const Graph& graph, const WgmModel& model, int m,
                      double noise_sigma, std::uint64_t seed);

struct ExperimentSpec {
  int rows = 16;
  int cols = 16;
  std::vector<int> s_values{32};
  int g = 1;
  std::vector<double> eta_values{0.01};
  std::vector<Method> methods{Method::GraphSvrg};
  std::vector<int> B_values;  // empty: B = min(s, n)
  std::vector<int> b_values{1};
  int m_observations = 0;  // 0: default rule
  double noise_sigma = 0.0;
  int trials = 1;
  std::uint64_t seed_base = 42;
  enum class XAxis { Epochs, DataPoints } x_axis = XAxis::Epochs;
  // run controls
  int max_epochs = 200;
  double residual_stop = 0.0;
  int inner_loops = 0;  // K for the full-anchor method; 0 means n
  ScsgOption scsg_option = ScsgOption::Geometric;
  int jobs = 1;

  void validate() const;
};

// Flat "key = value" text, comma-separated lists. Unknown keys are errors
// naming the key.
ExperimentSpec parse_spec_file(const std::string& path);
ExperimentSpec parse_spec_text(const std::string& text);

struct TraceRow {
  Method method = Method::GraphSvrg;
  std::uint64_t seed = 0;
  int s = 0;
  int g = 0;
  double eta = 0.0;
  int B = 0;
  int b = 0;
  Checkpoint cp;
  bool failed = false;  // run diverged; cp holds NaN residual
};

struct TraceSet {
  std::vector<TraceRow> rows;
};

TraceSet run_sweep(const ExperimentSpec& spec);

// CSV schema:
// method,seed,s,g,eta,B,b,epoch,data_points,residual,est_error,support_size,elapsed_ms
void write_traces(const TraceSet& set, const std::string& path);
TraceSet read_traces(const std::string& path);

// Standalone SVG: log-scale residual, one median polyline per
// (method, sweep point) with a shaded interquartile band over trials.
void emit_plot(const TraceSet& set, const std::string& path,
               ExperimentSpec::XAxis x_axis = ExperimentSpec::XAxis::Epochs);

}  // namespace graphiht
