#pragma once

// Head and tail projections onto the weighted graph model, realized as
// prize-collecting Steiner forest solves with squared magnitudes as prizes
// and a scalar multiplier searched geometrically until the support size
// lands in the model window. Plus the exhaustive oracle used by tests and
// plain top-k thresholding for the non-graph baselines.

#include <span>
#include <vector>

#include "graphiht/graph.hpp"

namespace graphiht {

struct ProjectionOutcome {
  Support support;
  std::vector<double> vector;  // input restricted to support, zeros elsewhere
  int iterations_used = 0;     // PCSF solves performed
  int achieved_sparsity = 0;
};

// Support with <= ceil(head_slack*s) vertices and <= g components chosen to
// capture a large fraction of the best in-model norm of x.
ProjectionOutcome head_project(std::span<const double> x, const Graph& graph,
                               const WgmModel& model);

// Support with <= s vertices and <= g components whose restriction stays
// close to x; the PCSF window solution is trimmed to s by dropping the
// lowest-magnitude leaf until the size fits.
ProjectionOutcome tail_project(std::span<const double> x, const Graph& graph,
                               const WgmModel& model);

// Exhaustive maximizer of the captured norm over in-model supports.
// Oracle-scale only: refuses p > 16.
ProjectionOutcome exact_project(std::span<const double> x, const Graph& graph,
                                const WgmModel& model);

// Keep the s largest-magnitude entries, ties to the lower index.
ProjectionOutcome top_k(std::span<const double> x, int s);

}  // namespace graphiht
