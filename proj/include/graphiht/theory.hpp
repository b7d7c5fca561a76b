#pragma once

// Calculators for the convergence-theory constants: restricted strong
// convexity/smoothness over the model's support family, the admissible
// learning-rate interval, and the contraction constants. The published
// constants come in two variants that disagree (sqrt(1 - alpha0) versus
// sqrt(1 - alpha0^2), and two forms of the sigma coefficient); both are
// computed side by side rather than silently picking one.

#include <string>
#include <vector>

#include "graphiht/graph.hpp"
#include "graphiht/objectives.hpp"

namespace graphiht {

struct RscRssEstimate {
  double alpha = 0.0;  // restricted strong convexity of F
  double beta = 0.0;   // restricted smoothness of F (eigenvalues of A'A/n)
  bool exact = false;
  std::string scope;
};

enum class SupportFamily {
  Model,     // supports of the base model M
  Expanded,  // unions as produced by the head/tail step (larger size cap)
};

// Exact mode (p <= 16) enumerates supports and solves the restricted
// eigenproblems; larger p samples random supports and reports bounds
// flagged as estimates. Least squares only.
RscRssEstimate estimate_rsc_rss(const Dataset& dataset, const Graph& graph,
                                const WgmModel& model,
                                SupportFamily family = SupportFamily::Expanded,
                                int samples = 200, std::uint64_t seed = 42);

// Largest restricted smoothness of any single sample: max over rows and
// in-family supports of the restricted squared row norm. This is the
// per-sample constant the stochastic-step contraction bound needs.
double per_sample_rss(const Dataset& dataset, const Graph& graph,
                      const WgmModel& model,
                      SupportFamily family = SupportFamily::Model);

struct EtaRange {
  bool feasible = false;
  double low = 0.0;
  double high = 0.0;
  std::string note;  // set when infeasible, names the violated condition
};

// ((2a - sqrt(4a^2 - 3.75ab)) / (2ab), (2a + sqrt(4a^2 - 3.75ab)) / (2ab));
// real only when beta/alpha <= 16/15.
EtaRange eta_range(double alpha, double beta);

struct ContractionParams {
  double alpha0 = 0.0;        // c_h*alpha*tau - sqrt(alpha*beta*tau^2 - 2*alpha*tau + 1)
  double beta0 = 0.0;         // (1 + c_h) * tau
  double sigma1_coeff = 0.0;  // beta0/alpha0 + sqrt(alpha0*beta0 / (1 - alpha0))
  double delta = 0.0;         // (1+c_t)(sqrt(ab eta^2 - 2a eta + 1) + sqrt(1 - alpha0))
  double delta_alt = 0.0;     // same with sqrt(1 - alpha0^2)
  double lambda = 0.0;        // (1+c_t) * 2 sqrt(ab eta^2 - 2a eta + 1)
  double lambda_alt = 0.0;    // 2(1+c_t)(delta_alt/(1+c_t) - sqrt(1 - alpha0^2))
  double gamma = 0.0;         // (1+c_t)(beta0/alpha0 + alpha0*beta0/sqrt(1-alpha0^2) + eta)
  double eta = 0.0;
  double tau = 0.0;
  double c_h = 1.0;
  double c_t = 1.0;
};

// tau defaults to eta when passed as <= 0. Fields whose radicands leave
// their domain come back NaN; only an invalid step radicand throws.
ContractionParams contraction_params(double alpha, double beta, double eta,
                                     double tau = -1.0, double c_h = 1.0,
                                     double c_t = 1.0);

struct SlopeFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Least-squares line through (epoch, ln residual) over checkpoints whose
// residual exceeds the floor. Throws InsufficientData below 5 points.
SlopeFit fit_convergence_slope(const std::vector<std::pair<double, double>>& epoch_residual,
                               double floor);

// Eigenvalue range of a dense symmetric matrix by cyclic Jacobi sweeps.
std::pair<double, double> symmetric_eigen_range(std::vector<double> m, int dim);

}  // namespace graphiht
