#include "graphiht/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "graphiht/projections.hpp"
#include "graphiht/rng.hpp"

namespace graphiht {

std::pair<double, double> symmetric_eigen_range(std::vector<double> m, int dim) {
  if (dim == 0) return {0.0, 0.0};
  auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * dim + j]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-28 * std::max(1.0, std::abs(at(0, 0)))) break;
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        const double apq = at(i, j);
        if (apq == 0.0) continue;
        const double app = at(i, i), aqq = at(j, j);
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < dim; ++k) {
          const double aki = at(k, i), akj = at(k, j);
          at(k, i) = c * aki - s * akj;
          at(k, j) = s * aki + c * akj;
        }
        for (int k = 0; k < dim; ++k) {
          const double aik = at(i, k), ajk = at(j, k);
          at(i, k) = c * aik - s * ajk;
          at(j, k) = s * aik + c * ajk;
        }
      }
    }
  }
  double lo = at(0, 0), hi = at(0, 0);
  for (int i = 1; i < dim; ++i) {
    lo = std::min(lo, at(i, i));
    hi = std::max(hi, at(i, i));
  }
  return {lo, hi};
}

namespace {

struct FamilyLimits {
  int size_cap;
  int comp_cap;
  bool check_budget;
};

FamilyLimits limits_of(const WgmModel& model, SupportFamily family, int p) {
  if (family == SupportFamily::Model)
    return {std::min(p, model.sparsity), model.components, true};
  const int cap = model.sparsity + model.head_limit() + model.tail_limit();
  return {std::min(p, cap), 3 * model.components, false};
}

// Gram matrix (A'A/n) restricted to a support.
std::vector<double> restricted_gram(const Dataset& d, const Support& s) {
  const int k = static_cast<int>(s.size());
  std::vector<double> m(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < d.n; ++i) {
    const double* row = d.a.data() + static_cast<std::size_t>(i) * d.p;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) m[static_cast<std::size_t>(a) * k + b] += row[s[a]] * row[s[b]];
  }
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      m[static_cast<std::size_t>(a) * k + b] /= d.n;
      m[static_cast<std::size_t>(b) * k + a] = m[static_cast<std::size_t>(a) * k + b];
    }
  return m;
}

int components_of_mask(const Graph& g, unsigned mask) {
  std::vector<unsigned> nbr(g.num_vertices(), 0);
  for (const Edge& e : g.edges()) {
    nbr[e.u] |= 1u << e.v;
    nbr[e.v] |= 1u << e.u;
  }
  int count = 0;
  unsigned left = mask;
  while (left) {
    ++count;
    unsigned comp = left & (~left + 1u);
    for (;;) {
      unsigned grow = comp;
      unsigned scan = comp;
      while (scan) {
        const int v = std::countr_zero(scan);
        scan &= scan - 1u;
        grow |= nbr[v] & mask;
      }
      if (grow == comp) break;
      comp = grow;
    }
    left &= ~comp;
  }
  return count;
}

Support mask_to_support(unsigned mask) {
  Support s;
  while (mask) {
    s.push_back(std::countr_zero(mask));
    mask &= mask - 1u;
  }
  return s;
}

bool mask_feasible(const Graph& g, const WgmModel& model, const FamilyLimits& lim,
                   unsigned mask) {
  if (mask == 0) return false;
  if (std::popcount(mask) > lim.size_cap) return false;
  if (components_of_mask(g, mask) > lim.comp_cap) return false;
  if (lim.check_budget) {
    const Support s = mask_to_support(mask);
    if (msf_weight(g, s) > model.cost_budget + 1e-9 * std::max(1.0, model.cost_budget))
      return false;
  }
  return true;
}

// Random in-family support for the sampled (large p) mode.
Support sample_support(const Graph& g, const WgmModel& model, SupportFamily family,
                       Rng& rng) {
  const FamilyLimits lim = limits_of(model, family, g.num_vertices());
  Support s;
  const int pieces = family == SupportFamily::Model ? 1 : 3;
  std::vector<char> taken(g.num_vertices(), 0);
  for (int piece = 0; piece < pieces; ++piece) {
    try {
      Support part = random_connected_support(g, model.sparsity, model.components, rng);
      for (int v : part)
        if (!taken[v]) {
          taken[v] = 1;
          s.push_back(v);
        }
    } catch (const GenerationError&) {
      break;
    }
  }
  std::sort(s.begin(), s.end());
  if (static_cast<int>(s.size()) > lim.size_cap) s.resize(lim.size_cap);
  return s;
}

}  // namespace

RscRssEstimate estimate_rsc_rss(const Dataset& dataset, const Graph& graph,
                                const WgmModel& model, SupportFamily family,
                                int samples, std::uint64_t seed) {
  dataset.validate();
  if (dataset.kind != ObjectiveKind::LeastSquares)
    throw std::invalid_argument(
        "estimate_rsc_rss: logistic objectives have a non-constant Hessian; "
        "only least squares is supported");
  if (dataset.p != graph.num_vertices())
    throw std::invalid_argument("estimate_rsc_rss: dataset p must match graph");
  model.validate(dataset.p);

  RscRssEstimate out;
  out.alpha = std::numeric_limits<double>::infinity();
  out.beta = 0.0;

  if (dataset.p <= 16) {
    const FamilyLimits lim = limits_of(model, family, dataset.p);
    const unsigned full = (1u << dataset.p) - 1u;
    for (unsigned mask = 1; mask <= full; ++mask) {
      if (std::popcount(mask) > lim.size_cap) continue;
      if (!mask_feasible(graph, model, lim, mask)) continue;
      const Support s = mask_to_support(mask);
      const auto [lo, hi] = symmetric_eigen_range(restricted_gram(dataset, s),
                                                  static_cast<int>(s.size()));
      out.alpha = std::min(out.alpha, lo);
      out.beta = std::max(out.beta, hi);
    }
    out.exact = true;
    out.scope = std::string("exhaustive over ") +
                (family == SupportFamily::Model ? "model supports" : "expanded supports");
  } else {
    Rng rng = stream(seed, 21);
    for (int it = 0; it < samples; ++it) {
      const Support s = sample_support(graph, model, family, rng);
      if (s.empty()) continue;
      const auto [lo, hi] = symmetric_eigen_range(restricted_gram(dataset, s),
                                                  static_cast<int>(s.size()));
      out.alpha = std::min(out.alpha, lo);
      out.beta = std::max(out.beta, hi);
    }
    out.exact = false;
    out.scope = "sampled supports; alpha is an upper bound, beta a lower bound";
  }
  if (!std::isfinite(out.alpha)) {
    out.alpha = 0.0;
  }
  return out;
}

double per_sample_rss(const Dataset& dataset, const Graph& graph,
                      const WgmModel& model, SupportFamily family) {
  dataset.validate();
  if (dataset.kind != ObjectiveKind::LeastSquares)
    throw std::invalid_argument("per_sample_rss: least squares only");
  double worst = 0.0;
  if (dataset.p <= 16 && family == SupportFamily::Model) {
    for (int i = 0; i < dataset.n; ++i) {
      const auto row = dataset.row(i);
      const ProjectionOutcome best = exact_project(row, graph, model);
      double cap = 0.0;
      for (int v : best.support) cap += row[v] * row[v];
      worst = std::max(worst, cap);
    }
    return worst;
  }
  Rng rng = stream(7, 22);
  for (int it = 0; it < 200; ++it) {
    const Support s = sample_support(graph, model, family, rng);
    for (int i = 0; i < dataset.n; ++i) {
      const auto row = dataset.row(i);
      double cap = 0.0;
      for (int v : s) cap += row[v] * row[v];
      worst = std::max(worst, cap);
    }
  }
  return worst;
}

EtaRange eta_range(double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("eta_range: alpha and beta must be positive");
  EtaRange out;
  const double disc = 4.0 * alpha * alpha - 3.75 * alpha * beta;
  if (disc < 0.0) {
    out.feasible = false;
    out.note = "requires beta/alpha <= 16/15; got " + std::to_string(beta / alpha);
    return out;
  }
  const double root = std::sqrt(disc);
  out.feasible = true;
  out.low = (2.0 * alpha - root) / (2.0 * alpha * beta);
  out.high = (2.0 * alpha + root) / (2.0 * alpha * beta);
  return out;
}

ContractionParams contraction_params(double alpha, double beta, double eta,
                                     double tau, double c_h, double c_t) {
  if (alpha <= 0.0 || beta <= 0.0 || eta <= 0.0)
    throw std::invalid_argument("contraction_params: alpha, beta, eta must be positive");
  ContractionParams out;
  out.eta = eta;
  out.tau = tau > 0.0 ? tau : eta;
  out.c_h = c_h;
  out.c_t = c_t;

  const double rad_tau = alpha * beta * out.tau * out.tau - 2.0 * alpha * out.tau + 1.0;
  const double rad_eta = alpha * beta * eta * eta - 2.0 * alpha * eta + 1.0;
  if (rad_tau < 0.0 || rad_eta < 0.0)
    throw std::invalid_argument("contraction_params: step radicand is negative");

  out.alpha0 = c_h * alpha * out.tau - std::sqrt(rad_tau);
  out.beta0 = (1.0 + c_h) * out.tau;
  out.sigma1_coeff = out.beta0 / out.alpha0 +
                     std::sqrt(out.alpha0 * out.beta0 / (1.0 - out.alpha0));
  const double step = std::sqrt(rad_eta);
  out.delta = (1.0 + c_t) * (step + std::sqrt(1.0 - out.alpha0));
  out.delta_alt = (1.0 + c_t) * (step + std::sqrt(1.0 - out.alpha0 * out.alpha0));
  out.lambda = (1.0 + c_t) * 2.0 * step;
  out.lambda_alt = 2.0 * (1.0 + c_t) *
                   (out.delta_alt / (1.0 + c_t) -
                    std::sqrt(1.0 - out.alpha0 * out.alpha0));
  out.gamma = (1.0 + c_t) * (out.beta0 / out.alpha0 +
                             out.alpha0 * out.beta0 /
                                 std::sqrt(1.0 - out.alpha0 * out.alpha0) +
                             eta);
  return out;
}

SlopeFit fit_convergence_slope(
    const std::vector<std::pair<double, double>>& epoch_residual, double floor) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [epoch, res] : epoch_residual)
    if (std::isfinite(res) && res > floor) pts.push_back({epoch, std::log(res)});
  if (pts.size() < 5)
    throw InsufficientData("fit_convergence_slope: need at least 5 checkpoints above the floor");

  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& [ex, ly] : pts) {
    sx += ex;
    sy += ly;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [ex, ly] : pts) {
    sxx += (ex - mx) * (ex - mx);
    sxy += (ex - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  SlopeFit fit;
  fit.points_used = static_cast<int>(pts.size());
  if (sxx <= 0.0) {
    fit.slope = 0.0;
    fit.r_squared = 1.0;
    return fit;
  }
  fit.slope = sxy / sxx;
  if (syy <= 1e-30) {
    fit.r_squared = 1.0;
    return fit;
  }
  const double sse = syy - fit.slope * sxy;
  fit.r_squared = 1.0 - sse / syy;
  return fit;
}

}  // namespace graphiht
