#include "graphiht/projections.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "graphiht/pcsf.hpp"

namespace graphiht {

namespace {

ProjectionOutcome restrict_to(std::span<const double> x, Support support,
                              int iterations) {
  ProjectionOutcome out;
  out.vector.assign(x.size(), 0.0);
  for (int v : support) out.vector[v] = x[v];
  out.achieved_sparsity = static_cast<int>(support.size());
  out.support = std::move(support);
  out.iterations_used = iterations;
  return out;
}

// Edge costs scaled so the mean is one; zero-weight graphs fall back to
// unit costs so the multiplier search still has something to push against.
std::vector<double> normalized_costs(const Graph& graph) {
  const auto& edges = graph.edges();
  double total = 0.0;
  for (const Edge& e : edges) total += e.w;
  std::vector<double> costs(edges.size());
  if (total <= 0.0) {
    std::fill(costs.begin(), costs.end(), 1.0);
  } else {
    const double mean = total / static_cast<double>(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) costs[i] = edges[i].w / mean;
  }
  return costs;
}

struct SearchScales {
  double total_prize = 0.0;
  double min_pos_prize = std::numeric_limits<double>::infinity();
  double total_cost = 0.0;
  double min_pos_cost = std::numeric_limits<double>::infinity();
};

SearchScales scales_of(const std::vector<double>& prizes,
                       const std::vector<double>& costs) {
  SearchScales s;
  for (double p : prizes) {
    s.total_prize += p;
    if (p > 0.0) s.min_pos_prize = std::min(s.min_pos_prize, p);
  }
  for (double c : costs) {
    s.total_cost += c;
    if (c > 0.0) s.min_pos_cost = std::min(s.min_pos_cost, c);
  }
  return s;
}

// Highest-capture subforest of (verts, eidx) with at most `limit` vertices
// and no more trees than the input forest. Exact: a size-constrained
// knapsack DP on each tree, then a knapsack across trees. Each kept piece
// stays connected, so trimming never raises the component count.
Support best_subforest(const Graph& graph, std::span<const double> x,
                       const Support& verts, const std::vector<int>& eidx,
                       int limit) {
  constexpr double kNeg = -1.0;  // capture values are nonnegative
  const int p = graph.num_vertices();

  std::vector<int> head(p, -1);
  std::vector<std::array<int, 2>> arcs;  // (to, next)
  for (int e : eidx) {
    const Edge& ed = graph.edges()[e];
    arcs.push_back({ed.v, head[ed.u]});
    head[ed.u] = static_cast<int>(arcs.size()) - 1;
    arcs.push_back({ed.u, head[ed.v]});
    head[ed.v] = static_cast<int>(arcs.size()) - 1;
  }

  std::vector<char> visited(p, 0);
  struct TreeDp {
    std::vector<int> order;                             // DFS preorder
    std::vector<int> parent;                            // aligned to order
    std::vector<double> profile;                        // best capture per budget
    std::vector<std::pair<int, int>> profile_arg;       // (vertex, size)
  };
  // dp[v]: stage tables after merging each child, for reconstruction
  std::vector<std::vector<std::vector<double>>> stages(p);
  std::vector<std::vector<int>> kids(p);

  std::vector<TreeDp> trees;
  for (int root : verts) {
    if (visited[root]) continue;
    TreeDp td;
    std::vector<std::pair<int, int>> stack{{root, -1}};
    visited[root] = 1;
    while (!stack.empty()) {
      auto [v, parent] = stack.back();
      stack.pop_back();
      td.order.push_back(v);
      td.parent.push_back(parent);
      for (int a = head[v]; a >= 0; a = arcs[a][1]) {
        const int u = arcs[a][0];
        if (!visited[u]) {
          visited[u] = 1;
          stack.push_back({u, v});
        }
      }
    }
    for (int v : td.order) {
      kids[v].clear();
      stages[v].clear();
    }
    for (std::size_t i = 1; i < td.order.size(); ++i)
      kids[td.parent[i]].push_back(td.order[i]);

    td.profile.assign(limit + 1, kNeg);
    td.profile_arg.assign(limit + 1, {-1, 0});
    for (auto it = td.order.rbegin(); it != td.order.rend(); ++it) {
      const int v = *it;
      std::vector<double> dp(2, kNeg);
      dp[1] = x[v] * x[v];
      for (int c : kids[v]) {
        const auto& cdp = stages[c].back();
        std::vector<double> next(std::min<std::size_t>(dp.size() + cdp.size() - 1,
                                                       limit + 1),
                                 kNeg);
        for (std::size_t j = 1; j < dp.size(); ++j) {
          if (dp[j] < 0.0) continue;
          if (j < next.size() && dp[j] > next[j]) next[j] = dp[j];  // child excluded
          for (std::size_t a = 1; a < cdp.size() && j + a < next.size() + 0; ++a) {
            if (cdp[a] < 0.0) continue;
            const std::size_t jj = j + a;
            if (jj >= next.size()) break;
            const double val = dp[j] + cdp[a];
            if (val > next[jj]) next[jj] = val;
          }
        }
        stages[v].push_back(dp);
        dp = std::move(next);
      }
      stages[v].push_back(dp);
      for (std::size_t j = 1; j < dp.size() && j <= static_cast<std::size_t>(limit); ++j) {
        if (dp[j] > td.profile[j]) {
          td.profile[j] = dp[j];
          td.profile_arg[j] = {v, static_cast<int>(j)};
        }
      }
    }
    // make the profile monotone in the budget
    for (int j = 1; j <= limit; ++j) {
      if (td.profile[j] < td.profile[j - 1]) {
        td.profile[j] = td.profile[j - 1];
        td.profile_arg[j] = td.profile_arg[j - 1];
      }
    }
    trees.push_back(std::move(td));
  }

  // Knapsack across trees.
  const int nt = static_cast<int>(trees.size());
  std::vector<std::vector<double>> knap(nt + 1, std::vector<double>(limit + 1, 0.0));
  std::vector<std::vector<int>> take(nt + 1, std::vector<int>(limit + 1, 0));
  for (int t = 1; t <= nt; ++t) {
    for (int b = 0; b <= limit; ++b) {
      knap[t][b] = knap[t - 1][b];
      take[t][b] = 0;
      for (int a = 1; a <= b; ++a) {
        if (trees[t - 1].profile[a] < 0.0) continue;
        const double val = knap[t - 1][b - a] + trees[t - 1].profile[a];
        if (val > knap[t][b]) {
          knap[t][b] = val;
          take[t][b] = a;
        }
      }
    }
  }

  // Reconstruct: per-tree budget, then the subtree realizing the profile.
  Support out;
  int budget = limit;
  for (int t = nt; t >= 1; --t) {
    const int a = take[t][budget];
    budget -= a;
    if (a == 0) continue;
    const TreeDp& td = trees[t - 1];
    auto [v_star, j_star] = td.profile_arg[a];
    // walk down from v_star distributing j_star vertices
    std::vector<std::pair<int, int>> down{{v_star, j_star}};
    while (!down.empty()) {
      auto [v, j] = down.back();
      down.pop_back();
      out.push_back(v);
      int remaining = j;
      for (int ci = static_cast<int>(kids[v].size()); ci-- > 0;) {
        const int c = kids[v][ci];
        const auto& before = stages[v][ci];
        const auto& after = stages[v][ci + 1];
        const auto& cdp = stages[c].back();
        // find the child's allocation that reproduces the merged value
        int alloc = 0;
        if (static_cast<std::size_t>(remaining) < before.size() &&
            before[remaining] == after[remaining]) {
          alloc = 0;
        } else {
          for (int a2 = 1; a2 < static_cast<int>(cdp.size()); ++a2) {
            const int rest = remaining - a2;
            if (rest < 1 || static_cast<std::size_t>(rest) >= before.size()) continue;
            if (before[rest] < 0.0 || cdp[a2] < 0.0) continue;
            if (before[rest] + cdp[a2] == after[remaining]) {
              alloc = a2;
              break;
            }
          }
        }
        if (alloc > 0) down.push_back({c, alloc});
        remaining -= alloc;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Next probe for a size-vs-multiplier bracket: log-log interpolation toward
// the target size, clamped to the middle of the bracket so progress is
// guaranteed. Scale-equivariant since only multiplier ratios enter.
double interpolate_multiplier(double lo, double k_lo, double hi, double k_hi,
                              double k_target) {
  const double span = std::log(hi / lo);
  double frac = 0.5;
  if (k_lo > k_hi) {
    frac = std::log(k_lo / k_target) / std::log(k_lo / k_hi);
  } else if (k_hi > k_lo) {
    frac = std::log(k_target / k_lo) / std::log(k_hi / k_lo);
  }
  frac = std::min(0.9, std::max(0.1, frac));
  return lo * std::exp(frac * span);
}

void check_input(std::span<const double> x, const Graph& graph,
                 const WgmModel& model) {
  model.validate(graph.num_vertices());
  if (static_cast<int>(x.size()) != graph.num_vertices())
    throw std::invalid_argument("projection: vector length must equal vertex count");
  for (double t : x)
    if (!std::isfinite(t))
      throw std::invalid_argument("projection: vector entries must be finite");
}

}  // namespace

ProjectionOutcome head_project(std::span<const double> x, const Graph& graph,
                               const WgmModel& model) {
  check_input(x, graph, model);
  const int p = graph.num_vertices();

  PcsfInstance inst;
  inst.graph = &graph;
  inst.target_components = model.components;
  inst.prizes.resize(p);
  for (int v = 0; v < p; ++v) inst.prizes[v] = x[v] * x[v];
  const std::vector<double> base_costs = normalized_costs(graph);
  const SearchScales sc = scales_of(inst.prizes, base_costs);
  if (sc.total_prize <= 0.0) return restrict_to(x, {}, 0);

  const int lo_size = model.sparsity;
  const int hi_size = std::min(p, model.head_limit());
  int iterations = 0;

  auto solve_at = [&](double lambda) {
    inst.costs.resize(base_costs.size());
    for (std::size_t e = 0; e < base_costs.size(); ++e)
      inst.costs[e] = lambda * base_costs[e];
    ++iterations;
    return solve_pcsf(inst);
  };

  if (graph.edges().empty() || !(sc.min_pos_cost < std::numeric_limits<double>::infinity())) {
    // Nothing to connect through; a single solve keeps the g best vertices.
    inst.costs = base_costs;
    ++iterations;
    return restrict_to(x, solve_pcsf(inst).vertices, iterations);
  }

  const double floor_mult = 1e-12 * sc.total_prize / sc.total_cost;
  const double ceil_mult = 4.0 * sc.total_prize / sc.min_pos_cost;

  Forest probe = solve_at(floor_mult);
  if (static_cast<int>(probe.vertices.size()) <= hi_size)
    return restrict_to(x, std::move(probe.vertices), iterations);

  Support best;
  double best_capture = -1.0;
  auto consider = [&](Forest f) {
    double capture = 0.0;
    for (int v : f.vertices) capture += inst.prizes[v];
    if (capture > best_capture) {
      best_capture = capture;
      best = std::move(f.vertices);
    }
  };

  // Bracket the support-size transition starting from the mean prize scale
  // (costs are mean one), then aim probes at the window on a log-log model
  // of the bracket. The size falls through a sharp cliff, so plain
  // bisection from the extreme multipliers wastes most of its probes.
  double lo = floor_mult, k_lo = static_cast<double>(probe.vertices.size());
  double hi = ceil_mult, k_hi = static_cast<double>(model.components);
  const double k_target = std::sqrt(static_cast<double>(lo_size) * hi_size);
  double cursor = std::min(ceil_mult, std::max(floor_mult, sc.total_prize / p));
  bool bracketed = false;
  for (int iter = 0; iter < 30 && hi > lo * 1.005; ++iter) {
    const double mid = bracketed ? interpolate_multiplier(lo, k_lo, hi, k_hi, k_target)
                                 : cursor;
    Forest f = solve_at(mid);
    const int k = static_cast<int>(f.vertices.size());
    if (k >= lo_size && k <= hi_size)
      return restrict_to(x, std::move(f.vertices), iterations);
    if (k > hi_size) {
      lo = mid;
      k_lo = k;
      if (!bracketed) {
        cursor = std::min(hi, mid * 8.0);
        bracketed = cursor >= hi;
      }
    } else {
      consider(std::move(f));
      hi = mid;
      k_hi = std::max(1.0, static_cast<double>(k));
      bracketed = true;
    }
  }
  if (best_capture >= 0.0) return restrict_to(x, std::move(best), iterations);
  return restrict_to(x, solve_at(hi).vertices, iterations);
}

ProjectionOutcome tail_project(std::span<const double> x, const Graph& graph,
                               const WgmModel& model) {
  check_input(x, graph, model);
  const int p = graph.num_vertices();

  PcsfInstance inst;
  inst.graph = &graph;
  inst.target_components = model.components;
  std::vector<double> base_prizes(p);
  for (int v = 0; v < p; ++v) base_prizes[v] = x[v] * x[v];
  inst.costs = normalized_costs(graph);
  const SearchScales sc = scales_of(base_prizes, inst.costs);
  if (sc.total_prize <= 0.0) return restrict_to(x, {}, 0);

  const int lo_size = model.sparsity;
  const int hi_size = std::min(p, model.tail_limit());
  int iterations = 0;
  int nnz = 0;
  for (int v = 0; v < p; ++v)
    if (x[v] != 0.0) ++nnz;

  auto solve_at = [&](double mu) {
    inst.prizes.resize(base_prizes.size());
    for (int v = 0; v < p; ++v) inst.prizes[v] = mu * base_prizes[v];
    ++iterations;
    return solve_pcsf(inst);
  };

  Support best;
  double best_capture = -1.0;
  bool best_exact = false;
  // Trim the candidate to the sparsity bound, score it by captured squared
  // mass, and remember the best. "Exact" means every nonzero of x survived,
  // i.e. tail distance 0.
  auto consider = [&](Forest f) {
    Support kept;
    if (static_cast<int>(f.vertices.size()) <= model.sparsity)
      kept = std::move(f.vertices);
    else
      kept = best_subforest(graph, x, f.vertices, f.edge_indices, model.sparsity);
    double capture = 0.0;
    int kept_nnz = 0;
    for (int v : kept) {
      capture += base_prizes[v];
      if (x[v] != 0.0) ++kept_nnz;
    }
    if (capture > best_capture) {
      best_capture = capture;
      best = std::move(kept);
      best_exact = kept_nnz == nnz;
    }
  };

  if (graph.edges().empty() || sc.total_cost <= 0.0) {
    consider(solve_at(1.0));
    return restrict_to(x, std::move(best), iterations);
  }

  const double floor_mult = 1e-12 * sc.total_cost / sc.total_prize;
  const double ceil_mult = 4.0 * sc.total_cost / sc.min_pos_prize;

  Forest top = solve_at(ceil_mult);
  double k_hi = std::max(1.0, static_cast<double>(top.vertices.size()));
  double k_lo = static_cast<double>(model.components);
  consider(std::move(top));
  if (best_exact) return restrict_to(x, std::move(best), iterations);

  // Same bracketing as the head search, from the matching scale for a
  // prize multiplier and expanding upward until enough mass is collected.
  double lo = floor_mult, hi = ceil_mult;
  const double k_target = std::sqrt(static_cast<double>(lo_size) * hi_size);
  double cursor =
      std::min(ceil_mult, std::max(floor_mult, static_cast<double>(p) / sc.total_prize));
  bool bracketed = false;
  for (int iter = 0; iter < 30 && hi > lo * 1.005; ++iter) {
    const double mid = bracketed ? interpolate_multiplier(lo, k_lo, hi, k_hi, k_target)
                                 : cursor;
    Forest f = solve_at(mid);
    const int k = static_cast<int>(f.vertices.size());
    const bool in_window = k >= lo_size && k <= hi_size;
    consider(std::move(f));
    if (best_exact) break;
    if (in_window) break;
    if (k > hi_size) {
      hi = mid;
      k_hi = std::max(1.0, static_cast<double>(k));
      bracketed = true;
    } else {
      lo = mid;
      k_lo = std::max(1.0, static_cast<double>(k));
      if (!bracketed) {
        cursor = std::min(hi, mid * 8.0);
        bracketed = cursor >= hi;
      }
    }
  }
  return restrict_to(x, std::move(best), iterations);
}

ProjectionOutcome exact_project(std::span<const double> x, const Graph& graph,
                                const WgmModel& model) {
  check_input(x, graph, model);
  const int p = graph.num_vertices();
  if (p > 16)
    throw std::domain_error("exact_project: oracle limited to p <= 16 vertices");

  // Adjacency as bitmasks for the subset scan.
  std::vector<unsigned> nbr(p, 0);
  for (const Edge& e : graph.edges()) {
    nbr[e.u] |= 1u << e.v;
    nbr[e.v] |= 1u << e.u;
  }
  auto components_of = [&](unsigned mask) {
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
  };

  double best_norm = -1.0;
  unsigned best_mask = 0;
  const unsigned full = (1u << p) - 1u;
  for (unsigned mask = 0; mask <= full; ++mask) {
    if (std::popcount(mask) > model.sparsity) continue;
    double norm = 0.0;
    for (unsigned scan = mask; scan;) {
      const int v = std::countr_zero(scan);
      scan &= scan - 1u;
      norm += x[v] * x[v];
    }
    if (norm <= best_norm) continue;
    if (mask && components_of(mask) > model.components) continue;
    Support s;
    for (unsigned scan = mask; scan;) {
      s.push_back(std::countr_zero(scan));
      scan &= scan - 1u;
    }
    if (msf_weight(graph, s) >
        model.cost_budget + 1e-9 * std::max(1.0, model.cost_budget))
      continue;
    best_norm = norm;
    best_mask = mask;
  }
  Support s;
  for (unsigned scan = best_mask; scan;) {
    s.push_back(std::countr_zero(scan));
    scan &= scan - 1u;
  }
  return restrict_to(x, std::move(s), 0);
}

ProjectionOutcome top_k(std::span<const double> x, int s) {
  if (s < 0 || s > static_cast<int>(x.size()))
    throw std::invalid_argument("top_k: need 0 <= s <= p");
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(x[a]), mb = std::abs(x[b]);
    return ma != mb ? ma > mb : a < b;
  });
  Support support(order.begin(), order.begin() + s);
  std::sort(support.begin(), support.end());
  return restrict_to(x, std::move(support), 0);
}

}  // namespace graphiht
