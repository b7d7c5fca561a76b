#include "graphiht/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "graphiht/kernels.hpp"
#include "graphiht/projections.hpp"
#include "graphiht/rng.hpp"

namespace graphiht {

const char* method_name(Method m) {
  switch (m) {
    case Method::Iht: return "iht";
    case Method::StoIht: return "sto-iht";
    case Method::GraphStoIht: return "graph-sto-iht";
    case Method::GraphSvrg: return "graph-svrg-iht";
    case Method::GraphScsg: return "graph-scsg-iht";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "iht") return Method::Iht;
  if (name == "sto-iht" || name == "sto") return Method::StoIht;
  if (name == "graph-sto-iht" || name == "graph-sto") return Method::GraphStoIht;
  if (name == "graph-svrg-iht" || name == "graph-svrg") return Method::GraphSvrg;
  if (name == "graph-scsg-iht" || name == "graph-scsg") return Method::GraphScsg;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<double> graph_step(std::span<const double> x, std::span<const double> grad,
                               double eta, const Graph& graph, const WgmModel& model) {
  if (x.size() != grad.size())
    throw std::invalid_argument("graph_step: dimension mismatch");
  const ProjectionOutcome head = head_project(grad, graph, model);
  std::vector<double> moved(x.begin(), x.end());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] -= eta * head.vector[i];
  return tail_project(moved, graph, model).vector;
}

int draw_inner_loops(Rng& rng, int batch_size, int minibatch_size) {
  const double gamma =
      static_cast<double>(batch_size) / static_cast<double>(batch_size + minibatch_size);
  const double u = rng.uniform01();
  const double k = std::floor(std::log(u) / std::log(gamma));
  if (!(k >= 1.0)) return 1;
  if (k > 1e9) return 1 << 30;
  return static_cast<int>(k);
}

namespace {

constexpr std::uint64_t kInnerTag = 1;
constexpr std::uint64_t kOuterTag = 2;
constexpr std::uint64_t kLoopTag = 3;

// Trace recording, epoch budget, and the residual stopping rule shared by
// every solver loop.
class Run {
 public:
  Run(const Dataset& d, const SolverConfig& cfg, GradientAccount& account,
      std::span<const double> x_star)
      : d_(d),
        cfg_(cfg),
        account_(account),
        x_star_(x_star),
        start_(std::chrono::steady_clock::now()) {
    stride_ = (d.n + 3) / 4;
    next_mark_ = 0;  // record the starting point immediately
    budget_ = static_cast<std::uint64_t>(cfg.max_epochs) * d.n;
  }

  bool stopped() const { return stopped_; }

  // Records a checkpoint whenever the account has crossed the next mark.
  void poll(std::span<const double> x) {
    if (stopped_) return;
    if (account_.sample_gradients >= next_mark_) {
      record(x);
      next_mark_ = (account_.sample_gradients / stride_ + 1) * stride_;
    }
    if (account_.sample_gradients >= budget_) stopped_ = true;
  }

  void finish(std::span<const double> x) {
    if (trace_.checkpoints.empty() ||
        trace_.checkpoints.back().data_points < account_.sample_gradients)
      record(x);
  }

  void check_finite(std::span<const double> x, const char* who, int outer, int inner) {
    for (double t : x)
      if (!std::isfinite(t) || std::abs(t) > 1e150)
        throw DivergenceError(std::string(who) + ": non-finite iterate at outer loop " +
                              std::to_string(outer) + ", inner step " +
                              std::to_string(inner));
  }

  Trace take_trace() { return std::move(trace_); }

 private:
  void record(std::span<const double> x) {
    Checkpoint cp;
    cp.data_points = account_.sample_gradients;
    cp.epoch = static_cast<double>(cp.data_points) / d_.n;
    cp.residual = d_.kind == ObjectiveKind::LeastSquares ? residual_norm(d_, x)
                                                         : loss(d_, x);
    if (x_star_.empty()) {
      cp.est_error = std::numeric_limits<double>::quiet_NaN();
    } else {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - x_star_[i];
        acc += diff * diff;
      }
      cp.est_error = std::sqrt(acc);
    }
    cp.support_size = 0;
    for (double t : x)
      if (t != 0.0) ++cp.support_size;
    cp.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    trace_.checkpoints.push_back(cp);
    if (cfg_.residual_stop > 0.0 && cp.residual <= cfg_.residual_stop) stopped_ = true;
  }

  const Dataset& d_;
  const SolverConfig& cfg_;
  GradientAccount& account_;
  std::span<const double> x_star_;
  std::chrono::steady_clock::time_point start_;
  Trace trace_;
  std::uint64_t stride_ = 1;
  std::uint64_t next_mark_ = 0;
  std::uint64_t budget_ = 0;
  bool stopped_ = false;
};

void validate_config(const Dataset& d, const SolverConfig& cfg, bool graph_method) {
  d.validate();
  if (cfg.eta <= 0.0) throw std::invalid_argument("solver: eta must be positive");
  if (cfg.outer_loops < 0) throw std::invalid_argument("solver: J must be nonnegative");
  const int b = cfg.minibatch_size, B = cfg.batch_size == 0 ? d.n : cfg.batch_size;
  if (b < 1 || b > B || B > d.n)
    throw std::invalid_argument("solver: need 1 <= b <= B <= n");
  if (graph_method) cfg.model.validate(d.p);
  if (cfg.model.sparsity > d.p) throw std::invalid_argument("solver: sparsity exceeds p");
}

std::vector<int> all_rows(int n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

// Same composition as graph_step, with overflow guards so a diverging run
// raises a DivergenceError naming the iteration instead of tripping the
// projections' input validation. The magnitude cap keeps squared prizes
// representable.
std::vector<double> checked_graph_step(std::span<const double> x,
                                       std::span<const double> grad, double eta,
                                       const Graph& graph, const WgmModel& model,
                                       const char* who, int outer, int inner) {
  auto guard = [&](std::span<const double> v) {
    for (double t : v)
      if (!std::isfinite(t) || std::abs(t) > 1e150)
        throw DivergenceError(std::string(who) + ": non-finite iterate at outer loop " +
                              std::to_string(outer) + ", inner step " +
                              std::to_string(inner));
  };
  guard(grad);
  const ProjectionOutcome head = head_project(grad, graph, model);
  std::vector<double> moved(x.begin(), x.end());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] -= eta * head.vector[i];
  guard(moved);
  return tail_project(moved, graph, model).vector;
}

// v = grad_batch(x) - grad_batch(anchor_point) + anchor_grad
void variance_reduced_grad(const Dataset& d, std::span<const int> batch,
                           std::span<const double> x, std::span<const double> x_anchor,
                           std::span<const double> anchor_grad, GradientAccount& account,
                           std::vector<double>& scratch1, std::vector<double>& scratch2,
                           std::vector<double>& out) {
  scratch1.resize(x.size());
  scratch2.resize(x.size());
  grad_batch_into(d, batch, x, account, scratch1);
  grad_batch_into(d, batch, x_anchor, account, scratch2);
  out.resize(x.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = scratch1[i] - scratch2[i] + anchor_grad[i];
}

SolveResult run_threshold_method(const Dataset& d, const SolverConfig& cfg,
                                 GradientAccount& account, std::span<const double> x_star,
                                 bool stochastic) {
  validate_config(d, cfg, false);
  Run run(d, cfg, account, x_star);
  Rng inner = stream(cfg.seed, kInnerTag);
  std::vector<double> x(d.p, 0.0);
  std::vector<double> g(d.p, 0.0);
  const std::vector<int> full = all_rows(d.n);
  const int b = cfg.minibatch_size;
  const char* who = stochastic ? "StoIHT" : "IHT";

  run.poll(x);
  for (int t = 0; t < cfg.outer_loops && !run.stopped(); ++t) {
    if (stochastic) {
      const std::vector<int> batch = inner.subset(d.n, b);
      grad_batch_into(d, batch, x, account, g);
    } else {
      grad_batch_into(d, full, x, account, g);
    }
    for (int j = 0; j < d.p; ++j) g[j] = x[j] - cfg.eta * g[j];
    x = top_k(g, cfg.model.sparsity).vector;
    run.check_finite(x, who, t, 0);
    run.poll(x);
  }
  run.finish(x);
  return {std::move(x), run.take_trace()};
}

}  // namespace

SolveResult run_iht(const Dataset& d, const SolverConfig& cfg, GradientAccount& account,
                    std::span<const double> x_star) {
  return run_threshold_method(d, cfg, account, x_star, false);
}

SolveResult run_sto_iht(const Dataset& d, const SolverConfig& cfg,
                        GradientAccount& account, std::span<const double> x_star) {
  return run_threshold_method(d, cfg, account, x_star, true);
}

SolveResult run_graph_sto_iht(const Dataset& d, const Graph& graph,
                              const SolverConfig& cfg, GradientAccount& account,
                              std::span<const double> x_star) {
  validate_config(d, cfg, true);
  Run run(d, cfg, account, x_star);
  Rng inner = stream(cfg.seed, kInnerTag);
  std::vector<double> x(d.p, 0.0);
  std::vector<double> g(d.p, 0.0);
  const int b = cfg.minibatch_size;

  run.poll(x);
  for (int t = 0; t < cfg.outer_loops && !run.stopped(); ++t) {
    const std::vector<int> batch = inner.subset(d.n, b);
    grad_batch_into(d, batch, x, account, g);
    x = checked_graph_step(x, g, cfg.eta, graph, cfg.model, "GraphSto-IHT", t, 0);
    run.check_finite(x, "GraphSto-IHT", t, 0);
    run.poll(x);
  }
  run.finish(x);
  return {std::move(x), run.take_trace()};
}

SolveResult run_graph_svrg_iht(const Dataset& d, const Graph& graph,
                               const SolverConfig& cfg, GradientAccount& account,
                               std::span<const double> x_star) {
  validate_config(d, cfg, true);
  Run run(d, cfg, account, x_star);
  Rng inner = stream(cfg.seed, kInnerTag);
  const int K = cfg.inner_loops > 0 ? cfg.inner_loops : d.n;
  std::vector<double> x_tilde(d.p, 0.0);
  std::vector<double> anchor(d.p, 0.0);
  std::vector<double> s1, s2, v;
  const std::vector<int> full = all_rows(d.n);

  run.poll(x_tilde);
  for (int j = 0; j < cfg.outer_loops && !run.stopped(); ++j) {
    grad_batch_into(d, full, x_tilde, account, anchor);
    run.poll(x_tilde);
    std::vector<double> x = x_tilde;
    for (int k = 0; k < K && !run.stopped(); ++k) {
      const std::vector<int> batch = inner.subset(d.n, 1);
      variance_reduced_grad(d, batch, x, x_tilde, anchor, account, s1, s2, v);
      x = checked_graph_step(x, v, cfg.eta, graph, cfg.model, "GraphSVRG-IHT", j, k);
      run.check_finite(x, "GraphSVRG-IHT", j, k);
      run.poll(x);
    }
    x_tilde = std::move(x);
  }
  run.finish(x_tilde);
  return {std::move(x_tilde), run.take_trace()};
}

SolveResult run_graph_scsg_iht(const Dataset& d, const Graph& graph,
                               const SolverConfig& cfg, GradientAccount& account,
                               std::span<const double> x_star) {
  validate_config(d, cfg, true);
  Run run(d, cfg, account, x_star);
  Rng inner = stream(cfg.seed, kInnerTag);
  Rng outer = stream(cfg.seed, kOuterTag);
  Rng loops = stream(cfg.seed, kLoopTag);
  const int B = cfg.batch_size == 0 ? d.n : cfg.batch_size;
  const int b = cfg.minibatch_size;
  std::vector<double> x_tilde(d.p, 0.0);
  std::vector<double> anchor(d.p, 0.0);
  std::vector<double> s1, s2, v;

  run.poll(x_tilde);
  for (int j = 0; j < cfg.outer_loops && !run.stopped(); ++j) {
    const std::vector<int> big_batch = outer.subset(d.n, B);
    grad_batch_into(d, big_batch, x_tilde, account, anchor);
    run.poll(x_tilde);
    const int K = cfg.scsg_option == ScsgOption::Fixed
                      ? (B + b - 1) / b
                      : draw_inner_loops(loops, B, b);
    std::vector<double> x = x_tilde;
    for (int k = 0; k < K && !run.stopped(); ++k) {
      const std::vector<int> batch = inner.subset(d.n, b);
      variance_reduced_grad(d, batch, x, x_tilde, anchor, account, s1, s2, v);
      x = checked_graph_step(x, v, cfg.eta, graph, cfg.model, "GraphSCSG-IHT", j, k);
      run.check_finite(x, "GraphSCSG-IHT", j, k);
      run.poll(x);
    }
    x_tilde = std::move(x);
  }
  run.finish(x_tilde);
  return {std::move(x_tilde), run.take_trace()};
}

SolveResult run_solver(const Dataset& dataset, const Graph* graph,
                       const SolverConfig& config, GradientAccount& account,
                       std::span<const double> x_star) {
  switch (config.method) {
    case Method::Iht: return run_iht(dataset, config, account, x_star);
    case Method::StoIht: return run_sto_iht(dataset, config, account, x_star);
    case Method::GraphStoIht:
    case Method::GraphSvrg:
    case Method::GraphScsg:
      if (graph == nullptr)
        throw std::invalid_argument("run_solver: graph methods need a graph");
      if (config.method == Method::GraphStoIht)
        return run_graph_sto_iht(dataset, *graph, config, account, x_star);
      if (config.method == Method::GraphSvrg)
        return run_graph_svrg_iht(dataset, *graph, config, account, x_star);
      return run_graph_scsg_iht(dataset, *graph, config, account, x_star);
  }
  throw std::invalid_argument("run_solver: unknown method");
}

SlopeFit fit_convergence_slope(const Trace& trace, double floor) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(trace.checkpoints.size());
  for (const Checkpoint& cp : trace.checkpoints) pts.push_back({cp.epoch, cp.residual});
  return fit_convergence_slope(pts, floor);
}

}  // namespace graphiht
