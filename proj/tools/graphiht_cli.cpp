// Command-line front end: single solves, experiment sweeps, projection and
// PCSF debugging, theory constants, and trace plotting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "graphiht/harness.hpp"
#include "graphiht/pcsf.hpp"
#include "graphiht/projections.hpp"
#include "graphiht/theory.hpp"

namespace fs = std::filesystem;
using namespace graphiht;

namespace {

std::vector<double> load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  std::vector<double> x;
  double v;
  while (in >> v) x.push_back(v);
  return x;
}

struct SynthOpts {
  std::string method = "graph-svrg-iht";
  int rows = 16, cols = 16, s = 32, g = 1, m = 0;
  double eta = 0.01, noise = 0.0, residual_stop = 1e-6;
  int B = 0, b = 1, K = 0, max_epochs = 100;
  std::string scsg_option = "geometric";
  std::uint64_t seed = 42;
  std::string out = ".";
  bool write_trace = false;
};

int cmd_synth(const SynthOpts& o) {
  const Graph graph = Graph::grid(o.rows, o.cols);
  WgmModel model;
  model.sparsity = o.s;
  model.components = o.g;
  model.cost_budget = o.s - o.g;
  Instance inst = gen_instance(graph, model, o.m, o.noise, o.seed);

  SolverConfig cfg;
  cfg.method = method_from_name(o.method);
  cfg.eta = o.eta;
  cfg.model = model;
  cfg.seed = o.seed;
  cfg.max_epochs = o.max_epochs;
  cfg.residual_stop = o.residual_stop;
  cfg.batch_size = o.B == 0 ? 0 : std::min(o.B, inst.dataset.n);
  cfg.minibatch_size = o.b;
  cfg.inner_loops = o.K;
  cfg.scsg_option = o.scsg_option == "fixed" ? ScsgOption::Fixed : ScsgOption::Geometric;

  GradientAccount account;
  SolveResult res = run_solver(inst.dataset, &graph, cfg, account, inst.x_star);
  const Checkpoint& last = res.trace.checkpoints.back();
  int nnz = 0;
  for (double t : res.x)
    if (t != 0.0) ++nnz;
  std::printf("method=%s n=%d p=%d epochs=%.3f data_points=%llu\n", o.method.c_str(),
              inst.dataset.n, inst.dataset.p, last.epoch,
              static_cast<unsigned long long>(last.data_points));
  std::printf("residual=%.6e est_error=%.6e support=%d elapsed_ms=%lld\n",
              last.residual, last.est_error, nnz,
              static_cast<long long>(last.elapsed_ms));
  if (o.write_trace) {
    TraceSet set;
    for (const Checkpoint& cp : res.trace.checkpoints) {
      TraceRow row;
      row.method = cfg.method;
      row.seed = o.seed;
      row.s = o.s;
      row.g = o.g;
      row.eta = o.eta;
      row.B = cfg.batch_size == 0 ? inst.dataset.n : cfg.batch_size;
      row.b = cfg.minibatch_size;
      row.cp = cp;
      set.rows.push_back(row);
    }
    const fs::path out = fs::path(o.out) / "trace.csv";
    write_traces(set, out.string());
    std::printf("trace: %s\n", out.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-sparse iterative hard thresholding toolkit"};
  app.require_subcommand(1);

  SynthOpts so;
  CLI::App* synth = app.add_subcommand("synth", "run one solver on a synthetic instance");
  synth->add_option("--method", so.method, "iht|sto-iht|graph-sto-iht|graph-svrg-iht|graph-scsg-iht");
  synth->add_option("--rows", so.rows, "grid rows");
  synth->add_option("--cols", so.cols, "grid cols");
  synth->add_option("--s", so.s, "sparsity");
  synth->add_option("--g", so.g, "connected components");
  synth->add_option("--m", so.m, "observations (0 = default rule)");
  synth->add_option("--eta", so.eta, "learning rate");
  synth->add_option("--noise", so.noise, "noise sigma");
  synth->add_option("--B", so.B, "batch size (0 = n)");
  synth->add_option("--b", so.b, "mini-batch size");
  synth->add_option("--K", so.K, "inner loops (0 = n)");
  synth->add_option("--scsg-option", so.scsg_option, "geometric|fixed");
  synth->add_option("--max-epochs", so.max_epochs, "epoch budget");
  synth->add_option("--residual-stop", so.residual_stop, "stop threshold");
  synth->add_option("--seed", so.seed, "seed");
  synth->add_option("--out", so.out, "output directory");
  synth->add_flag("--trace", so.write_trace, "also write trace.csv");

  // Sweep flags mirror the spec-file keys; a flag overrides the file value.
  std::string sweep_spec, sweep_out = ".";
  int sweep_jobs = 0;
  std::map<std::string, std::string> sweep_over;
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment spec file");
  sweep->add_option("--spec", sweep_spec, "spec file (key = value lines)")->required();
  sweep->add_option("--jobs", sweep_jobs, "concurrent runs (overrides spec)");
  sweep->add_option("--out", sweep_out, "output directory");
  for (const char* key : {"rows", "cols", "s", "g", "eta", "methods", "B", "b", "m",
                          "noise", "trials", "seed", "x_axis", "max_epochs",
                          "residual_stop", "inner_loops", "scsg_option"}) {
    const std::string name = std::string("--") + key;
    sweep->add_option_function<std::string>(
        name,
        [&sweep_over, key](const std::string& value) { sweep_over[key] = value; },
        std::string("override spec key ") + key);
  }

  std::string proj_vector, proj_graph, proj_mode = "tail", proj_out = ".";
  int proj_rows = 0, proj_cols = 0, proj_s = 1, proj_g = 1;
  double proj_C = -1.0;
  std::uint64_t proj_seed = 42;
  CLI::App* project = app.add_subcommand("project", "apply a head or tail projection");
  project->add_option("--vector", proj_vector, "vector file, one value per line")->required();
  project->add_option("--graph", proj_graph, "edge-list file");
  project->add_option("--rows", proj_rows, "grid rows (if no --graph)");
  project->add_option("--cols", proj_cols, "grid cols (if no --graph)");
  project->add_option("--s", proj_s, "sparsity")->required();
  project->add_option("--g", proj_g, "components");
  project->add_option("--C", proj_C, "cost budget (default s-g)");
  project->add_option("--mode", proj_mode, "head|tail");
  project->add_option("--seed", proj_seed, "seed (unused; accepted for uniformity)");
  project->add_option("--out", proj_out, "output directory");

  double th_alpha = 0.0, th_beta = 0.0, th_eta = 0.0, th_tau = -1.0, th_ch = 1.0,
         th_ct = 1.0;
  std::string th_dataset;
  int th_rows = 0, th_cols = 0, th_s = 1, th_g = 1;
  std::uint64_t th_seed = 42;
  std::string th_out = ".";
  CLI::App* theory = app.add_subcommand("theory", "print convergence constants");
  theory->add_option("--alpha", th_alpha, "restricted strong convexity");
  theory->add_option("--beta", th_beta, "restricted smoothness");
  theory->add_option("--dataset", th_dataset, "dataset CSV (estimates alpha/beta)");
  theory->add_option("--rows", th_rows, "grid rows");
  theory->add_option("--cols", th_cols, "grid cols");
  theory->add_option("--s", th_s, "sparsity");
  theory->add_option("--g", th_g, "components");
  theory->add_option("--eta", th_eta, "learning rate (default: interval midpoint)");
  theory->add_option("--tau", th_tau, "tau (default eta)");
  theory->add_option("--c-h", th_ch, "head constant");
  theory->add_option("--c-t", th_ct, "tail constant");
  theory->add_option("--seed", th_seed, "seed");
  theory->add_option("--out", th_out, "output directory (unused)");

  std::string plot_traces, plot_out = ".", plot_axis = "epochs";
  std::uint64_t plot_seed = 42;
  CLI::App* plot = app.add_subcommand("plot", "render a trace CSV to SVG");
  plot->add_option("--traces", plot_traces, "trace CSV")->required();
  plot->add_option("--x-axis", plot_axis, "epochs|data_points");
  plot->add_option("--seed", plot_seed, "seed (unused; accepted for uniformity)");
  plot->add_option("--out", plot_out, "output directory");

  std::string pd_graph, pd_prizes, pd_out = ".";
  int pd_g = 1;
  std::uint64_t pd_seed = 42;
  CLI::App* pcsf = app.add_subcommand("pcsf-debug", "solve one PCSF instance");
  pcsf->add_option("--graph", pd_graph, "edge-list file")->required();
  pcsf->add_option("--prizes", pd_prizes, "prize file, one value per vertex")->required();
  pcsf->add_option("--g", pd_g, "target components");
  pcsf->add_option("--seed", pd_seed, "seed (unused; accepted for uniformity)");
  pcsf->add_option("--out", pd_out, "output directory (unused)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(so);

    if (*sweep) {
      std::string text;
      {
        std::ifstream in(sweep_spec);
        if (!in) throw std::runtime_error("cannot open spec file: " + sweep_spec);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
      }
      for (const auto& [key, value] : sweep_over)
        text += "\n" + key + " = " + value + "\n";
      ExperimentSpec spec = parse_spec_text(text);
      if (sweep_jobs > 0) spec.jobs = sweep_jobs;
      TraceSet set = run_sweep(spec);
      fs::create_directories(sweep_out);
      const fs::path csv = fs::path(sweep_out) / "traces.csv";
      const fs::path svg = fs::path(sweep_out) / "plot.svg";
      write_traces(set, csv.string());
      emit_plot(set, svg.string(), spec.x_axis);
      std::printf("runs=%zu rows=%zu\n",
                  static_cast<std::size_t>(spec.trials) * spec.methods.size(),
                  set.rows.size());
      std::printf("traces: %s\nplot: %s\n", csv.string().c_str(), svg.string().c_str());
      return 0;
    }

    if (*project) {
      const std::vector<double> x = load_vector(proj_vector);
      Graph graph = proj_graph.empty()
                        ? Graph::grid(proj_rows, proj_cols)
                        : load_edge_list(proj_graph);
      WgmModel model;
      model.sparsity = proj_s;
      model.components = proj_g;
      model.cost_budget = proj_C >= 0 ? proj_C : proj_s - proj_g;
      const ProjectionOutcome out = proj_mode == "head"
                                        ? head_project(x, graph, model)
                                        : tail_project(x, graph, model);
      fs::create_directories(proj_out);
      const fs::path csv = fs::path(proj_out) / (proj_mode + "_projection.csv");
      std::ofstream f(csv);
      f << "index,value\n";
      f.precision(17);
      for (std::size_t i = 0; i < out.support.size(); ++i)
        f << out.support[i] << "," << out.vector[out.support[i]] << "\n";
      std::printf("mode=%s support=%d pcsf_solves=%d file=%s\n", proj_mode.c_str(),
                  out.achieved_sparsity, out.iterations_used, csv.string().c_str());
      return 0;
    }

    if (*theory) {
      double alpha = th_alpha, beta = th_beta;
      if (!th_dataset.empty()) {
        const Dataset d = load_dataset_csv(th_dataset);
        const Graph graph = Graph::grid(th_rows, th_cols);
        WgmModel model;
        model.sparsity = th_s;
        model.components = th_g;
        model.cost_budget = th_s - th_g;
        const RscRssEstimate est = estimate_rsc_rss(d, graph, model,
                                                    SupportFamily::Expanded, 200, th_seed);
        alpha = est.alpha;
        beta = est.beta;
        std::printf("alpha=%.12g beta=%.12g (%s, %s)\n", alpha, beta,
                    est.exact ? "exact" : "estimate", est.scope.c_str());
      }
      if (alpha <= 0 || beta <= 0)
        throw std::invalid_argument("theory: give --alpha/--beta or --dataset");
      const EtaRange range = eta_range(alpha, beta);
      if (range.feasible)
        std::printf("eta interval: (%.12g, %.12g)\n", range.low, range.high);
      else
        std::printf("eta interval: infeasible (%s)\n", range.note.c_str());
      const double eta = th_eta > 0 ? th_eta
                         : range.feasible ? 0.5 * (range.low + range.high)
                                          : 1.0 / beta;
      const ContractionParams cp =
          contraction_params(alpha, beta, eta, th_tau, th_ch, th_ct);
      std::printf("eta=%.12g tau=%.12g c_h=%g c_t=%g\n", cp.eta, cp.tau, cp.c_h, cp.c_t);
      std::printf("alpha0=%.12g beta0=%.12g sigma1_coeff=%.12g\n", cp.alpha0, cp.beta0,
                  cp.sigma1_coeff);
      std::printf("delta=%.12g delta_alt=%.12g\n", cp.delta, cp.delta_alt);
      std::printf("lambda=%.12g lambda_alt=%.12g gamma=%.12g\n", cp.lambda,
                  cp.lambda_alt, cp.gamma);
      return 0;
    }

    if (*plot) {
      const TraceSet set = read_traces(plot_traces);
      fs::create_directories(plot_out);
      const fs::path svg = fs::path(plot_out) / "plot.svg";
      emit_plot(set, svg.string(),
                plot_axis == "data_points" ? ExperimentSpec::XAxis::DataPoints
                                           : ExperimentSpec::XAxis::Epochs);
      std::printf("plot: %s\n", svg.string().c_str());
      return 0;
    }

    if (*pcsf) {
      const Graph graph = load_edge_list(pd_graph);
      PcsfInstance inst;
      inst.graph = &graph;
      inst.prizes = load_vector(pd_prizes);
      inst.costs.reserve(graph.edges().size());
      for (const Edge& e : graph.edges()) inst.costs.push_back(e.w);
      inst.target_components = pd_g;
      const Forest f = solve_pcsf(inst);
      std::printf("trees=%d vertices=%zu objective=%.12g\n", f.num_trees,
                  f.vertices.size(), forest_objective(inst, f));
      std::printf("vertices:");
      for (int v : f.vertices) std::printf(" %d", v);
      std::printf("\nedges:");
      for (int e : f.edge_indices)
        std::printf(" (%d-%d)", graph.edges()[e].u, graph.edges()[e].v);
      std::printf("\n");
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
