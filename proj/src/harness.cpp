#include "graphiht/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "graphiht/rng.hpp"

namespace graphiht {

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = base;
  s = splitmix64(s) ^ (a * 0x9e3779b97f4a7c15ULL);
  s = splitmix64(s) ^ (b * 0xd1b54a32d192ed03ULL);
  return splitmix64(s);
}

int default_observations(int s) {
  // 6x oversampling; grid instances recover reliably here, while 2.5x
  // leaves the union-restricted spectrum nearly singular.
  return std::max(60, 6 * s);
}

}  // namespace

Instance gen_instance(const Graph& graph, const WgmModel& model, int m,
                      double noise_sigma, std::uint64_t seed) {
  model.validate(graph.num_vertices());
  if (m == 0) m = default_observations(model.sparsity);
  if (m < 1) throw std::invalid_argument("gen_instance: need m >= 1");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("gen_instance: noise_sigma must be nonnegative");
  const int p = graph.num_vertices();

  Rng rng_support = stream(seed, 11);
  Rng rng_values = stream(seed, 12);
  Rng rng_design = stream(seed, 13);
  Rng rng_noise = stream(seed, 14);

  Instance inst;
  inst.support = random_connected_support(graph, model.sparsity, model.components,
                                          rng_support);
  inst.x_star.assign(p, 0.0);
  for (int v : inst.support) inst.x_star[v] = rng_values.gaussian();

  Dataset& d = inst.dataset;
  d.n = m;
  d.p = p;
  d.kind = ObjectiveKind::LeastSquares;
  d.a.resize(static_cast<std::size_t>(m) * p);
  for (double& t : d.a) t = rng_design.gaussian();
  d.y.resize(m);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* row = d.a.data() + static_cast<std::size_t>(i) * p;
    for (int v : inst.support) acc += row[v] * inst.x_star[v];
    d.y[i] = acc + (noise_sigma > 0.0 ? noise_sigma * rng_noise.gaussian() : 0.0);
  }
  return inst;
}

void ExperimentSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("spec: bad grid shape");
  if (s_values.empty() || eta_values.empty() || methods.empty() || b_values.empty())
    throw std::invalid_argument("spec: sweep lists must be nonempty");
  if (trials < 1) throw std::invalid_argument("spec: trials must be >= 1");
  if (g < 1) throw std::invalid_argument("spec: g must be >= 1");
  if (jobs < 1) throw std::invalid_argument("spec: jobs must be >= 1");
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto from = item.find_first_not_of(" \t");
    const auto to = item.find_last_not_of(" \t");
    if (from == std::string::npos) continue;
    out.push_back(item.substr(from, to - from + 1));
  }
  return out;
}

}  // namespace

ExperimentSpec parse_spec_text(const std::string& text) {
  ExperimentSpec spec;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                    ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto from = s.find_first_not_of(" \t\r");
      if (from == std::string::npos) return std::string();
      const auto to = s.find_last_not_of(" \t\r");
      return s.substr(from, to - from + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                  ": empty key or value");
    try {
      if (key == "rows") spec.rows = std::stoi(val);
      else if (key == "cols") spec.cols = std::stoi(val);
      else if (key == "s") {
        spec.s_values.clear();
        for (const auto& v : split_list(val)) spec.s_values.push_back(std::stoi(v));
      } else if (key == "g") spec.g = std::stoi(val);
      else if (key == "eta") {
        spec.eta_values.clear();
        for (const auto& v : split_list(val)) spec.eta_values.push_back(std::stod(v));
      } else if (key == "methods") {
        spec.methods.clear();
        for (const auto& v : split_list(val)) spec.methods.push_back(method_from_name(v));
      } else if (key == "B") {
        spec.B_values.clear();
        for (const auto& v : split_list(val)) spec.B_values.push_back(std::stoi(v));
      } else if (key == "b") {
        spec.b_values.clear();
        for (const auto& v : split_list(val)) spec.b_values.push_back(std::stoi(v));
      } else if (key == "m") spec.m_observations = std::stoi(val);
      else if (key == "noise") spec.noise_sigma = std::stod(val);
      else if (key == "trials") spec.trials = std::stoi(val);
      else if (key == "seed") spec.seed_base = std::stoull(val);
      else if (key == "x_axis") {
        if (val == "epochs") spec.x_axis = ExperimentSpec::XAxis::Epochs;
        else if (val == "data_points") spec.x_axis = ExperimentSpec::XAxis::DataPoints;
        else throw std::invalid_argument("x_axis must be epochs or data_points");
      } else if (key == "max_epochs") spec.max_epochs = std::stoi(val);
      else if (key == "residual_stop") spec.residual_stop = std::stod(val);
      else if (key == "inner_loops") spec.inner_loops = std::stoi(val);
      else if (key == "scsg_option") {
        if (val == "geometric") spec.scsg_option = ScsgOption::Geometric;
        else if (val == "fixed") spec.scsg_option = ScsgOption::Fixed;
        else throw std::invalid_argument("scsg_option must be geometric or fixed");
      } else if (key == "jobs") spec.jobs = std::stoi(val);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("spec line " + std::to_string(lineno) +
                                  ": bad value for key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

namespace {

struct RunPoint {
  int s;
  double eta;
  int B;
  int b;
  Method method;
  int trial;
};

}  // namespace

TraceSet run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const Graph graph = Graph::grid(spec.rows, spec.cols);

  std::vector<RunPoint> points;
  for (int s : spec.s_values) {
    std::vector<int> Bs = spec.B_values;
    if (Bs.empty()) Bs.push_back(s);  // batch size follows the sparsity
    for (double eta : spec.eta_values)
      for (int B : Bs)
        for (int b : spec.b_values)
          for (Method m : spec.methods)
            for (int trial = 0; trial < spec.trials; ++trial)
              points.push_back({s, eta, B, b, m, trial});
  }

  // One instance per (s, trial), shared across methods and learning rates
  // so curves are comparable.
  std::map<std::pair<int, int>, Instance> instances;
  for (const RunPoint& pt : points) {
    const auto key = std::make_pair(pt.s, pt.trial);
    if (!instances.count(key)) {
      WgmModel model;
      model.sparsity = pt.s;
      model.components = spec.g;
      model.cost_budget = pt.s - spec.g;  // unit-weight default
      instances.emplace(key, gen_instance(graph, model, spec.m_observations,
                                          spec.noise_sigma,
                                          mix_seed(spec.seed_base, pt.s, pt.trial)));
    }
  }

  std::vector<std::vector<TraceRow>> results(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.jobs)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(points.size()); ++idx) {
    const RunPoint& pt = points[idx];
    const Instance& inst = instances.at({pt.s, pt.trial});
    const int n = inst.dataset.n;

    SolverConfig cfg;
    cfg.method = pt.method;
    cfg.eta = pt.eta;
    cfg.model.sparsity = pt.s;
    cfg.model.components = spec.g;
    cfg.model.cost_budget = pt.s - spec.g;
    cfg.seed = mix_seed(spec.seed_base, pt.s, pt.trial);
    cfg.max_epochs = spec.max_epochs;
    cfg.residual_stop = spec.residual_stop;
    cfg.scsg_option = spec.scsg_option;
    cfg.inner_loops = spec.inner_loops;
    const int B = std::min(pt.B, n);
    cfg.batch_size = B;
    // The plain stochastic baselines draw their whole batch each step; the
    // variance-reduced ones anchor on B and step on b.
    cfg.minibatch_size =
        (pt.method == Method::StoIht || pt.method == Method::GraphStoIht)
            ? B
            : std::min(pt.b, B);

    std::vector<TraceRow> rows;
    TraceRow base;
    base.method = pt.method;
    base.seed = cfg.seed;
    base.s = pt.s;
    base.g = spec.g;
    base.eta = pt.eta;
    base.B = B;
    base.b = cfg.minibatch_size;
    try {
      GradientAccount account;
      SolveResult res = run_solver(inst.dataset, &graph, cfg, account, inst.x_star);
      for (const Checkpoint& cp : res.trace.checkpoints) {
        TraceRow row = base;
        row.cp = cp;
        row.cp.elapsed_ms = 0;  // keeps sweep CSVs byte-reproducible
        rows.push_back(row);
      }
    } catch (const DivergenceError&) {
      TraceRow row = base;
      row.failed = true;
      row.cp.residual = std::numeric_limits<double>::quiet_NaN();
      row.cp.est_error = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(row);
    }
    results[idx] = std::move(rows);
  }

  TraceSet out;
  for (auto& rows : results)
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  return out;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_traces(const TraceSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "method,seed,s,g,eta,B,b,epoch,data_points,residual,est_error,"
         "support_size,elapsed_ms\n";
  for (const TraceRow& r : set.rows) {
    out << method_name(r.method) << ',' << r.seed << ',' << r.s << ',' << r.g << ','
        << fmt_double(r.eta) << ',' << r.B << ',' << r.b << ',' << fmt_double(r.cp.epoch)
        << ',' << r.cp.data_points << ',' << fmt_double(r.cp.residual) << ','
        << (std::isnan(r.cp.est_error) ? std::string() : fmt_double(r.cp.est_error))
        << ',' << r.cp.support_size << ',' << r.cp.elapsed_ms << '\n';
  }
}

TraceSet read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
  TraceSet set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    TraceRow r;
    auto next = [&]() {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short trace row");
      return cell;
    };
    r.method = method_from_name(next());
    r.seed = std::stoull(next());
    r.s = std::stoi(next());
    r.g = std::stoi(next());
    r.eta = std::stod(next());
    r.B = std::stoi(next());
    r.b = std::stoi(next());
    r.cp.epoch = std::stod(next());
    r.cp.data_points = std::stoull(next());
    r.cp.residual = std::stod(next());
    const std::string est = next();
    r.cp.est_error = est.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : std::stod(est);
    r.cp.support_size = std::stoi(next());
    r.cp.elapsed_ms = std::stoll(next());
    r.failed = std::isnan(r.cp.residual);
    set.rows.push_back(r);
  }
  return set;
}

namespace {

struct CurveKey {
  Method method;
  int s;
  double eta;
  int B;
  int b;
  bool operator<(const CurveKey& o) const {
    if (method != o.method) return method < o.method;
    if (s != o.s) return s < o.s;
    if (eta != o.eta) return eta < o.eta;
    if (B != o.B) return B < o.B;
    return b < o.b;
  }
};

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double idx = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = idx - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void emit_plot(const TraceSet& set, const std::string& path,
               ExperimentSpec::XAxis x_axis) {
  // curve -> trial -> checkpoints in order
  std::map<CurveKey, std::map<std::uint64_t, std::vector<Checkpoint>>> curves;
  for (const TraceRow& r : set.rows) {
    if (r.failed) continue;
    curves[{r.method, r.s, r.eta, r.B, r.b}][r.seed].push_back(r.cp);
  }

  struct Band {
    std::vector<double> x, med, lo, hi;
    std::string label;
  };
  std::vector<Band> bands;
  double xmax = 1e-300, ymin = 1e300, ymax = 1e-300;
  const double floor = 1e-16;
  for (auto& [key, trials] : curves) {
    std::size_t longest = 0;
    for (auto& [seed, cps] : trials) longest = std::max(longest, cps.size());
    Band band;
    for (std::size_t i = 0; i < longest; ++i) {
      std::vector<double> xs, rs;
      for (auto& [seed, cps] : trials) {
        if (i >= cps.size()) continue;
        xs.push_back(x_axis == ExperimentSpec::XAxis::Epochs
                         ? cps[i].epoch
                         : static_cast<double>(cps[i].data_points));
        rs.push_back(std::max(cps[i].residual, floor));
      }
      if (xs.empty()) continue;
      band.x.push_back(percentile(xs, 0.5));
      band.med.push_back(percentile(rs, 0.5));
      band.lo.push_back(percentile(rs, 0.25));
      band.hi.push_back(percentile(rs, 0.75));
    }
    std::ostringstream label;
    label << method_name(key.method) << " s=" << key.s << " eta=" << key.eta
          << " B=" << key.B << " b=" << key.b;
    band.label = label.str();
    for (double x : band.x) xmax = std::max(xmax, x);
    for (double y : band.lo) ymin = std::min(ymin, y);
    for (double y : band.hi) ymax = std::max(ymax, y);
    bands.push_back(std::move(band));
  }
  if (bands.empty()) {
    xmax = 1.0;
    ymin = 1e-1;
    ymax = 1.0;
  }
  if (ymin <= 0) ymin = floor;
  const double ly0 = std::log10(ymin) - 0.2, ly1 = std::log10(ymax) + 0.2;

  const double W = 860, H = 580, ml = 70, mr = 230, mt = 30, mb = 50;
  auto X = [&](double x) { return ml + (W - ml - mr) * (xmax > 0 ? x / xmax : 0.0); };
  auto Y = [&](double y) {
    const double ly = std::log10(std::max(y, floor));
    return mt + (H - mt - mb) * (1.0 - (ly - ly0) / (ly1 - ly0));
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">"
      << (x_axis == ExperimentSpec::XAxis::Epochs ? "epochs" : "data points")
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (mt + H - mb) / 2 << ")\">residual</text>\n";
  for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
    const double y = Y(std::pow(10.0, e));
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmax * t / 4.0;
    out << "<line x1=\"" << X(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << X(xv)
        << "\" y2=\"" << H - mb + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << X(xv) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_double(xv)
        << "</text>\n";
  }

  int ci = 0;
  for (const Band& band : bands) {
    const char* color = kPalette[ci % 8];
    if (band.x.size() > 1) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < band.x.size(); ++i)
        out << X(band.x[i]) << "," << Y(band.hi[i]) << " ";
      for (std::size_t i = band.x.size(); i-- > 0;)
        out << X(band.x[i]) << "," << Y(band.lo[i]) << " ";
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < band.x.size(); ++i)
      out << X(band.x[i]) << "," << Y(band.med[i]) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << W - mr + 12 << "\" y=\"" << mt + 16 + 18 * ci
        << "\" font-size=\"12\" fill=\"" << color << "\">" << band.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace graphiht
