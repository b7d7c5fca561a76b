#include "graphiht/objectives.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "graphiht/kernels.hpp"

namespace graphiht {

void Dataset::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("Dataset: need n >= 1 and p >= 1");
  if (a.size() != static_cast<std::size_t>(n) * p || y.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("Dataset: storage does not match n, p");
  if (kind == ObjectiveKind::Logistic)
    for (double t : y)
      if (t != 1.0 && t != -1.0)
        throw std::invalid_argument("Dataset: logistic targets must be +/-1");
}

namespace {

void check_x(const Dataset& d, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d.p)
    throw std::invalid_argument("objective: x length must equal p");
}

std::vector<int> all_rows(int n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

double loss(const Dataset& dataset, std::span<const double> x) {
  dataset.validate();
  check_x(dataset, x);
  if (dataset.kind == ObjectiveKind::LeastSquares) {
    const std::vector<int> rows = all_rows(dataset.n);
    std::vector<double> r(dataset.n);
    kernels::row_residuals(dataset.a, dataset.p, rows, x, dataset.y, r);
    return 0.5 * kernels::sum_of_squares(r) / dataset.n;
  }
  double acc = 0.0;
  for (int i = 0; i < dataset.n; ++i) {
    const double margin = dataset.y[i] * kernels::dot(dataset.row(i), x);
    // log(1+exp(-m)) computed stably for both signs of the margin.
    acc += margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  }
  return acc / dataset.n;
}

void grad_batch_into(const Dataset& dataset, std::span<const int> batch,
                     std::span<const double> x, GradientAccount& account,
                     std::span<double> out) {
  check_x(dataset, x);
  if (batch.empty()) throw std::invalid_argument("grad_batch: batch must be nonempty");
  for (int i : batch)
    if (i < 0 || i >= dataset.n)
      throw std::invalid_argument("grad_batch: sample index out of range");
  if (out.size() != x.size()) throw std::invalid_argument("grad_batch: bad output size");

  std::vector<double> r(batch.size());
  if (dataset.kind == ObjectiveKind::LeastSquares) {
    kernels::row_residuals(dataset.a, dataset.p, batch, x, dataset.y, r);
  } else {
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const int i = batch[k];
      const double margin = dataset.y[i] * kernels::dot(dataset.row(i), x);
      r[k] = -dataset.y[i] / (1.0 + std::exp(margin));
    }
  }
  kernels::accumulate_columns(dataset.a, dataset.p, batch, r,
                              1.0 / static_cast<double>(batch.size()), out);
  account.sample_gradients += batch.size();
}

std::vector<double> grad_batch(const Dataset& dataset, std::span<const int> batch,
                               std::span<const double> x, GradientAccount& account) {
  std::vector<double> g(dataset.p, 0.0);
  grad_batch_into(dataset, batch, x, account, g);
  return g;
}

double residual_norm(const Dataset& dataset, std::span<const double> x) {
  dataset.validate();
  check_x(dataset, x);
  if (dataset.kind != ObjectiveKind::LeastSquares)
    throw std::invalid_argument("residual_norm: defined for least squares only");
  const std::vector<int> rows = all_rows(dataset.n);
  std::vector<double> r(dataset.n);
  kernels::row_residuals(dataset.a, dataset.p, rows, x, dataset.y, r);
  return kernels::norm2(r);
}

double bregman(const Dataset& dataset, std::span<const double> x,
               std::span<const double> y_pt) {
  check_x(dataset, x);
  check_x(dataset, y_pt);
  GradientAccount scratch;
  const std::vector<int> rows = all_rows(dataset.n);
  const std::vector<double> g = grad_batch(dataset, rows, y_pt, scratch);
  double inner = 0.0;
  for (int j = 0; j < dataset.p; ++j) inner += g[j] * (x[j] - y_pt[j]);
  return loss(dataset, x) - loss(dataset, y_pt) - inner;
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty dataset file: " + path);
  Dataset d;
  {
    std::stringstream ss(header);
    std::string n_s, p_s, kind_s;
    if (!std::getline(ss, n_s, ',') || !std::getline(ss, p_s, ',') ||
        !std::getline(ss, kind_s))
      throw std::runtime_error("bad dataset header in " + path);
    d.n = std::stoi(n_s);
    d.p = std::stoi(p_s);
    if (kind_s == "least-squares")
      d.kind = ObjectiveKind::LeastSquares;
    else if (kind_s == "logistic")
      d.kind = ObjectiveKind::Logistic;
    else
      throw std::runtime_error("unknown objective kind '" + kind_s + "' in " + path);
  }
  d.a.reserve(static_cast<std::size_t>(d.n) * d.p);
  d.y.reserve(d.n);
  std::string line;
  for (int i = 0; i < d.n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("dataset file truncated: " + path);
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < d.p; ++j) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("short row in dataset file: " + path);
      d.a.push_back(std::stod(cell));
    }
    if (!std::getline(ss, cell))
      throw std::runtime_error("missing target in dataset file: " + path);
    d.y.push_back(std::stod(cell));
  }
  d.validate();
  return d;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  dataset.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out.precision(17);
  out << dataset.n << "," << dataset.p << ","
      << (dataset.kind == ObjectiveKind::LeastSquares ? "least-squares" : "logistic")
      << "\n";
  for (int i = 0; i < dataset.n; ++i) {
    for (int j = 0; j < dataset.p; ++j) out << dataset.a[static_cast<std::size_t>(i) * dataset.p + j] << ",";
    out << dataset.y[i] << "\n";
  }
}

}  // namespace graphiht
