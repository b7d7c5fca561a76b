#include "graphiht/kernels.hpp"

#include <cmath>

namespace graphiht::kernels {

namespace serial {

void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r) {
  const std::size_t nb = rows.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const double* row = a.data() + static_cast<std::size_t>(rows[i]) * p;
    double acc = 0.0;
    for (int j = 0; j < p; ++j) acc += row[j] * x[j];
    r[i] = acc - y[rows[i]];
  }
}

void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g) {
  const std::size_t nb = rows.size();
  for (int j = 0; j < p; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      acc += a[static_cast<std::size_t>(rows[i]) * p + j] * r[i];
    }
    g[j] = scale * acc;
  }
}

}  // namespace serial

namespace par {

void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r) {
  const auto nb = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nb; ++i) {
    const double* row = a.data() + static_cast<std::size_t>(rows[i]) * p;
    double acc = 0.0;
    for (int j = 0; j < p; ++j) acc += row[j] * x[j];
    r[i] = acc - y[rows[i]];
  }
}

void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g) {
  const std::size_t nb = rows.size();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < p; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      acc += a[static_cast<std::size_t>(rows[i]) * p + j] * r[i];
    }
    g[j] = scale * acc;
  }
}

}  // namespace par

namespace {
// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelThreshold = 1u << 15;
}

void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r) {
  if (rows.size() * static_cast<std::size_t>(p) >= kParallelThreshold) {
    par::row_residuals(a, p, rows, x, y, r);
  } else {
    serial::row_residuals(a, p, rows, x, y, r);
  }
}

void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g) {
  if (rows.size() * static_cast<std::size_t>(p) >= kParallelThreshold) {
    par::accumulate_columns(a, p, rows, r, scale, g);
  } else {
    serial::accumulate_columns(a, p, rows, r, scale, g);
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum_of_squares(std::span<const double> v) {
  double acc = 0.0;
  for (double t : v) acc += t * t;
  return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(sum_of_squares(v)); }

}  // namespace graphiht::kernels
