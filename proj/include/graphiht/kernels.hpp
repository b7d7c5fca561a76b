#pragma once

// Dense row-major kernels behind the gradient oracles. Each has a serial
// reference implementation and an OpenMP variant. Parallelism is only over
// output elements: every element is accumulated serially in index order by
// exactly one thread, so the parallel results are bitwise identical to the
// serial ones for any thread count. Cross-element reductions (sums of
// squares, dot products) stay serial for the same reason.

#include <cstddef>
#include <span>
#include <vector>

namespace graphiht::kernels {

namespace serial {

// r[i] = dot(A.row(rows[i]), x) - y[rows[i]]
void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r);

// g[j] = scale * sum_i A[rows[i]][j] * r[i]
void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g);

}  // namespace serial

namespace par {

void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r);

void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g);

}  // namespace par

// Dispatchers: pick the OpenMP path when the work is large enough to pay
// for it. Safe because both paths produce identical bits.
void row_residuals(std::span<const double> a, int p, std::span<const int> rows,
                   std::span<const double> x, std::span<const double> y,
                   std::span<double> r);
void accumulate_columns(std::span<const double> a, int p, std::span<const int> rows,
                        std::span<const double> r, double scale, std::span<double> g);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double sum_of_squares(std::span<const double> v);

}  // namespace graphiht::kernels
