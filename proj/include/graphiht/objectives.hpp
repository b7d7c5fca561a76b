#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace graphiht {

enum class ObjectiveKind { LeastSquares, Logistic };

// Dense design matrix with one target per row. Immutable once built.
struct Dataset {
  int n = 0;
  int p = 0;
  std::vector<double> a;  // row-major n x p
  std::vector<double> y;  // length n
  ObjectiveKind kind = ObjectiveKind::LeastSquares;

  void validate() const;
  std::span<const double> row(int i) const {
    return {a.data() + static_cast<std::size_t>(i) * p, static_cast<std::size_t>(p)};
  }
};

// Counts per-sample gradient evaluations; one epoch equals n of them.
struct GradientAccount {
  std::uint64_t sample_gradients = 0;
};

// Least squares: (1/2n)||Ax - y||^2. Logistic: mean log(1 + exp(-y a'x)).
double loss(const Dataset& dataset, std::span<const double> x);

// Mean per-sample gradient over the batch; bumps the account by |batch|.
std::vector<double> grad_batch(const Dataset& dataset, std::span<const int> batch,
                               std::span<const double> x, GradientAccount& account);
void grad_batch_into(const Dataset& dataset, std::span<const int> batch,
                     std::span<const double> x, GradientAccount& account,
                     std::span<double> out);

// ||Ax - y||, the plotted convergence measure. Least squares only.
double residual_norm(const Dataset& dataset, std::span<const double> x);

// F(x) - F(y) - <grad F(y), x - y>
double bregman(const Dataset& dataset, std::span<const double> x,
               std::span<const double> y_pt);

// CSV with header "n,p,kind"; each row is p features then the target.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace graphiht
