#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "graphiht/objectives.hpp"
#include "graphiht/rng.hpp"

using namespace graphiht;

namespace {

Dataset random_ls(int n, int p, std::uint64_t seed) {
  Dataset d;
  d.n = n;
  d.p = p;
  d.kind = ObjectiveKind::LeastSquares;
  Rng rng(seed);
  d.a.resize(static_cast<std::size_t>(n) * p);
  for (auto& t : d.a) t = rng.gaussian();
  d.y.resize(n);
  for (auto& t : d.y) t = rng.gaussian();
  return d;
}

std::vector<int> all_rows(int n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

TEST_CASE("loss values") {
  Dataset d;
  d.n = 2;
  d.p = 2;
  d.a = {1, 0, 0, 1};
  d.y = {1, 1};
  d.kind = ObjectiveKind::LeastSquares;
  std::vector<double> zero{0, 0};
  CHECK(loss(d, zero) == doctest::Approx(0.5));

  std::vector<double> exact{1, 1};
  CHECK(loss(d, exact) == 0.0);

  d.kind = ObjectiveKind::Logistic;
  d.y = {1, -1};
  CHECK(loss(d, zero) == doctest::Approx(std::log(2.0)));

  std::vector<double> bad{1.0};
  CHECK_THROWS_AS(loss(d, bad), std::invalid_argument);
}

TEST_CASE("gradients") {
  SUBCASE("single sample closed form") {
    Dataset d;
    d.n = 1;
    d.p = 2;
    d.a = {1, 0};
    d.y = {0};
    d.kind = ObjectiveKind::LeastSquares;
    GradientAccount acc;
    std::vector<double> x{2, 5};
    const std::vector<int> batch{0};
    const auto g = grad_batch(d, batch, x, acc);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(acc.sample_gradients == 1);
  }

  SUBCASE("empty batch and bad index") {
    const Dataset d = random_ls(4, 3, 1);
    GradientAccount acc;
    std::vector<double> x(3, 0.0);
    CHECK_THROWS_AS(grad_batch(d, {}, x, acc), std::invalid_argument);
    const std::vector<int> bad{4};
    CHECK_THROWS_AS(grad_batch(d, bad, x, acc), std::invalid_argument);
  }

  SUBCASE("finite differences, both objectives") {
    for (auto kind : {ObjectiveKind::LeastSquares, ObjectiveKind::Logistic}) {
      Dataset d = random_ls(6, 5, 7);
      if (kind == ObjectiveKind::Logistic) {
        d.kind = kind;
        for (auto& t : d.y) t = t > 0 ? 1.0 : -1.0;
      }
      Rng rng(8);
      std::vector<double> x(5);
      for (auto& t : x) t = rng.gaussian();
      GradientAccount acc;
      const auto g = grad_batch(d, all_rows(d.n), x, acc);
      const double h = 1e-6;
      for (int j = 0; j < d.p; ++j) {
        std::vector<double> xp(x), xm(x);
        xp[j] += h;
        xm[j] -= h;
        const double fd = (loss(d, xp) - loss(d, xm)) / (2 * h);
        CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }

  SUBCASE("unbiasedness by exhaustive enumeration") {
    const Dataset d = random_ls(10, 4, 9);
    Rng rng(10);
    std::vector<double> x(4);
    for (auto& t : x) t = rng.gaussian();
    GradientAccount acc;
    const auto full = grad_batch(d, all_rows(d.n), x, acc);
    std::vector<double> mean(4, 0.0);
    for (int i = 0; i < d.n; ++i) {
      const std::vector<int> single{i};
      const auto gi = grad_batch(d, single, x, acc);
      for (int j = 0; j < 4; ++j) mean[j] += gi[j] / d.n;
    }
    for (int j = 0; j < 4; ++j) CHECK(std::abs(mean[j] - full[j]) < 1e-12);
    CHECK(acc.sample_gradients == 20);  // n for the full call, n over singles
  }
}

TEST_CASE("residual norm") {
  Dataset d = random_ls(5, 3, 11);
  std::vector<double> zero(3, 0.0);
  double ynorm = 0.0;
  for (double t : d.y) ynorm += t * t;
  CHECK(residual_norm(d, zero) == doctest::Approx(std::sqrt(ynorm)));

  Rng rng(12);
  std::vector<double> x(3);
  for (auto& t : x) t = rng.gaussian();
  CHECK(residual_norm(d, x) ==
        doctest::Approx(std::sqrt(2.0 * d.n * loss(d, x))).epsilon(1e-12));

  d.kind = ObjectiveKind::Logistic;
  for (auto& t : d.y) t = 1.0;
  CHECK_THROWS_AS(residual_norm(d, x), std::invalid_argument);
}

TEST_CASE("bregman divergence") {
  const Dataset d = random_ls(6, 4, 13);
  Rng rng(14);
  std::vector<double> x(4), y(4);
  for (auto& t : x) t = rng.gaussian();
  for (auto& t : y) t = rng.gaussian();

  CHECK(bregman(d, x, x) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bregman(d, x, y) >= -1e-12);  // convexity

  // exact quadratic identity for least squares
  std::vector<double> diff(4);
  for (int j = 0; j < 4; ++j) diff[j] = x[j] - y[j];
  double quad = 0.0;
  for (int i = 0; i < d.n; ++i) {
    double dot = 0.0;
    for (int j = 0; j < 4; ++j) dot += d.a[static_cast<std::size_t>(i) * 4 + j] * diff[j];
    quad += dot * dot;
  }
  CHECK(bregman(d, x, y) == doctest::Approx(0.5 * quad / d.n).epsilon(1e-12));
}

TEST_CASE("dataset csv round trip") {
  namespace fs = std::filesystem;
  const Dataset d = random_ls(4, 3, 15);
  const std::string path = (fs::temp_directory_path() / "graphiht_data.csv").string();
  save_dataset_csv(d, path);
  const Dataset back = load_dataset_csv(path);
  CHECK(back.n == d.n);
  CHECK(back.p == d.p);
  CHECK(back.kind == d.kind);
  CHECK(back.a == d.a);
  CHECK(back.y == d.y);
  fs::remove(path);
}
