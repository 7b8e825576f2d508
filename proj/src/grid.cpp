#include "mhdbl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mhdbl {

std::vector<double> fd_weights(double x0, std::span<const double> xs, int order) {
  // Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(xs.size());
  const int m = order;
  std::vector<double> c(static_cast<std::size_t>(n) * (m + 1), 0.0);
  auto C = [&](int i, int k) -> double& { return c[static_cast<std::size_t>(i) * (m + 1) + k]; };

  double c1 = 1.0;
  double c4 = xs[0] - x0;
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = C(i, m);
  return w;
}

namespace {

// Stretching ratio tanh(s(1-l)) / tanh(s), increasing in s from (1-l) to 1.
double stretch_ratio(double s, double l) { return std::tanh(s * (1.0 - l)) / std::tanh(s); }

HalfLineGrid::Stencil make_stencil(const std::vector<double>& y, std::size_t i,
                                   std::size_t first, int len, int order) {
  HalfLineGrid::Stencil s;
  s.first = first;
  s.len = len;
  auto w = fd_weights(y[i], std::span<const double>(y.data() + first, len), order);
  for (int k = 0; k < len; ++k) s.c[k] = w[k];
  return s;
}

}  // namespace

GridPtr HalfLineGrid::build(double eps, double y_max, std::size_t node_count,
                            double layer_fraction) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_grid: eps must be positive");
  if (!(y_max > 0.0)) throw std::invalid_argument("build_grid: y_max must be positive");
  if (y_max < 10.0) throw std::invalid_argument("build_grid: y_max must be >= 10");
  if (node_count < 64) throw std::invalid_argument("build_grid: need at least 64 nodes");
  if (!(layer_fraction >= 0.0 && layer_fraction <= 1.0))
    throw std::invalid_argument("build_grid: layer_fraction must lie in [0,1]");

  const std::size_t n = node_count;
  const double L = std::min(10.0 * std::sqrt(eps), y_max);
  std::vector<double> y(n);

  const double target = 1.0 - L / y_max;
  if (layer_fraction <= 0.0 || target <= 1.0 - layer_fraction + 1e-12) {
    // Layer window already holds the requested node share: uniform mesh.
    for (std::size_t i = 0; i < n; ++i)
      y[i] = y_max * static_cast<double>(i) / static_cast<double>(n - 1);
  } else {
    double lo = 1e-6, hi = 60.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (stretch_ratio(mid, layer_fraction) < target ? lo : hi) = mid;
    }
    const double sigma = 0.5 * (lo + hi);
    const double th = std::tanh(sigma);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      y[i] = y_max * (1.0 + std::tanh(sigma * (t - 1.0)) / th);
    }
  }
  y[0] = 0.0;
  y[n - 1] = y_max;

  auto grid = std::shared_ptr<HalfLineGrid>(new HalfLineGrid());
  grid->eps_ = eps;
  grid->y_max_ = y_max;
  grid->layer_fraction_ = layer_fraction;
  grid->layer_width_ = L;
  grid->nodes_ = std::move(y);
  const auto& yn = grid->nodes_;

  grid->nodes_in_layer_ =
      static_cast<std::size_t>(std::upper_bound(yn.begin(), yn.end(), L * (1.0 + 1e-12)) - yn.begin());
  if (grid->nodes_in_layer_ < 32)
    throw std::invalid_argument("build_grid: fewer than 32 nodes resolve the boundary layer");

  grid->weights_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = yn[i + 1] - yn[i];
    grid->weights_[i] += 0.5 * h;
    grid->weights_[i + 1] += 0.5 * h;
  }

  grid->d1_.resize(n);
  grid->d2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      grid->d1_[i] = make_stencil(yn, i, 0, 3, 1);
      grid->d2_[i] = make_stencil(yn, i, 0, 4, 2);
    } else if (i == n - 1) {
      grid->d1_[i] = make_stencil(yn, i, n - 3, 3, 1);
      grid->d2_[i] = make_stencil(yn, i, n - 4, 4, 2);
    } else {
      grid->d1_[i] = make_stencil(yn, i, i - 1, 3, 1);
      grid->d2_[i] = make_stencil(yn, i, i - 1, 3, 2);
    }
  }
  return grid;
}

}  // namespace mhdbl
