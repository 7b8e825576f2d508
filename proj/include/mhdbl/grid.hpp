#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace mhdbl {

using Complex = std::complex<double>;

class HalfLineGrid;
using GridPtr = std::shared_ptr<const HalfLineGrid>;

/// Graded half-line mesh [0, y_max] with trapezoid quadrature and
/// precomputed nonuniform finite-difference stencils.
///
/// Nodes follow a tanh stretching that places `layer_fraction` of them
/// inside [0, 10*sqrt(eps)]; when that window already covers the requested
/// fraction of the domain the mesh degenerates to uniform spacing.
/// Immutable after construction and shared read-only between solvers.
class HalfLineGrid {
 public:
  struct Stencil {
    std::size_t first = 0;               // index of leftmost node used
    int len = 0;                         // 3 or 4 points
    std::array<double, 4> c{};           // FD weights
  };

  static GridPtr build(double eps, double y_max, std::size_t node_count,
                       double layer_fraction);

  std::size_t size() const { return nodes_.size(); }
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

  double eps() const { return eps_; }
  double y_max() const { return y_max_; }
  double layer_fraction() const { return layer_fraction_; }
  double layer_width() const { return layer_width_; }
  std::size_t nodes_in_layer() const { return nodes_in_layer_; }

  const Stencil& d1(std::size_t i) const { return d1_[i]; }
  const Stencil& d2(std::size_t i) const { return d2_[i]; }

 private:
  HalfLineGrid() = default;

  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<Stencil> d1_, d2_;
  double eps_ = 0.0;
  double y_max_ = 0.0;
  double layer_fraction_ = 0.0;
  double layer_width_ = 0.0;
  std::size_t nodes_in_layer_ = 0;
};

/// Finite-difference weights for the m-th derivative at x0 from the node
/// set xs (Fornberg recursion; exact for polynomials up to degree len-1).
std::vector<double> fd_weights(double x0, std::span<const double> xs, int order);

/// One value per grid node; carries a handle to its grid.
template <class T>
class GridField {
 public:
  explicit GridField(GridPtr grid, T init = T{})
      : grid_(std::move(grid)), v_(grid_->size(), init) {}
  GridField(GridPtr grid, std::vector<T> values)
      : grid_(std::move(grid)), v_(std::move(values)) {
    if (v_.size() != grid_->size())
      throw std::invalid_argument("GridField: value count does not match grid");
  }

  std::size_t size() const { return v_.size(); }
  T& operator[](std::size_t i) { return v_[i]; }
  const T& operator[](std::size_t i) const { return v_[i]; }
  std::span<T> values() { return v_; }
  std::span<const T> values() const { return v_; }
  const GridPtr& grid() const { return grid_; }

  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

 private:
  GridPtr grid_;
  std::vector<T> v_;
};

using RealField = GridField<double>;
using ComplexField = GridField<Complex>;

enum class NormKind { L1, L2, Linf };

template <class T>
struct TailIntegral {
  GridField<T> value;
  bool tail_decayed = true;
  double tail_ratio = 0.0;  // |f(y_max)| / max|f|
};

namespace detail {
inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const Complex& x) { return std::abs(x); }
}  // namespace detail

/// Second-order nonuniform finite difference, one-sided at the endpoints.
template <class T>
GridField<T> derivative(const GridField<T>& f, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative: order must be 1 or 2");
  const auto& g = *f.grid();
  if (g.size() < 4) throw std::invalid_argument("derivative: grid too small");
  GridField<T> out(f.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& s = (order == 1) ? g.d1(i) : g.d2(i);
    T acc{};
    for (int k = 0; k < s.len; ++k) acc += s.c[k] * f[s.first + k];
    out[i] = acc;
  }
  return out;
}

/// Cumulative trapezoid antiderivative with value 0 at y = 0.
template <class T>
GridField<T> integrate_from_zero(const GridField<T>& f) {
  const auto& g = *f.grid();
  GridField<T> out(f.grid());
  out[0] = T{};
  for (std::size_t i = 1; i < g.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (g.node(i) - g.node(i - 1)) * (f[i] + f[i - 1]);
  return out;
}

/// Truncated tail antiderivative: -int_y^{y_max} f, zero at y_max.
/// The tail beyond y_max is treated as zero; a non-decayed tail is flagged.
template <class T>
TailIntegral<T> integrate_to_infinity(const GridField<T>& f, double tail_tol = 1e-8) {
  const auto& g = *f.grid();
  GridField<T> out(f.grid());
  const std::size_t m = g.size() - 1;
  out[m] = T{};
  for (std::size_t i = m; i-- > 0;)
    out[i] = out[i + 1] - 0.5 * (g.node(i + 1) - g.node(i)) * (f[i] + f[i + 1]);
  double fmax = 0.0;
  for (std::size_t i = 0; i <= m; ++i) fmax = std::max(fmax, detail::abs_of(f[i]));
  const double ratio = fmax > 0.0 ? detail::abs_of(f[m]) / fmax : 0.0;
  return TailIntegral<T>{std::move(out), ratio <= tail_tol, ratio};
}

template <class T>
double norm(const GridField<T>& f, NormKind kind) {
  const auto& g = *f.grid();
  double acc = 0.0;
  switch (kind) {
    case NormKind::L1:
      for (std::size_t i = 0; i < g.size(); ++i) acc += g.weight(i) * detail::abs_of(f[i]);
      return acc;
    case NormKind::L2:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = detail::abs_of(f[i]);
        acc += g.weight(i) * a * a;
      }
      return std::sqrt(acc);
    case NormKind::Linf:
      for (std::size_t i = 0; i < g.size(); ++i) acc = std::max(acc, detail::abs_of(f[i]));
      return acc;
  }
  return 0.0;
}

/// || w^{1/2} f ||_{L2}; the weight must be nonnegative on the grid.
template <class T>
double weighted_l2(const GridField<T>& f, const RealField& w) {
  const auto& g = *f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (w[i] < 0.0) throw std::invalid_argument("weighted_l2: negative weight");
    const double a = detail::abs_of(f[i]);
    acc += g.weight(i) * w[i] * a * a;
  }
  return std::sqrt(acc);
}

/// L2 inner product <f, g> = int f conj(g).
inline Complex inner(const ComplexField& f, const ComplexField& g) {
  const auto& gr = *f.grid();
  Complex acc{};
  for (std::size_t i = 0; i < gr.size(); ++i)
    acc += gr.weight(i) * f[i] * std::conj(g[i]);
  return acc;
}

inline double inner(const RealField& f, const RealField& g) {
  const auto& gr = *f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) acc += gr.weight(i) * f[i] * g[i];
  return acc;
}

}  // namespace mhdbl
