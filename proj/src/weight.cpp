#include "mhdbl/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mhdbl {

namespace {

constexpr int kTabIntervals = 8192;

// 4-point Gauss-Legendre on [-1,1]
constexpr double kGx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                           0.8611363115940526};
constexpr double kGw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                           0.3478548451374538};

template <class F>
double gauss4(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += kGw[k] * f(c + hw * kGx[k]);
  return acc * hw;
}

double logw(double Z, double eta) {
  return std::pow(std::abs(std::log(std::max(Z, 1e-300))), 1.0 + eta / 3.0);
}

}  // namespace

WeightFunction::WeightFunction(const ShearProfile& p, GridPtr grid)
    : profile_(p), grid_(std::move(grid)), Z_(grid_), Zp_(grid_), Zpp_(grid_) {}

WeightFunction WeightFunction::build(const ShearProfile& p, GridPtr grid) {
  const double eps = grid->eps();
  const double rt = std::sqrt(eps);
  if (!(p.gamma_lo() > 0.0))
    throw WeightConstructionError("weight: profile violates (A2), 1/G_s unbounded");
  if (!(p.gamma0() > 0.0))
    throw WeightConstructionError("weight: profile violates (A4), G_s not positive");

  WeightFunction w(p, grid);
  w.eps_ = eps;
  w.mbar_ = p.mbar();

  auto gtilde_inner = [&p, rt](double y) { return 1.0 / p.gs(y / rt); };

  // Antiderivative table of Gtilde on [0,1].
  w.ztab_.resize(kTabIntervals + 1);
  w.ztab_h_ = 1.0 / kTabIntervals;
  w.ztab_[0] = 0.0;
  for (int j = 0; j < kTabIntervals; ++j)
    w.ztab_[j + 1] = w.ztab_[j] + gauss4(gtilde_inner, j * w.ztab_h_, (j + 1) * w.ztab_h_);
  w.z_at_1_ = w.ztab_[kTabIntervals];

  // Bridge on [1, 3/2]: cubic Hermite from (1, a, s1) to (3/2, b, 0), where b
  // sits at the midpoint of the admissible band. The band combines the value
  // constraint 1/(2 gamma_hi^2) <= Gtilde <= 2/gamma0 with the slope budget
  // |Gtilde'| = O(Mbar eps), which pins b to a + O(|s1|).
  const double ghi = p.gamma_hi();
  const double band_lo = 1.0 / (2.0 * ghi * ghi);
  const double band_hi = 2.0 / p.gamma0();
  const double a = gtilde_inner(1.0);
  const double Gs1 = p.gs(1.0 / rt);
  const double s1 = -p.gs_prime(1.0 / rt) / (rt * Gs1 * Gs1);
  const double half = 0.5;
  const double lo_b = std::max(band_lo, a - std::abs(s1) * half);
  const double hi_b = std::min(band_hi, a + std::abs(s1) * half);
  if (lo_b > hi_b)
    throw WeightConstructionError("weight: bridge value band is empty (pathological profile)");
  const double b = 0.5 * (lo_b + hi_b);
  w.bval_ = b;
  w.bridge_[0] = a;
  w.bridge_[1] = s1;
  w.bridge_[2] = (-3.0 * a - 2.0 * half * s1 + 3.0 * b) / (half * half);
  w.bridge_[3] = (2.0 * a + half * s1 - 2.0 * b) / (half * half * half);

  // Verify the bridge stays inside the band with an O(Mbar eps) slope.
  const double slope_cap =
      std::max({8.0 * w.mbar_ * eps, 8.0 * std::abs(s1), 1e-13 * std::max(1.0, a)});
  for (int j = 0; j <= 400; ++j) {
    const double s = half * j / 400.0;
    const double v = w.bridge_[0] + s * (w.bridge_[1] + s * (w.bridge_[2] + s * w.bridge_[3]));
    const double d = w.bridge_[1] + s * (2.0 * w.bridge_[2] + 3.0 * s * w.bridge_[3]);
    if (v < band_lo || v > band_hi)
      throw WeightConstructionError("weight: bridge leaves admissible value band");
    if (std::abs(d) > slope_cap)
      throw WeightConstructionError("weight: bridge slope exceeds O(Mbar*eps) budget");
  }

  const double s = half;
  w.z_at_32_ =
      w.z_at_1_ + s * (w.bridge_[0] + s * (w.bridge_[1] / 2 + s * (w.bridge_[2] / 3 + s * w.bridge_[3] / 4)));
  w.zbar_ = w.z_at_32_ + b / 4.0;

  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double y = grid->node(i);
    w.Z_[i] = w.z(y);
    w.Zp_[i] = w.zp(y);
    w.Zpp_[i] = w.zpp(y);
  }
  w.measure_c0();
  return w;
}

double WeightFunction::z_inner(double y) const {
  const int j = std::min(static_cast<int>(y / ztab_h_), kTabIntervals - 1);
  const double rt = std::sqrt(eps_);
  const auto f = [this, rt](double yy) { return 1.0 / profile_.gs(yy / rt); };
  return ztab_[j] + gauss4(f, j * ztab_h_, y);
}

double WeightFunction::z(double y) const {
  if (y <= 0.0) return 0.0;
  if (y <= 1.0) return z_inner(y);
  if (y <= 1.5) {
    const double s = y - 1.0;
    return z_at_1_ +
           s * (bridge_[0] + s * (bridge_[1] / 2 + s * (bridge_[2] / 3 + s * bridge_[3] / 4)));
  }
  if (y < 2.0) {
    const double t = 2.0 * (y - 1.5);
    return z_at_32_ + 0.5 * bval_ * (t - t * t * t + 0.5 * t * t * t * t);
  }
  return zbar_;
}

double WeightFunction::zp(double y) const {
  if (y < 0.0) return 0.0;
  if (y <= 1.0) return 1.0 / profile_.gs(y / std::sqrt(eps_));
  if (y <= 1.5) {
    const double s = y - 1.0;
    return bridge_[0] + s * (bridge_[1] + s * (bridge_[2] + s * bridge_[3]));
  }
  if (y < 2.0) {
    const double t = 2.0 * (y - 1.5);
    return bval_ * (1.0 - 3.0 * t * t + 2.0 * t * t * t);
  }
  return 0.0;
}

double WeightFunction::zpp(double y) const {
  if (y < 0.0) return 0.0;
  if (y <= 1.0) {
    const double rt = std::sqrt(eps_);
    const double G = profile_.gs(y / rt);
    return -profile_.gs_prime(y / rt) / (rt * G * G);
  }
  if (y <= 1.5) {
    const double s = y - 1.0;
    return bridge_[1] + s * (2.0 * bridge_[2] + 3.0 * s * bridge_[3]);
  }
  if (y < 2.0) {
    const double t = 2.0 * (y - 1.5);
    return 2.0 * bval_ * (-6.0 * t + 6.0 * t * t);
  }
  return 0.0;
}

void WeightFunction::measure_c0() {
  const double rt = std::sqrt(eps_);
  const double meps = mbar_ * eps_;
  double c = zbar_;  // Z <= C0
  const int nd = 20000;
  for (int i = 0; i <= nd; ++i) {
    const double y = 2.0 * i / nd;
    const double Zy = z(y), Zpy = zp(y), Zppy = zpp(y);
    if (y > 0.0) {
      c = std::max(c, y / Zy);
      c = std::max(c, Zy / y);
    } else {
      c = std::max(c, profile_.gs(0.0));
      c = std::max(c, 1.0 / profile_.gs(0.0));
    }
    c = std::max(c, (1.0 + y) * std::abs(Zpy));
    c = std::max(c, y * std::abs(Zppy) / (mbar_ + 1.0));
    if (y <= 1.5) {
      for (int k = 0; k <= 3; ++k) {
        const double lhs = std::pow(y, k) * std::abs(Zppy);
        const double scale = meps > 0.0 ? mbar_ * std::pow(eps_, 0.5 * (k - 1)) : 0.0;
        if (scale > 0.0)
          c = std::max(c, lhs / scale);
        else if (lhs > 1e-13)
          c = std::numeric_limits<double>::infinity();
      }
    }
    if (y >= 1.0) {
      const double d = profile_.gs_prime(y / rt) / rt * Zpy + profile_.gs(y / rt) * Zppy;
      if (d > 1e-13) {
        if (meps > 0.0)
          c = std::max(c, d / meps);
        else
          c = std::numeric_limits<double>::infinity();
      }
    }
  }
  c0_ = c;
}

LemmaZReport check_lemma_z(const WeightFunction& w) {
  LemmaZReport rep;
  const double eps = w.eps();
  const double rt = std::sqrt(eps);
  const double mbar = w.mbar();
  const double meps = mbar * eps;
  const auto& p = w.profile();
  const int nd = 20000;

  double sup_y_over_z = std::max(p.gs(0.0), 0.0);
  double sup_z_over_y = 1.0 / p.gs(0.0);
  double sup_1py_zp = 0.0, sup_y_zpp = 0.0;
  std::array<double, 4> sup_k{0.0, 0.0, 0.0, 0.0};
  double sup_gzp_growth = 0.0;     // max(0, (G_s Z')') for y >= 1
  double max_zpp_tail = -1e300;    // Z'' on [3/2, 2]
  double min_zp = 1e300;
  double max_gz_dev = 0.0;         // |G_s Z' - 1| on [0,1]
  for (int i = 0; i <= nd; ++i) {
    const double y = 2.0 * i / nd;
    const double Zy = w.z(y), Zpy = w.zp(y), Zppy = w.zpp(y);
    if (y > 0.0) {
      sup_y_over_z = std::max(sup_y_over_z, y / Zy);
      sup_z_over_y = std::max(sup_z_over_y, Zy / y);
    }
    sup_1py_zp = std::max(sup_1py_zp, (1.0 + y) * std::abs(Zpy));
    sup_y_zpp = std::max(sup_y_zpp, y * std::abs(Zppy));
    min_zp = std::min(min_zp, Zpy);
    if (y <= 1.0) max_gz_dev = std::max(max_gz_dev, std::abs(p.gs(y / rt) * Zpy - 1.0));
    if (y <= 1.5)
      for (int k = 0; k <= 3; ++k)
        sup_k[k] = std::max(sup_k[k], std::pow(y, k) * std::abs(Zppy));
    if (y >= 1.0) {
      const double d = p.gs_prime(y / rt) / rt * Zpy + p.gs(y / rt) * Zppy;
      sup_gzp_growth = std::max(sup_gzp_growth, d);
    }
    if (y >= 1.5) max_zpp_tail = std::max(max_zpp_tail, Zppy);
  }

  auto scaled = [&](double lhs, double scale) {
    if (scale > 0.0) return lhs / scale;
    return lhs > 1e-13 ? std::numeric_limits<double>::infinity() : 0.0;
  };

  std::vector<LemmaZItem> items;
  items.push_back({"Z_bounded: Z <= C0", w.zbar(), true});
  items.push_back({"Z_linear_lower: y/Z <= C0 on (0,2]", sup_y_over_z, true});
  items.push_back({"Z_linear_upper: Z/y <= C0 on (0,2]", sup_z_over_y, true});
  for (int k = 0; k <= 3; ++k)
    items.push_back({"Zpp_scaled_k" + std::to_string(k) +
                         ": |y^k Z''| <= C0 Mbar eps^{(k-1)/2} on [0,3/2]",
                     scaled(sup_k[k], meps > 0.0 ? mbar * std::pow(eps, 0.5 * (k - 1)) : 0.0),
                     true});
  items.push_back({"GsZp_decay: -(G_s Z')' >= -C0 Mbar eps for y >= 1",
                   scaled(sup_gzp_growth, meps), true});
  items.push_back({"Zp_decay_factor: |(1+y)Z'| <= C0", sup_1py_zp, true});
  items.push_back({"yZpp: |y Z''| <= C0 (Mbar+1)", sup_y_zpp / (mbar + 1.0), true});

  double c0 = 0.0;
  for (auto& it : items) {
    it.pass = std::isfinite(it.measured);
    c0 = std::max(c0, it.measured);
  }

  LemmaZItem mono{"Zp_nonneg: Z' >= 0", min_zp, min_zp >= -1e-13};
  LemmaZItem concave{"Zpp_tail: Z'' <= 0 for y >= 3/2", max_zpp_tail, max_zpp_tail <= 1e-13};
  LemmaZItem gz1{"GsZp_identity: G_s Z' == 1 on [0,1]", max_gz_dev, max_gz_dev <= 1e-12};
  items.push_back(mono);
  items.push_back(concave);
  items.push_back(gz1);

  rep.items = std::move(items);
  rep.c0 = c0;
  rep.all_pass = true;
  for (const auto& it : rep.items) rep.all_pass = rep.all_pass && it.pass;
  return rep;
}

double interpolation_check(const ComplexField& g, const WeightFunction& w) {
  const double ng = norm(g, NormKind::L2);
  if (ng == 0.0) return 0.0;
  const double wz = weighted_l2(g, w.z_field());
  const double dg = norm(derivative(g, 1), NormKind::L2);
  const double c0 = w.c0();
  const double denom = 2.0 * std::sqrt(2.0 * c0) * std::pow(wz, 2.0 / 3.0) * std::cbrt(dg) +
                       c0 * wz;
  return denom > 0.0 ? ng / denom : 0.0;
}

double weighted_hardy_check(const ComplexField& h, const WeightFunction& w, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("weighted_hardy_check: eta must be positive");
  const auto& g = *h.grid();
  const auto P = integrate_from_zero(h);
  double lhs2 = 0.0, rhs2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    if (y > 2.0) break;
    const double Z = w.z_field()[i];
    const double ah = std::abs(h[i]);
    rhs2 += g.weight(i) * Z * logw(Z, eta) * logw(Z, eta) * ah * ah;
    if (i == 0) continue;  // integrand vanishes at the wall
    const double aP = std::abs(P[i]);
    lhs2 += g.weight(i) * aP * aP / Z;
  }
  if (rhs2 == 0.0) return 0.0;
  return std::sqrt(lhs2 / rhs2);
}

double log_weight_bound_check(const ComplexField& h, const WeightFunction& w, double eta,
                              double delta) {
  if (!(eta > 0.0)) throw std::invalid_argument("log_weight_bound_check: eta must be positive");
  if (delta < 0.0) throw std::invalid_argument("log_weight_bound_check: delta must be >= 0");
  const auto& g = *h.grid();
  double lhs2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Z = w.z_field()[i];
    const double ah = std::abs(h[i]);
    lhs2 += g.weight(i) * Z * logw(Z, eta) * logw(Z, eta) * ah * ah;
  }
  const double zh = weighted_l2(h, w.z_field());
  const double nh = norm(h, NormKind::L2);
  if (nh == 0.0) return 0.0;
  const double eps = w.eps();
  const double rhs = std::pow(std::abs(std::log(eps)), 1.0 + eta / 3.0) *
                     (zh + std::pow(eps, 0.25 + delta) * nh);
  return rhs > 0.0 ? std::sqrt(lhs2) / rhs : 0.0;
}

}  // namespace mhdbl
