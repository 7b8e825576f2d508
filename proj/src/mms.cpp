#include "mhdbl/mms.hpp"

#include <cmath>

namespace mhdbl {

namespace {
constexpr Complex kI{0.0, 1.0};

// P(y) exp(-y^2/2) with exact differentiation: (P G)' = (P' - y P) G.
struct PolyGauss {
  std::vector<double> c;  // P(y) = sum c_k y^k

  double operator()(double y) const {
    double p = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) p = p * y + c[k];
    return p * std::exp(-0.5 * y * y);
  }
  PolyGauss deriv() const {
    std::vector<double> d(c.size() + 1, 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] += k * c[k];
    for (std::size_t k = 0; k < c.size(); ++k) d[k + 1] -= c[k];
    return PolyGauss{d};
  }
};

}  // namespace

ManufacturedMode manufactured_mode(int n, const LinearContext& ctx) {
  const auto gr = ctx.grid;
  const auto& g = *gr;
  const double rt = std::sqrt(ctx.eps);
  const double nt = ctx.ntilde(n);
  const double k2 = nt * nt;

  // phi = y^2 G (no-slip), psi odd in y (psi(0) = psi''(0) = 0), p ~ y^2 G.
  const PolyGauss phi{{0.0, 0.0, 1.0}};
  const PolyGauss psi{{0.0, 1.0, 0.0, 0.3}};
  const PolyGauss pp{{0.0, 0.0, 0.8}};
  const Complex cu{0.7, 0.2}, ch{0.5, -0.35}, cp{0.3, 0.15};

  const auto phi1 = phi.deriv(), phi2 = phi1.deriv(), phi3 = phi2.deriv();
  const auto psi1 = psi.deriv(), psi2 = psi1.deriv(), psi3 = psi2.deriv();
  const auto pp1 = pp.deriv();

  ManufacturedMode mm(n, ctx.rho, gr);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    const double Y = y / rt;
    const double Us = ctx.profile->us(Y), Hs = ctx.profile->hs(Y);
    const double dUs = ctx.profile->us(Y, 1) / rt, dHs = ctx.profile->hs(Y, 1) / rt;

    const Complex u = cu * phi1(y);
    const Complex v = -kI * nt * cu * phi(y);
    const Complex h = ch * psi1(y);
    const Complex gg = -kI * nt * ch * psi(y);
    const Complex p = cp * pp(y);
    const Complex u2 = cu * phi3(y);
    const Complex v2 = -kI * nt * cu * phi2(y);
    const Complex h2 = ch * psi3(y);
    const Complex g2 = -kI * nt * ch * psi2(y);
    const Complex p1 = cp * pp1(y);

    mm.u[i] = u;
    mm.v[i] = v;
    mm.h[i] = h;
    mm.g[i] = gg;
    mm.p[i] = p;
    mm.forcing.f1[i] = kI * nt * Us * u + v * dUs - kI * nt * Hs * h - gg * dHs +
                       kI * nt * p - ctx.mu * ctx.eps * (u2 - k2 * u);
    mm.forcing.f2[i] = kI * nt * Us * v - kI * nt * Hs * gg + p1 -
                       ctx.mu * ctx.eps * (v2 - k2 * v);
    mm.forcing.q1[i] = kI * nt * Us * h + v * dHs - kI * nt * Hs * u - gg * dUs -
                       ctx.kappa * ctx.eps * (h2 - k2 * h);
    mm.forcing.q2[i] = kI * nt * Us * gg - kI * nt * Hs * v -
                       ctx.kappa * ctx.eps * (g2 - k2 * gg);
  }
  return mm;
}

MmsError mms_error(const ModeSolution& ms, const ManufacturedMode& ex) {
  auto rel = [](const ComplexField& got, const ComplexField& want) {
    ComplexField d(got.grid());
    for (std::size_t i = 0; i < got.size(); ++i) d[i] = got[i] - want[i];
    const double nw = norm(want, NormKind::L2);
    return nw > 0.0 ? norm(d, NormKind::L2) / nw : norm(d, NormKind::L2);
  };
  MmsError e;
  e.u = rel(ms.u, ex.u);
  e.v = rel(ms.v, ex.v);
  e.h = rel(ms.h, ex.h);
  e.g = rel(ms.g, ex.g);
  e.max_error = std::max({e.u, e.v, e.h, e.g});
  return e;
}

}  // namespace mhdbl
