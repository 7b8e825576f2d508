#include "mhdbl/norms.hpp"

#include <cmath>
#include <numbers>

namespace mhdbl {

namespace {
constexpr Complex kI{0.0, 1.0};

double sq(double x) { return x * x; }

// <a, b> with a real pointwise factor applied to the first slot.
Complex winner(const ComplexField& a, const ComplexField& b, const RealField& wgt) {
  const auto& g = *a.grid();
  Complex acc{};
  for (std::size_t i = 0; i < g.size(); ++i)
    acc += g.weight(i) * wgt[i] * a[i] * std::conj(b[i]);
  return acc;
}

}  // namespace

SpectralState::SpectralState(GridPtr g, int nmax, double rho_)
    : u0(g), h0(g), rho(rho_) {
  modes.reserve(nmax);
  for (int n = 1; n <= nmax; ++n) modes.emplace_back(g);
}

SpectralState to_state(const LinearField& lf, GridPtr g, int nmax, double rho) {
  SpectralState s(g, nmax, rho);
  if (lf.zero) {
    s.u0 = lf.zero->u0;
    s.h0 = lf.zero->h0;
  }
  for (const auto& [n, ms] : lf.modes) {
    if (n < 1 || n > nmax) continue;
    auto& m = s.modes[n - 1];
    m.u = ms.u;
    m.v = ms.v;
    m.h = ms.h;
    m.g = ms.g;
  }
  return s;
}

XNormReport x_norm(const SpectralState& s, const WeightFunction& w, double eps) {
  XNormReport r;
  const auto g = s.grid();
  const auto& Z = w.z_field();
  const double circ = 2.0 * std::numbers::pi * s.rho;
  const double e14 = std::pow(eps, 0.25);

  // zero mode
  double sup0 = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    sup0 = std::max(sup0, std::sqrt(sq(s.u0[i]) + sq(s.h0[i])));
  const auto du0 = derivative(s.u0, 1);
  const auto dh0 = derivative(s.h0, 1);
  const double grad0 = std::sqrt(sq(norm(du0, NormKind::L2)) + sq(norm(dh0, NormKind::L2)));
  const double zgrad0 = std::sqrt(sq(weighted_l2(du0, Z)) + sq(weighted_l2(dh0, Z)));
  r.zero_grad = e14 * grad0;
  r.zero_zgrad = zgrad0;

  double sup_sum = sup0;
  double l2 = 0.0, zl2 = 0.0, grad = 0.0, zgrad = 0.0;
  double last_sup = 0.0;
  for (int n = 1; n <= s.nmax(); ++n) {
    const auto& m = s.modes[n - 1];
    const double nt = static_cast<double>(n) / s.rho;
    double supn = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i)
      supn = std::max(supn, std::sqrt(std::norm(m.u[i]) + std::norm(m.v[i]) +
                                      std::norm(m.h[i]) + std::norm(m.g[i])));
    sup_sum += 2.0 * supn;  // modes n and -n
    last_sup = 2.0 * supn;

    const double l2n = sq(norm(m.u, NormKind::L2)) + sq(norm(m.v, NormKind::L2)) +
                       sq(norm(m.h, NormKind::L2)) + sq(norm(m.g, NormKind::L2));
    const double zl2n = sq(weighted_l2(m.u, Z)) + sq(weighted_l2(m.v, Z)) +
                        sq(weighted_l2(m.h, Z)) + sq(weighted_l2(m.g, Z));
    const auto du = derivative(m.u, 1), dv = derivative(m.v, 1), dh = derivative(m.h, 1),
               dg = derivative(m.g, 1);
    const double gradn = sq(norm(du, NormKind::L2)) + sq(norm(dv, NormKind::L2)) +
                         sq(norm(dh, NormKind::L2)) + sq(norm(dg, NormKind::L2)) +
                         nt * nt * l2n;
    const double zgradn = sq(weighted_l2(du, Z)) + sq(weighted_l2(dv, Z)) +
                          sq(weighted_l2(dh, Z)) + sq(weighted_l2(dg, Z)) + nt * nt * zl2n;
    l2 += 2.0 * l2n;
    zl2 += 2.0 * zl2n;
    grad += 2.0 * gradn;
    zgrad += 2.0 * zgradn;
  }
  r.mode_sup_sum = sup_sum;
  r.tail_truncation = sup_sum > 0.0 ? last_sup / sup_sum : 0.0;
  r.q0_l2 = std::pow(eps, -0.25) * std::sqrt(circ * l2);
  r.q0_zl2 = std::pow(eps, -0.5) * std::sqrt(circ * zl2);
  r.q0_grad = e14 * std::sqrt(circ * grad);
  r.q0_zgrad = std::sqrt(circ * zgrad);
  r.total = r.mode_sup_sum + r.zero_grad + r.zero_zgrad + r.q0_l2 + r.q0_zl2 + r.q0_grad +
            r.q0_zgrad;
  return r;
}

EnergyIdentityReport energy_identity_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                           const TransformedSource& src,
                                           const ComplexField& pressure, const ShearProfile& p,
                                           double eps, double mu, double kappa) {
  const auto grid = gu.uh.grid();
  const auto& g = *grid;
  const double rt = std::sqrt(eps);
  const double nt = static_cast<double>(gu.n) / gu.rho;
  const double k2 = nt * nt;

  RealField Gs(grid), dGs(grid), Bp(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    Gs[i] = p.gs(Y);
    dGs[i] = p.gs_prime(Y);  // d/dY
    Bp[i] = p.bp(Y);
  }

  const auto duh = derivative(gu.uh, 1), dvh = derivative(gu.vh, 1);
  const auto dhh = derivative(gu.hh, 1), dgh = derivative(gu.gh, 1);
  const auto dp = derivative(pressure, 1);

  const double t1 = mu * eps *
                    (sq(norm(duh, NormKind::L2)) + sq(norm(dvh, NormKind::L2)) +
                     k2 * (sq(norm(gu.uh, NormKind::L2)) + sq(norm(gu.vh, NormKind::L2))));
  const double t2 =
      kappa * eps *
      (std::real(winner(dhh, dhh, Gs)) + std::real(winner(dgh, dgh, Gs)) +
       k2 * (std::real(winner(gu.hh, gu.hh, Gs)) + std::real(winner(gu.gh, gu.gh, Gs))));
  const double t3 = kappa * rt *
                    (std::real(winner(dhh, gu.hh, dGs)) + std::real(winner(dgh, gu.gh, dGs)));

  ComplexField lu1(grid), lu2(grid), lh1(grid), lh2(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    lu1[i] = kI * nt * rt * cf.A12[i] * gu.gh[i] + rt * cf.B11[i] * dhh[i] +
             cf.CU11[i] * gu.hh[i] + gu.psih[i] * cf.DU1[i] / rt;
    lu2[i] = rt * cf.B22[i] * dgh[i] + cf.CU22[i] * gu.gh[i];
    lh1[i] = -2.0 * kappa * rt * Bp[i] * dhh[i] + cf.CH11[i] * gu.hh[i] +
             gu.psih[i] * cf.DH1[i] / rt;
    lh2[i] = -2.0 * kappa * rt * Bp[i] * dgh[i] + cf.CH22[i] * gu.gh[i];
  }
  const double t4 = std::real(inner(lu1, gu.uh)) + std::real(inner(lu2, gu.vh));
  const double t5 = std::real(winner(lh1, gu.hh, Gs)) + std::real(winner(lh2, gu.gh, Gs));

  ComplexField pr1(grid);
  for (std::size_t i = 0; i < g.size(); ++i) pr1[i] = kI * nt * pressure[i];
  const double t6 = std::real(inner(pr1, gu.uh)) + std::real(inner(dp, gu.vh));

  const double b = std::real(inner(src.Ru1, gu.uh)) + std::real(inner(src.Ru2, gu.vh)) +
                   std::real(winner(src.Rh1, gu.hh, Gs)) +
                   std::real(winner(src.Rh2, gu.gh, Gs));

  EnergyIdentityReport rep;
  const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) +
                       std::abs(t5) + std::abs(t6) + std::abs(b) + 1e-300;
  rep.defect = std::abs(t1 + t2 + t3 + t4 + t5 + t6 - b) / scale;
  rep.pressure_term = std::abs(t6) / scale;
  return rep;
}

double velocity_multiplier_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                 const TransformedSource& src, const ShearProfile& p,
                                 double eps, double mu, double kappa) {
  (void)mu;
  const auto grid = gu.uh.grid();
  const auto& g = *grid;
  const double rt = std::sqrt(eps);
  const double nt = static_cast<double>(gu.n) / gu.rho;
  const double k2 = nt * nt;

  const auto d2h = derivative(gu.hh, 2), d2g = derivative(gu.gh, 2);
  const auto dhh = derivative(gu.hh, 1), dgh = derivative(gu.gh, 1);

  const Complex a1 = kI * nt *
                     (sq(norm(gu.uh, NormKind::L2)) + sq(norm(gu.vh, NormKind::L2)));
  ComplexField laph(grid), lapg(grid), low1(grid), low2(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double bp = p.bp(Y);
    laph[i] = kappa * eps * (d2h[i] - k2 * gu.hh[i]);
    lapg[i] = kappa * eps * (d2g[i] - k2 * gu.gh[i]);
    low1[i] = 2.0 * kappa * rt * bp * dhh[i] - cf.CH11[i] * gu.hh[i] -
              gu.psih[i] * cf.DH1[i] / rt;
    low2[i] = 2.0 * kappa * rt * bp * dgh[i] - cf.CH22[i] * gu.gh[i];
  }
  const Complex a2 = inner(laph, gu.uh) + inner(lapg, gu.vh);
  const Complex a3 = inner(low1, gu.uh) + inner(low2, gu.vh);
  const Complex a4 = inner(src.Rh1, gu.uh) + inner(src.Rh2, gu.vh);

  const double scale =
      std::abs(a1) + std::abs(a2) + std::abs(a3) + std::abs(a4) + 1e-300;
  return std::abs(a1 + a2 + a3 + a4) / scale;
}

double weighted_multiplier_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                 const TransformedSource& src, const WeightFunction& w,
                                 const ShearProfile& p, double eps, double mu, double kappa) {
  const auto grid = gu.uh.grid();
  const auto& g = *grid;
  const double rt = std::sqrt(eps);
  const double nt = static_cast<double>(gu.n) / gu.rho;
  const double k2 = nt * nt;
  const double sgn = nt >= 0.0 ? 1.0 : -1.0;
  const double mk = (mu + kappa) / kappa;
  const auto& Z = w.z_field();

  RealField Gs(grid), dGs_dy(grid), Us(grid), dUs_dy(grid), apdH(grid), Bp(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    Gs[i] = p.gs(Y);
    dGs_dy[i] = p.gs_prime(Y) / rt;
    Us[i] = p.us(Y);
    dUs_dy[i] = p.us(Y, 1) / rt;
    apdH[i] = p.ap(Y) * p.hs(Y, 1);
    Bp[i] = p.bp(Y);
  }

  const auto dhh = derivative(gu.hh, 1), dgh = derivative(gu.gh, 1);
  const auto d2h = derivative(gu.hh, 2), d2g = derivative(gu.gh, 2);

  ComplexField zpsih(grid), zphih(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    zpsih[i] = Z[i] * gu.psih[i];
    zphih[i] = Z[i] * gu.phih[i];
  }

  // I1: -i nt curl(G_s H-hat) against Z psih / mu; -i nt omega_u against Z phih / kappa
  ComplexField curlGH(grid);
  for (std::size_t i = 0; i < g.size(); ++i)
    curlGH[i] = dGs_dy[i] * gu.hh[i] + Gs[i] * dhh[i] - kI * nt * Gs[i] * gu.gh[i];
  const double i1 = std::imag(sgn * (inner(curlGH, zpsih) * (-kI * nt) / mu +
                                     inner(gu.omega_u, zphih) * (-kI * nt) / kappa));

  // I2: diffusion of both vorticities
  const auto d2ou = derivative(gu.omega_u, 2);
  const auto d2oh = derivative(gu.omega_h, 2);
  ComplexField du_lap(grid), dh_lap(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    du_lap[i] = d2ou[i] - k2 * gu.omega_u[i];
    dh_lap[i] = d2oh[i] - k2 * gu.omega_h[i];
  }
  const double i2 = std::imag(sgn * (-eps) * (inner(du_lap, zpsih) + inner(dh_lap, zphih)));

  // I3: -eps (kappa+mu) curl(U_s (D^2 - nt^2) H-hat) against Z psih / mu
  ComplexField lapH1(grid);
  for (std::size_t i = 0; i < g.size(); ++i) lapH1[i] = d2h[i] - k2 * gu.hh[i];
  const auto dlapH1 = derivative(lapH1, 1);
  ComplexField curlUlap(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex lap2 = d2g[i] - k2 * gu.gh[i];
    curlUlap[i] = dUs_dy[i] * lapH1[i] + Us[i] * dlapH1[i] - kI * nt * Us[i] * lap2;
  }
  const double i3 =
      std::imag(sgn * (-eps) * (kappa + mu) / mu * inner(curlUlap, zpsih));

  // I4: sources (with the lower-order terms folded in)
  ComplexField ru1(grid), ru2(grid), rh1(grid), rh2(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    ru1[i] = src.Ru1[i] + mk * Us[i] * src.Rh1[i] - kI * nt * rt * cf.A12[i] * gu.gh[i] -
             rt * (cf.B11[i] - 2.0 * (kappa + mu) * apdH[i]) * dhh[i] -
             (cf.CU11[i] + mk * Us[i] * cf.CH11[i]) * gu.hh[i] -
             gu.psih[i] * (cf.DU1[i] + mk * Us[i] * cf.DH1[i]) / rt;
    ru2[i] = src.Ru2[i] + mk * Us[i] * src.Rh2[i] -
             rt * (cf.B22[i] - 2.0 * (kappa + mu) * apdH[i]) * dgh[i] -
             (cf.CU22[i] + mk * Us[i] * cf.CH22[i]) * gu.gh[i];
    rh1[i] = src.Rh1[i] + 2.0 * kappa * rt * Bp[i] * dhh[i] - cf.CH11[i] * gu.hh[i] -
             gu.psih[i] * cf.DH1[i] / rt;
    rh2[i] = src.Rh2[i] + 2.0 * kappa * rt * Bp[i] * dgh[i] - cf.CH22[i] * gu.gh[i];
  }
  const auto dru1 = derivative(ru1, 1);
  const auto drh1 = derivative(rh1, 1);
  ComplexField curlRu(grid), curlRh(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    curlRu[i] = dru1[i] - kI * nt * ru2[i];
    curlRh[i] = drh1[i] - kI * nt * rh2[i];
  }
  const double i4 =
      -std::imag(sgn * (inner(curlRu, zpsih) / mu + inner(curlRh, zphih) / kappa));

  const double scale = std::abs(i1) + std::abs(i2) + std::abs(i3) + std::abs(i4) + 1e-300;
  return std::abs(i1 + i2 + i3 + i4) / scale;
}

namespace {

struct GoodNorms {
  double w_l2, w_zl2, dw_l2, dw_zl2, u_l2;
};

GoodNorms good_norms(const GoodUnknowns& gu, const RealField& Z) {
  const auto duh = derivative(gu.uh, 1), dvh = derivative(gu.vh, 1);
  const auto dhh = derivative(gu.hh, 1), dgh = derivative(gu.gh, 1);
  GoodNorms n;
  n.w_l2 = std::sqrt(sq(norm(gu.uh, NormKind::L2)) + sq(norm(gu.vh, NormKind::L2)) +
                     sq(norm(gu.hh, NormKind::L2)) + sq(norm(gu.gh, NormKind::L2)));
  n.w_zl2 = std::sqrt(sq(weighted_l2(gu.uh, Z)) + sq(weighted_l2(gu.vh, Z)) +
                      sq(weighted_l2(gu.hh, Z)) + sq(weighted_l2(gu.gh, Z)));
  n.dw_l2 = std::sqrt(sq(norm(duh, NormKind::L2)) + sq(norm(dvh, NormKind::L2)) +
                      sq(norm(dhh, NormKind::L2)) + sq(norm(dgh, NormKind::L2)));
  n.dw_zl2 = std::sqrt(sq(weighted_l2(duh, Z)) + sq(weighted_l2(dvh, Z)) +
                       sq(weighted_l2(dhh, Z)) + sq(weighted_l2(dgh, Z)));
  n.u_l2 = std::sqrt(sq(norm(gu.uh, NormKind::L2)) + sq(norm(gu.vh, NormKind::L2)));
  return n;
}

}  // namespace

EstimateRatio estimate_ratio(LemmaTag tag, const GoodUnknowns& gu,
                             const TransformedSource& src, const WeightFunction& w,
                             double mbar, double eta) {
  const double eps = w.eps();
  const double nt = static_cast<double>(gu.n) / gu.rho;
  const double ant = std::abs(nt);
  const auto& Z = w.z_field();
  const GoodNorms n = good_norms(gu, Z);
  const double r_l2 = src.l2();
  const double r_zl2 = src.weighted_l2(Z);
  const double loge = std::abs(std::log(eps));
  const double e14 = std::pow(eps, 0.25);
  const double m12 = std::sqrt(mbar);

  EstimateRatio er;
  er.tag = tag;
  er.n = gu.n;
  er.eps = eps;
  switch (tag) {
    case LemmaTag::FullDerivativeL2:
      er.lhs = std::sqrt(eps) * (n.dw_l2 + ant * n.w_l2);
      er.rhs = m12 * (1.0 + std::sqrt(m12)) * n.w_l2 + std::sqrt(r_l2 * n.w_l2);
      break;
    case LemmaTag::VelocityL2:
      er.lhs = std::sqrt(ant) * n.u_l2;
      er.rhs = m12 * (1.0 + std::sqrt(m12)) * n.w_l2 + std::sqrt(r_l2 * n.w_l2);
      break;
    case LemmaTag::WeightedL2:
      er.lhs = std::sqrt(ant) * n.w_zl2;
      er.rhs = std::pow(loge, 1.0 + eta / 3.0) * r_zl2 / std::sqrt(ant) +
               e14 * m12 * std::sqrt(r_l2 * n.w_l2) +
               e14 * (1.0 + m12) * std::pow(r_l2, 0.25) * std::pow(n.w_l2, 0.75) +
               e14 * std::pow(mbar, 0.25) * (1.0 + std::pow(mbar, 1.25)) * n.w_l2;
      break;
    case LemmaTag::CombinedL2:
      er.lhs = std::sqrt(eps) * std::pow(ant, 1.0 / 3.0) * (n.dw_l2 + ant * n.w_l2) +
               std::pow(ant, 2.0 / 3.0) * n.w_l2 +
               std::pow(eps, -0.25) * std::pow(ant, 5.0 / 6.0) * n.w_zl2;
      er.rhs = std::pow(loge, 1.0 + eta / 3.0) * (r_l2 + std::pow(eps, -0.25) * r_zl2);
      break;
    case LemmaTag::WeightedGradient:
      er.lhs = std::sqrt(eps) * (n.dw_zl2 + ant * n.w_zl2);
      er.rhs = std::pow(loge, 0.5 + eta / 6.0) *
                   (r_zl2 / std::sqrt(ant) + std::sqrt(ant) * n.w_zl2) +
               e14 * (n.w_l2 + std::sqrt(n.w_l2 * r_l2));
      break;
  }
  er.ratio = er.rhs > 0.0 ? er.lhs / er.rhs : 0.0;
  return er;
}

PairNorms omega_forcing_norms(const std::map<int, ModeForcing>& modes, const RealField& z,
                              double rho) {
  PairNorms pn;
  double l2 = 0.0, zl2 = 0.0;
  for (const auto& [n, mf] : modes) {
    (void)n;
    l2 += sq(norm(mf.f1, NormKind::L2)) + sq(norm(mf.f2, NormKind::L2)) +
          sq(norm(mf.q1, NormKind::L2)) + sq(norm(mf.q2, NormKind::L2));
    zl2 += sq(weighted_l2(mf.f1, z)) + sq(weighted_l2(mf.f2, z)) +
           sq(weighted_l2(mf.q1, z)) + sq(weighted_l2(mf.q2, z));
  }
  const double circ = 2.0 * std::numbers::pi * rho;
  pn.l2 = std::sqrt(circ * 2.0 * l2);
  pn.zl2 = std::sqrt(circ * 2.0 * zl2);
  return pn;
}

double linear_estimate_ratio(const XNormReport& xr, const std::map<int, ModeForcing>& modes,
                    const std::optional<ZeroForcing>& zf, const WeightFunction& w, double eps,
                    double eta, double rho) {
  const PairNorms pn = omega_forcing_norms(modes, w.z_field(), rho);
  const double loge = std::abs(std::log(eps));
  double rhs = std::pow(eps, -0.25) * std::pow(loge, 0.5 * (3.0 + eta)) *
               (pn.l2 + std::pow(eps, -0.25) * pn.zl2);
  if (zf) {
    const auto If = integrate_to_infinity(zf->f10).value;
    const auto Pq = integrate_from_zero(zf->q10);
    const double l1 = norm(If, NormKind::L1) + norm(Pq, NormKind::L1);
    const double l2 = std::sqrt(sq(norm(If, NormKind::L2)) + sq(norm(Pq, NormKind::L2)));
    const double zl2 =
        std::sqrt(sq(weighted_l2(If, w.z_field())) + sq(weighted_l2(Pq, w.z_field())));
    rhs += (l1 + std::pow(eps, 0.25) * l2 + zl2) / eps;
  }
  return rhs > 0.0 ? xr.total / rhs : 0.0;
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> samples) {
  ScalingFit fit;
  const std::size_t n = samples.size();
  if (n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [e, v] : samples) {
    const double x = std::log(e), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  fit.slope = (dn * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / dn;
  const double sstot = syy - sy * sy / dn;
  double ssres = 0.0;
  for (const auto& [e, v] : samples) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(e));
    ssres += r * r;
  }
  fit.r2 = sstot > 0.0 ? 1.0 - ssres / sstot : 1.0;
  return fit;
}

double vorticity_gradient_check(const ComplexField& q1, const ComplexField& q2, int n,
                                double rho, const WeightFunction& w) {
  const double nt = static_cast<double>(n) / rho;
  const auto dq1 = derivative(q1, 1);
  const auto dq2 = derivative(q2, 1);
  const auto& Z = w.z_field();
  ComplexField om(q1.grid());
  for (std::size_t i = 0; i < q1.size(); ++i) om[i] = dq1[i] - kI * nt * q2[i];
  const double grad =
      std::sqrt(sq(weighted_l2(dq1, Z)) + sq(weighted_l2(dq2, Z)) +
                nt * nt * (sq(weighted_l2(q1, Z)) + sq(weighted_l2(q2, Z))));
  const double vort = weighted_l2(om, Z);
  return vort > 0.0 ? grad / vort : 0.0;
}

}  // namespace mhdbl
