#include "mhdbl/transform.hpp"

#include <cmath>

namespace mhdbl {

namespace {
constexpr Complex kI{0.0, 1.0};

double stack_l2(std::initializer_list<double> parts) {
  double acc = 0.0;
  for (double p : parts) acc += p * p;
  return std::sqrt(acc);
}
}  // namespace

GoodUnknowns to_good_unknowns(const ModeSolution& ms, const ShearProfile& p, double eps) {
  const auto& g = *ms.u.grid();
  const double rt = std::sqrt(eps);
  const double nt = static_cast<double>(ms.n) / ms.rho;
  GoodUnknowns gu(ms.n, ms.rho, ms.u.grid());

  const auto psi = integrate_from_zero(ms.h);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double Hs = p.hs(Y);
    const double ap = p.ap(Y);
    const double dap = p.ap_prime(Y) / rt;  // d/dy a_p
    gu.uh[i] = ms.u[i] - (dap * psi[i] + ap * ms.h[i]);
    gu.vh[i] = ms.v[i] + kI * nt * ap * psi[i];
    gu.hh[i] = (ms.h[i] - p.bp(Y) / rt * psi[i]) / Hs;
    gu.gh[i] = ms.g[i] / Hs;
    gu.psih[i] = psi[i] / Hs;
  }
  gu.phih = integrate_from_zero(gu.uh);

  const auto duh = derivative(gu.uh, 1);
  const auto dhh = derivative(gu.hh, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    gu.omega_u[i] = duh[i] - kI * nt * gu.vh[i];
    gu.omega_h[i] = dhh[i] - kI * nt * gu.gh[i];
  }
  return gu;
}

PrimitiveFields from_good_unknowns(const GoodUnknowns& gu, const ShearProfile& p,
                                   double eps) {
  const auto& g = *gu.uh.grid();
  const double rt = std::sqrt(eps);
  const double nt = static_cast<double>(gu.n) / gu.rho;
  PrimitiveFields pf(gu.uh.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double Hs = p.hs(Y);
    const double ap = p.ap(Y);
    const double dap = p.ap_prime(Y) / rt;
    const Complex psi = Hs * gu.psih[i];
    pf.h[i] = Hs * (gu.hh[i] + p.bp(Y) / rt * gu.psih[i]);
    pf.g[i] = Hs * gu.gh[i];
    pf.u[i] = gu.uh[i] + dap * psi + ap * pf.h[i];
    pf.v[i] = gu.vh[i] - kI * nt * ap * psi;
  }
  return pf;
}

CoefficientFields build_coefficients(const ShearProfile& p, double eps, double mu,
                                     double kappa, GridPtr grid) {
  CoefficientFields cf(grid);
  const double rt = std::sqrt(eps);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double Y = grid->node(i) / rt;
    const double Us = p.us(Y), Hs = p.hs(Y);
    const double dU = p.us(Y, 1), dH = p.hs(Y, 1);
    const double d2U = p.us(Y, 2), d2H = p.hs(Y, 2);
    const double d3U = p.us(Y, 3), d3H = p.hs(Y, 3);
    const double ap = Us / Hs;

    cf.A12[i] = (mu - kappa) * dU;
    cf.B11[i] = (kappa - 3.0 * mu) * dU + 2.0 * mu * ap * dH;
    cf.B22[i] = 2.0 * mu * (ap * dH - dU);
    cf.CU11[i] =
        (2.0 * kappa * dH * dU - 2.0 * mu * ap * dH * dH + 3.0 * mu * (Us * d2H - Hs * d2U)) /
        Hs;
    cf.CU22[i] = mu * (Us * d2H - Hs * d2U) / Hs;
    cf.CH11[i] = kappa * (2.0 * dH * dH - 3.0 * Hs * d2H) / (Hs * Hs);
    cf.CH22[i] = kappa * (-Hs * d2H) / (Hs * Hs);
    cf.DU1[i] =
        (kappa * dU * d2H - mu * ap * dH * d2H + mu * Us * d3H - mu * Hs * d3U) / Hs;
    cf.DH1[i] = kappa * (dH * d2H - Hs * d3H) / (Hs * Hs);
  }
  return cf;
}

double TransformedSource::l2() const {
  return stack_l2({norm(Ru1, NormKind::L2), norm(Ru2, NormKind::L2),
                   norm(Rh1, NormKind::L2), norm(Rh2, NormKind::L2)});
}

double TransformedSource::weighted_l2(const RealField& z) const {
  return stack_l2({mhdbl::weighted_l2(Ru1, z), mhdbl::weighted_l2(Ru2, z),
                   mhdbl::weighted_l2(Rh1, z), mhdbl::weighted_l2(Rh2, z)});
}

TransformedSource transformed_source(const ModeForcing& mf, const ShearProfile& p,
                                     double eps, double mu, double kappa) {
  const auto& g = *mf.f1.grid();
  const double rt = std::sqrt(eps);
  TransformedSource src(mf.f1.grid());
  const auto q1int = integrate_from_zero(mf.q1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double Hs = p.hs(Y);
    const double ap = p.ap(Y), bp = p.bp(Y);
    const double dU = p.us(Y, 1), dH = p.hs(Y, 1);
    src.Ru1[i] = mf.f1[i] - (mu / kappa) * ap * mf.q1[i] +
                 (mu / kappa * ap * dH - dU) / (rt * Hs) * q1int[i];
    src.Ru2[i] = mf.f2[i] - (mu / kappa) * ap * mf.q2[i];
    src.Rh1[i] = (mf.q1[i] - bp / rt * q1int[i]) / Hs;
    src.Rh2[i] = mf.q2[i] / Hs;
  }
  return src;
}

TransformedResidual transformed_residual(const GoodUnknowns& gu, const CoefficientFields& cf,
                                         const ModeSolution& ms,
                                         const TransformedSource& src,
                                         const ShearProfile& p, double eps, double mu,
                                         double kappa) {
  const auto& g = *gu.uh.grid();
  const double rt = std::sqrt(eps);
  const double c = 1.0 / rt;
  const double nt = static_cast<double>(gu.n) / gu.rho;
  const double k2 = nt * nt;
  const double mk = 1.0 + mu / kappa;

  // single-level discrete derivatives: solved vorticities and the pressure
  const auto dwu = derivative(ms.omega_u, 1);
  const auto dwh = derivative(ms.omega_h, 1);
  const auto dp = derivative(ms.p, 1);

  ComplexField eu1(gu.uh.grid()), eu2(gu.uh.grid()), eh1(gu.uh.grid()), eh2(gu.uh.grid());
  double a_u = 0.0, a_h = 0.0;  // term magnitude accumulators
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double Us = p.us(Y);
    const double Gs = p.gs(Y);
    const double H = p.hs(Y);
    const double bp = p.bp(Y);

    // derivatives of the good unknowns through the solver unknowns:
    // dy phi = u, dy psi = h, dy u = w_u + nt^2 phi, dy h = w_h + nt^2 psi
    const Complex du = ms.omega_u[i] + k2 * ms.phi[i];
    const Complex dh = ms.omega_h[i] + k2 * ms.psi[i];
    const Complex d2u = dwu[i] + k2 * ms.u[i];
    const Complex d2h = dwh[i] + k2 * ms.h[i];

    const double ap1 = p.ap_prime(Y), ap2 = p.ap_pp(Y), ap3 = p.ap_ppp(Y);
    const double bp1 = p.bp_prime(Y), bp2 = p.bp_pp(Y);
    const double ap = p.ap(Y);
    // y-derivatives of P = a_p psi: u-hat carries dy P (so its diffusion
    // needs the third derivative), v-hat carries P itself
    const Complex dP2 = c * c * ap2 * ms.psi[i] + 2.0 * c * ap1 * ms.h[i] + ap * dh;
    const Complex dP3 = c * c * c * ap3 * ms.psi[i] + 3.0 * c * c * ap2 * ms.h[i] +
                        3.0 * c * ap1 * dh + ap * d2h;
    const Complex duh2 = d2u - dP3;
    const Complex dvh2 = -kI * nt * du + kI * nt * dP2;

    // W = h - c b_p psi over H: hh = W R with R = 1/H_s
    const double R = 1.0 / H;
    const double dR = -c * p.hs(Y, 1) * R * R;
    const double d2R = c * c * (-p.hs(Y, 2) * R * R + 2.0 * p.hs(Y, 1) * p.hs(Y, 1) * R * R * R);
    const Complex W = ms.h[i] - c * bp * ms.psi[i];
    const Complex dW = dh - c * c * bp1 * ms.psi[i] - c * bp * ms.h[i];
    const Complex d2W = d2h - c * c * c * bp2 * ms.psi[i] - 2.0 * c * c * bp1 * ms.h[i] -
                        c * bp * dh;
    const Complex dhh1 = dW * R + W * dR;
    const Complex dhh2v = d2W * R + 2.0 * dW * dR + W * d2R;
    const Complex dgh1 = -kI * nt * ms.h[i] * R + ms.g[i] * dR;
    const Complex dgh2v = -kI * nt * dh * R - 2.0 * kI * nt * ms.h[i] * dR + ms.g[i] * d2R;

    const Complex adv1 =
        kI * nt * (mk * Us * gu.uh[i] - Gs * gu.hh[i] + rt * cf.A12[i] * gu.gh[i]);
    const Complex adv2 = kI * nt * (mk * Us * gu.vh[i] - Gs * gu.gh[i]);
    const Complex low1 = rt * cf.B11[i] * dhh1 + cf.CU11[i] * gu.hh[i] +
                         gu.psih[i] * cf.DU1[i] / rt;
    const Complex low2 = rt * cf.B22[i] * dgh1 + cf.CU22[i] * gu.gh[i];
    const Complex pr1 = kI * nt * ms.p[i];
    const Complex pr2 = dp[i];
    const Complex dif1 = -mu * eps * (duh2 - k2 * gu.uh[i]);
    const Complex dif2 = -mu * eps * (dvh2 - k2 * gu.vh[i]);
    eu1[i] = adv1 + low1 + pr1 + dif1 - src.Ru1[i];
    eu2[i] = adv2 + low2 + pr2 + dif2 - src.Ru2[i];
    a_u = std::max(a_u, std::abs(adv1) + std::abs(low1) + std::abs(pr1) + std::abs(dif1) +
                            std::abs(src.Ru1[i]) + std::abs(adv2) + std::abs(low2) +
                            std::abs(pr2) + std::abs(dif2) + std::abs(src.Ru2[i]));

    const Complex hadv1 = -kI * nt * gu.uh[i] - 2.0 * kappa * rt * bp * dhh1 +
                          cf.CH11[i] * gu.hh[i] + gu.psih[i] * cf.DH1[i] / rt;
    const Complex hadv2 = -kI * nt * gu.vh[i] - 2.0 * kappa * rt * bp * dgh1 +
                          cf.CH22[i] * gu.gh[i];
    const Complex hdif1 = -kappa * eps * (dhh2v - k2 * gu.hh[i]);
    const Complex hdif2 = -kappa * eps * (dgh2v - k2 * gu.gh[i]);
    eh1[i] = hadv1 + hdif1 - src.Rh1[i];
    eh2[i] = hadv2 + hdif2 - src.Rh2[i];
    a_h = std::max(a_h, std::abs(hadv1) + std::abs(hdif1) + std::abs(src.Rh1[i]) +
                            std::abs(hadv2) + std::abs(hdif2) + std::abs(src.Rh2[i]));
  }

  TransformedResidual out;
  const double ru = stack_l2({norm(eu1, NormKind::L2), norm(eu2, NormKind::L2)});
  const double rh = stack_l2({norm(eh1, NormKind::L2), norm(eh2, NormKind::L2)});
  const double ymax = g.y_max();
  out.eq_u = ru / std::max(a_u * std::sqrt(ymax), 1e-300);
  out.eq_h = rh / std::max(a_h * std::sqrt(ymax), 1e-300);
  out.max_residual = std::max(out.eq_u, out.eq_h);
  return out;
}

namespace {

double stack_linf4(const ComplexField& a, const ComplexField& b, const ComplexField& c,
                   const ComplexField& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::sqrt(std::norm(a[i]) + std::norm(b[i]) + std::norm(c[i]) +
                              std::norm(d[i])));
  return m;
}

struct FourFields {
  const ComplexField &a, &b, &c, &d;
  double l2() const {
    return stack_l2({norm(a, NormKind::L2), norm(b, NormKind::L2), norm(c, NormKind::L2),
                     norm(d, NormKind::L2)});
  }
  double zl2(const RealField& z) const {
    return stack_l2({weighted_l2(a, z), weighted_l2(b, z), weighted_l2(c, z),
                     weighted_l2(d, z)});
  }
};

EquivalencePair make_pair_ratio(double w, double what) {
  EquivalencePair e;
  e.forward = what > 0.0 ? w / what : 0.0;
  e.backward = w > 0.0 ? what / w : 0.0;
  return e;
}

}  // namespace

EquivalenceReport norm_equivalence_report(const ModeSolution& ms, const GoodUnknowns& gu,
                                          const WeightFunction& w, double eps) {
  const double nt = static_cast<double>(ms.n) / ms.rho;
  const double e14 = std::pow(eps, 0.25), e12 = std::sqrt(eps);
  const auto& Z = w.z_field();

  FourFields W{ms.u, ms.v, ms.h, ms.g};
  FourFields Wh{gu.uh, gu.vh, gu.hh, gu.gh};

  EquivalenceReport rep;
  rep.sup = make_pair_ratio(stack_linf4(ms.u, ms.v, ms.h, ms.g),
                            stack_linf4(gu.uh, gu.vh, gu.hh, gu.gh));
  rep.weighted = make_pair_ratio(W.zl2(Z) + e14 * W.l2(), Wh.zl2(Z) + e14 * Wh.l2());

  const auto du = derivative(ms.u, 1), dv = derivative(ms.v, 1), dh = derivative(ms.h, 1),
             dg = derivative(ms.g, 1);
  const auto duh = derivative(gu.uh, 1), dvh = derivative(gu.vh, 1),
             dhh = derivative(gu.hh, 1), dgh = derivative(gu.gh, 1);
  FourFields dW{du, dv, dh, dg};
  FourFields dWh{duh, dvh, dhh, dgh};
  rep.h1 = make_pair_ratio(W.l2() + e12 * dW.l2(), Wh.l2() + e12 * dWh.l2());

  const double zg_w = stack_l2({dW.zl2(Z), std::abs(nt) * W.zl2(Z)});
  const double zg_wh = stack_l2({dWh.zl2(Z), std::abs(nt) * Wh.zl2(Z)});
  rep.weighted_h1 = make_pair_ratio(W.l2() + e14 * zg_w, Wh.l2() + e14 * zg_wh);

  rep.max_constant = std::max({rep.sup.forward, rep.sup.backward, rep.weighted.forward,
                               rep.weighted.backward, rep.h1.forward, rep.h1.backward,
                               rep.weighted_h1.forward, rep.weighted_h1.backward});
  return rep;
}

CoefficientBoundReport check_coefficient_bounds(const ShearProfile& p, double eps, double mu,
                                                double kappa) {
  CoefficientBoundReport rep;
  const double mbar = p.mbar();
  double sup_ab = 0.0, sup_c = 0.0, sup_d = 0.0;
  const double Ylim = std::max(50.0, p.grid()->y_max() / std::sqrt(eps));
  const int nd = 20000;
  for (int i = 0; i <= nd; ++i) {
    const double Y = Ylim * i / nd;
    const double Us = p.us(Y), Hs = p.hs(Y);
    const double dU = p.us(Y, 1), dH = p.hs(Y, 1);
    const double d2U = p.us(Y, 2), d2H = p.hs(Y, 2);
    const double d3U = p.us(Y, 3), d3H = p.hs(Y, 3);
    const double ap = Us / Hs;
    const double w1 = 1.0 + Y, w2 = w1 * w1;

    const double A = std::abs((mu - kappa) * dU);
    const double B = std::max(std::abs((kappa - 3.0 * mu) * dU + 2.0 * mu * ap * dH),
                              std::abs(2.0 * mu * (ap * dH - dU)));
    sup_ab = std::max(sup_ab, w1 * (A + B));

    const double CU = std::max(
        std::abs((2.0 * kappa * dH * dU - 2.0 * mu * ap * dH * dH +
                  3.0 * mu * (Us * d2H - Hs * d2U)) / Hs),
        std::abs(mu * (Us * d2H - Hs * d2U) / Hs));
    const double CH = std::max(std::abs(kappa * (2.0 * dH * dH - 3.0 * Hs * d2H) / (Hs * Hs)),
                               std::abs(kappa * d2H / Hs));
    sup_c = std::max(sup_c, w1 * (CU + CH));

    const double DU = std::abs(
        (kappa * dU * d2H - mu * ap * dH * d2H + mu * Us * d3H - mu * Hs * d3U) / Hs);
    const double DH = std::abs(kappa * (dH * d2H - Hs * d3H) / (Hs * Hs));
    sup_d = std::max(sup_d, w2 * (DU + DH));
  }
  if (mbar > 0.0) {
    rep.c_ab = sup_ab / mbar;
    rep.c_cd = (sup_c + sup_d) / (mbar * (1.0 + mbar));
  } else {
    rep.c_ab = sup_ab < 1e-13 ? 0.0 : std::numeric_limits<double>::infinity();
    rep.c_cd = (sup_c + sup_d) < 1e-13 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  rep.finite = std::isfinite(rep.c_ab) && std::isfinite(rep.c_cd);
  return rep;
}

double measure_source_bound(const ModeForcing& mf, const TransformedSource& src,
                            const WeightFunction& w, double mbar) {
  const auto& Z = w.z_field();
  const double e14 = std::pow(w.eps(), -0.25);
  const double lhs = src.l2() + e14 * src.weighted_l2(Z);
  const double fq =
      stack_l2({norm(mf.f1, NormKind::L2), norm(mf.f2, NormKind::L2),
                norm(mf.q1, NormKind::L2), norm(mf.q2, NormKind::L2)});
  const double zfq = stack_l2({weighted_l2(mf.f1, Z), weighted_l2(mf.f2, Z),
                               weighted_l2(mf.q1, Z), weighted_l2(mf.q2, Z)});
  const double rhs = (1.0 + mbar) * (fq + e14 * zfq);
  return rhs > 0.0 ? lhs / rhs : 0.0;
}

}  // namespace mhdbl
