#include "mhdbl/nonlinear.hpp"

#include <cmath>

namespace mhdbl {

namespace {
constexpr Complex kI{0.0, 1.0};

ComplexField complexify(const RealField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

SpectralState state_diff(const SpectralState& a, const SpectralState& b) {
  SpectralState d(a.grid(), a.nmax(), a.rho);
  for (std::size_t i = 0; i < d.u0.size(); ++i) {
    d.u0[i] = a.u0[i] - b.u0[i];
    d.h0[i] = a.h0[i] - b.h0[i];
  }
  for (int k = 0; k < a.nmax(); ++k)
    for (std::size_t i = 0; i < d.u0.size(); ++i) {
      d.modes[k].u[i] = a.modes[k].u[i] - b.modes[k].u[i];
      d.modes[k].v[i] = a.modes[k].v[i] - b.modes[k].v[i];
      d.modes[k].h[i] = a.modes[k].h[i] - b.modes[k].h[i];
      d.modes[k].g[i] = a.modes[k].g[i] - b.modes[k].g[i];
    }
  return d;
}

}  // namespace

VecField velocity_part(const SpectralState& s) {
  VecField v(s.grid(), s.nmax());
  v.z1 = s.u0;
  for (int k = 0; k < s.nmax(); ++k) {
    v.modes[k][0] = s.modes[k].u;
    v.modes[k][1] = s.modes[k].v;
  }
  return v;
}

VecField magnetic_part(const SpectralState& s) {
  VecField v(s.grid(), s.nmax());
  v.z1 = s.h0;
  for (int k = 0; k < s.nmax(); ++k) {
    v.modes[k][0] = s.modes[k].h;
    v.modes[k][1] = s.modes[k].g;
  }
  return v;
}

VecField advect(const VecField& s, const VecField& t, double rho) {
  if (s.nmax() != t.nmax())
    throw std::invalid_argument("advect: mode truncations must match");
  const int N = s.nmax();
  const auto g = s.grid();
  const std::size_t ny = g->size();
  VecField out(g, N);

  // mode values and y-derivatives, index m = 0..N
  std::vector<std::array<ComplexField, 2>> sv, tv, td;
  sv.reserve(N + 1);
  tv.reserve(N + 1);
  td.reserve(N + 1);
  sv.push_back({complexify(s.z1), complexify(s.z2)});
  tv.push_back({complexify(t.z1), complexify(t.z2)});
  for (int m = 1; m <= N; ++m) {
    sv.push_back({s.modes[m - 1][0], s.modes[m - 1][1]});
    tv.push_back({t.modes[m - 1][0], t.modes[m - 1][1]});
  }
  for (int m = 0; m <= N; ++m)
    td.push_back({derivative(tv[m][0], 1), derivative(tv[m][1], 1)});

  auto val = [](const std::vector<std::array<ComplexField, 2>>& v, int m, int c,
                std::size_t i) -> Complex {
    return m >= 0 ? v[m][c][i] : std::conj(v[-m][c][i]);
  };

  for (int n = 0; n <= N; ++n) {
    std::array<ComplexField, 2> acc{ComplexField(g), ComplexField(g)};
    for (int m = std::max(-N, n - N); m <= std::min(N, n + N); ++m) {
      const int k = n - m;
      const double kt = static_cast<double>(k) / rho;
      const Complex ik{0.0, kt};
      for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < ny; ++i)
          acc[c][i] += val(sv, m, 0, i) * ik * val(tv, k, c, i) +
                       val(sv, m, 1, i) * val(td, k, c, i);
    }
    if (n == 0) {
      for (std::size_t i = 0; i < ny; ++i) {
        out.z1[i] = acc[0][i].real();
        out.z2[i] = acc[1][i].real();
      }
    } else {
      out.modes[n - 1][0] = std::move(acc[0]);
      out.modes[n - 1][1] = std::move(acc[1]);
    }
  }
  return out;
}

SourcePair bilinear_sources(const VecField& q, const VecField& r, double rho) {
  const auto qq = advect(q, q, rho);
  const auto rr = advect(r, r, rho);
  const auto qr = advect(q, r, rho);
  const auto rq = advect(r, q, rho);
  const auto g = q.grid();
  const int N = q.nmax();
  SourcePair sp{VecField(g, N), VecField(g, N)};
  for (std::size_t i = 0; i < g->size(); ++i) {
    sp.FU.z1[i] = rr.z1[i] - qq.z1[i];
    sp.FU.z2[i] = rr.z2[i] - qq.z2[i];
    sp.FH.z1[i] = rq.z1[i] - qr.z1[i];
    sp.FH.z2[i] = rq.z2[i] - qr.z2[i];
  }
  for (int k = 0; k < N; ++k)
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < g->size(); ++i) {
        sp.FU.modes[k][c][i] = rr.modes[k][c][i] - qq.modes[k][c][i];
        sp.FH.modes[k][c][i] = rq.modes[k][c][i] - qr.modes[k][c][i];
      }
  return sp;
}

SourceCompatibility check_source_compatibility(const SourcePair& sp, const VecField& q,
                                               const VecField& r, double rho) {
  SourceCompatibility sc;
  const auto g = sp.FH.grid();
  const int N = sp.FH.nmax();
  for (int n = 1; n <= N; ++n) {
    const double nt = static_cast<double>(n) / rho;
    const auto& F1 = sp.FH.modes[n - 1][0];
    const auto& F2 = sp.FH.modes[n - 1][1];
    const auto dF2 = derivative(F2, 1);
    ComplexField div(g);
    for (std::size_t i = 0; i < g->size(); ++i) div[i] = kI * nt * F1[i] + dF2[i];
    const double scale = std::sqrt(std::pow(norm(F1, NormKind::L2), 2) +
                                   std::pow(norm(F2, NormKind::L2), 2));
    sc.divergence.push_back(scale > 0.0 ? norm(div, NormKind::L2) / scale : 0.0);
    const double m2 = norm(F2, NormKind::Linf);
    sc.wall_trace.push_back(m2 > 0.0 ? std::abs(F2[0]) / m2 : 0.0);
  }

  // P0(s.grad t) = dy P0(Q0 s2 Q0 t) for the magnetic source combination
  RealField prod1(g), prod2(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double p1 = 0.0, p2 = 0.0;
    for (int k = 1; k <= N; ++k) {
      p1 += 2.0 * std::real(std::conj(q.modes[k - 1][1][i]) * r.modes[k - 1][0][i]) -
            2.0 * std::real(std::conj(r.modes[k - 1][1][i]) * q.modes[k - 1][0][i]);
      p2 += 2.0 * std::real(std::conj(q.modes[k - 1][1][i]) * r.modes[k - 1][1][i]) -
            2.0 * std::real(std::conj(r.modes[k - 1][1][i]) * q.modes[k - 1][1][i]);
    }
    prod1[i] = -p1;  // -Q0 q2 Q0 r + Q0 r2 Q0 q, first component
    prod2[i] = -p2;
  }
  const auto dp1 = derivative(prod1, 1);
  const auto dp2 = derivative(prod2, 1);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    num += g->weight(i) * (std::pow(sp.FH.z1[i] - dp1[i], 2) +
                           std::pow(sp.FH.z2[i] - dp2[i], 2));
    den += g->weight(i) * (std::pow(sp.FH.z1[i], 2) + std::pow(sp.FH.z2[i], 2) +
                           std::pow(dp1[i], 2) + std::pow(dp2[i], 2));
  }
  sc.zero_mode_identity = den > 0.0 ? std::sqrt(num / den) : 0.0;

  sc.ok = sc.zero_mode_identity < 1e-6;
  for (double d : sc.divergence) sc.ok = sc.ok && d < 3e-2;
  for (double t : sc.wall_trace) sc.ok = sc.ok && t < 1e-8;
  return sc;
}

SpectralState phi_apply(const SpectralState& state, const ExternalForcing& fext,
                        const std::vector<ModeOperator>& ops, const LinearContext& ctx) {
  const int N = state.nmax();
  if (static_cast<int>(ops.size()) < N)
    throw std::invalid_argument("phi_apply: need one operator per mode");
  const auto g = state.grid();
  const auto q = velocity_part(state);
  const auto r = magnetic_part(state);
  const auto sp = bilinear_sources(q, r, ctx.rho);

  SpectralState out(g, N, state.rho);
  auto zs = solve_zero_mode(sp.FU.z1, sp.FH.z1, ctx.eps, ctx.mu, ctx.kappa, ctx.tail_tol);
  out.u0 = zs.u0;
  out.h0 = zs.h0;

  for (int n = 1; n <= N; ++n) {
    ModeForcing mf(n, ctx.rho, g);
    mf.f1 = sp.FU.modes[n - 1][0];
    mf.f2 = sp.FU.modes[n - 1][1];
    mf.q1 = sp.FH.modes[n - 1][0];
    mf.q2 = sp.FH.modes[n - 1][1];
    const auto it = fext.modes.find(n);
    if (it != fext.modes.end()) {
      for (std::size_t i = 0; i < g->size(); ++i) {
        mf.f1[i] += it->second.f1[i];
        mf.f2[i] += it->second.f2[i];
        mf.q1[i] += it->second.q1[i];
        mf.q2[i] += it->second.q2[i];
      }
    }
    const auto ms = solve_mode(ops[n - 1], mf, ctx);
    out.modes[n - 1].u = ms.u;
    out.modes[n - 1].v = ms.v;
    out.modes[n - 1].h = ms.h;
    out.modes[n - 1].g = ms.g;
  }
  return out;
}

IterationState fixed_point_solve(const ExternalForcing& fext, const LinearContext& ctx,
                                 const WeightFunction& w, const FixedPointOptions& opt) {
  const auto g = ctx.grid;
  std::vector<ModeOperator> ops;
  ops.reserve(opt.nmax);
  for (int n = 1; n <= opt.nmax; ++n) ops.push_back(assemble_mode_operator(n, ctx));

  IterationState st{SpectralState(g, opt.nmax, ctx.rho), 0, {}, {}, {}, 0.0, 0.0, 0.0, 0.0, true};
  const PairNorms pn = omega_forcing_norms(fext.modes, w.z_field(), ctx.rho);
  st.forcing_norm = pn.l2 + std::pow(ctx.eps, -0.25) * pn.zl2;
  st.forcing_bound = opt.delta2 * std::pow(ctx.eps, 0.75) /
                     std::pow(std::abs(std::log(ctx.eps)), 3.0 + opt.eta);
  st.forcing_within_bound = st.forcing_norm <= st.forcing_bound;

  SpectralState cur = st.field;  // zero initial iterate
  st.x_norm_history.push_back(0.0);
  double prev_delta = -1.0;
  int expansions = 0;
  for (int k = 1; k <= opt.max_iter; ++k) {
    SpectralState next = phi_apply(cur, fext, ops, ctx);
    const double xn = x_norm(next, w, ctx.eps).total;
    const double delta = x_norm(state_diff(next, cur), w, ctx.eps).total;
    st.x_norm_history.push_back(xn);
    st.iterations = k;
    if (prev_delta > 0.0) {
      const double ratio = delta / prev_delta;
      st.contraction_ratios.push_back(ratio);
      expansions = ratio >= 1.0 ? expansions + 1 : 0;
      if (expansions >= 3) {
        st.field = std::move(next);
        throw NonContractionError("fixed_point_solve: no contraction for 3 steps", st);
      }
    }
    prev_delta = delta;
    cur = std::move(next);
    st.final_update = xn > 0.0 ? delta / xn : 0.0;
    st.update_history.push_back(st.final_update);
    if (st.final_update < opt.tol) break;
  }
  // fixed-point defect of the discrete nonlinear system
  SpectralState check = phi_apply(cur, fext, ops, ctx);
  const double xn = x_norm(cur, w, ctx.eps).total;
  st.fixed_point_residual =
      xn > 0.0 ? x_norm(state_diff(check, cur), w, ctx.eps).total / xn : 0.0;
  st.field = std::move(cur);
  return st;
}

double nonlinear_estimate_ratio(const SpectralState& solution, const ExternalForcing& fext,
                      const WeightFunction& w, double eps, double eta) {
  const PairNorms pn = omega_forcing_norms(fext.modes, w.z_field(), solution.rho);
  const double rhs = std::pow(eps, -0.25) *
                     std::pow(std::abs(std::log(eps)), 0.5 * (3.0 + eta)) *
                     (pn.l2 + std::pow(eps, -0.25) * pn.zl2);
  return rhs > 0.0 ? x_norm(solution, w, eps).total / rhs : 0.0;
}

}  // namespace mhdbl
