#include "mhdbl/linear.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace mhdbl {

namespace {

constexpr Complex kI{0.0, 1.0};

double term_scale(std::initializer_list<double> norms) {
  double s = 0.0;
  for (double v : norms) s += v;
  return std::max(s, 1e-300);
}

}  // namespace

CompatibilityReport check_mode_forcing(const ModeForcing& mf) {
  CompatibilityReport rep;
  const double ntilde = static_cast<double>(mf.n) / mf.rho;
  ComplexField div(mf.q1.grid());
  const auto dq2 = derivative(mf.q2, 1);
  for (std::size_t i = 0; i < div.size(); ++i)
    div[i] = kI * ntilde * mf.q1[i] + dq2[i];
  const double nq = std::sqrt(std::pow(norm(mf.q1, NormKind::L2), 2) +
                              std::pow(norm(mf.q2, NormKind::L2), 2));
  rep.divergence = nq > 0.0 ? norm(div, NormKind::L2) / nq : 0.0;
  const double q2max = norm(mf.q2, NormKind::Linf);
  rep.wall_trace = q2max > 0.0 ? std::abs(mf.q2[0]) / q2max : 0.0;
  rep.ok = rep.divergence < 3e-2 && rep.wall_trace < 1e-8;
  return rep;
}

ZeroModeSolution solve_zero_mode(const RealField& f10, const RealField& q10, double eps,
                                 double mu, double kappa, double tail_tol) {
  const auto& g = f10.grid();
  ZeroModeSolution zs(g);

  auto If = integrate_to_infinity(f10, tail_tol);
  zs.tail_warning_f = !If.tail_decayed;
  auto u0 = integrate_from_zero(If.value);
  for (std::size_t i = 0; i < g->size(); ++i) zs.u0[i] = -u0[i] / (mu * eps);

  auto P = integrate_from_zero(q10);
  auto IP = integrate_to_infinity(P, tail_tol);
  zs.tail_warning_q = !IP.tail_decayed;
  for (std::size_t i = 0; i < g->size(); ++i) zs.h0[i] = -IP.value[i] / (kappa * eps);
  return zs;
}

ModeOperator assemble_mode_operator(int n, const LinearContext& ctx) {
  if (n == 0) throw std::invalid_argument("assemble_mode_operator: n must be nonzero");
  const auto& g = *ctx.grid;
  const auto& p = *ctx.profile;
  const double eps = ctx.eps;
  const double rt = std::sqrt(eps);
  const double nt = ctx.ntilde(n);
  const double k2 = nt * nt;
  const std::size_t N = g.size();
  const int dim = static_cast<int>(4 * N);

  // Interleaved unknowns (phi, omega_u, psi, omega_h) per node. The
  // one-sided first-derivative rows at y_max reach two nodes inward,
  // hence kl = 9 while interior coupling needs only 7.
  ModeOperator op{n, nt, BandedMatrix(dim, 9, 7), {}};
  auto& A = op.matrix;
  auto col = [](std::size_t i, int c) { return static_cast<int>(4 * i) + c; };

  const std::size_t M = N - 1;
  for (std::size_t i = 1; i < M; ++i) {
    const double Y = g.node(i) / rt;
    const Complex Us = p.us(Y);
    const Complex Hs = p.hs(Y);
    const Complex dUs = p.us(Y, 1) / rt;       // d/dy U_s
    const Complex dHs = p.hs(Y, 1) / rt;
    const Complex d2Us = p.us(Y, 2) / eps;     // d²/dy² U_s
    const Complex d2Hs = p.hs(Y, 2) / eps;
    const auto& s2 = g.d2(i);
    const auto& s1 = g.d1(i);

    // vorticity definitions: -(D² - nt²) phi + omega_u = 0  (same for psi)
    for (int k = 0; k < s2.len; ++k) {
      A.add(col(i, 0), col(s2.first + k, 0), -s2.c[k]);
      A.add(col(i, 2), col(s2.first + k, 2), -s2.c[k]);
    }
    A.add(col(i, 0), col(i, 0), k2);
    A.add(col(i, 0), col(i, 1), 1.0);
    A.add(col(i, 2), col(i, 2), k2);
    A.add(col(i, 2), col(i, 3), 1.0);

    // curl of the momentum pair
    const int rm = col(i, 1);
    A.add(rm, col(i, 1), kI * nt * Us);
    A.add(rm, col(i, 0), -kI * nt * d2Us);
    A.add(rm, col(i, 3), -kI * nt * Hs);
    A.add(rm, col(i, 2), kI * nt * d2Hs);
    for (int k = 0; k < s2.len; ++k)
      A.add(rm, col(s2.first + k, 1), -ctx.mu * eps * s2.c[k]);
    A.add(rm, col(i, 1), ctx.mu * eps * k2);

    // curl of the induction pair
    const int rh = col(i, 3);
    A.add(rh, col(i, 3), kI * nt * Us);
    A.add(rh, col(i, 2), kI * nt * d2Us);
    A.add(rh, col(i, 1), -kI * nt * Hs);
    A.add(rh, col(i, 0), -kI * nt * d2Hs);
    for (int k = 0; k < s1.len; ++k) {
      A.add(rh, col(s1.first + k, 2), kI * nt * 2.0 * dUs * s1.c[k]);
      A.add(rh, col(s1.first + k, 0), -kI * nt * 2.0 * dHs * s1.c[k]);
    }
    for (int k = 0; k < s2.len; ++k)
      A.add(rh, col(s2.first + k, 3), -ctx.kappa * eps * s2.c[k]);
    A.add(rh, col(i, 3), ctx.kappa * eps * k2);
  }

  // wall: phi = 0, phi' = 0, psi = 0, omega_h = 0 (encodes psi''(0) = 0)
  A.add(col(0, 0), col(0, 0), 1.0);
  {
    const auto& s1 = g.d1(0);
    for (int k = 0; k < s1.len; ++k) A.add(col(0, 1), col(s1.first + k, 0), s1.c[k]);
  }
  A.add(col(0, 2), col(0, 2), 1.0);
  A.add(col(0, 3), col(0, 3), 1.0);

  // far field: phi = phi' = psi = psi' = 0
  A.add(col(M, 0), col(M, 0), 1.0);
  {
    const auto& s1 = g.d1(M);
    for (int k = 0; k < s1.len; ++k) {
      A.add(col(M, 1), col(s1.first + k, 0), s1.c[k]);
      A.add(col(M, 3), col(s1.first + k, 2), s1.c[k]);
    }
  }
  A.add(col(M, 2), col(M, 2), 1.0);

  op.row_scale = A.equilibrate_rows();
  A.factor();
  return op;
}

namespace {

ResidualReport primitive_residuals(const ModeSolution& ms, const ModeForcing& mf,
                                   const LinearContext& ctx) {
  const auto& g = *ctx.grid;
  const auto& p = *ctx.profile;
  const double eps = ctx.eps, rt = std::sqrt(eps);
  const double nt = ctx.ntilde(ms.n);

  // Diffusion through the solved vorticities: (D^2 - nt^2) of (u, v, h, g)
  // equals (dy w_u, -i nt w_u, dy w_h, -i nt w_h). Nesting discrete second
  // derivatives on top of first derivatives would lose consistency at the
  // one-sided boundary stencils.
  const auto dwu = derivative(ms.omega_u, 1);
  const auto dwh = derivative(ms.omega_h, 1);
  const auto dp = derivative(ms.p, 1);

  ComplexField r1(ctx.grid), r2(ctx.grid), r3(ctx.grid), r4(ctx.grid);
  double nUs = 0, nHs = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double Y = g.node(i) / rt;
    const double Us = p.us(Y), Hs = p.hs(Y);
    const double dUs = p.us(Y, 1) / rt, dHs = p.hs(Y, 1) / rt;
    nUs = std::max(nUs, std::abs(Us));
    nHs = std::max(nHs, std::abs(Hs));
    r1[i] = kI * nt * Us * ms.u[i] + ms.v[i] * dUs - kI * nt * Hs * ms.h[i] -
            ms.g[i] * dHs + kI * nt * ms.p[i] - ctx.mu * eps * dwu[i] - mf.f1[i];
    r2[i] = kI * nt * Us * ms.v[i] - kI * nt * Hs * ms.g[i] + dp[i] -
            ctx.mu * eps * (-kI * nt * ms.omega_u[i]) - mf.f2[i];
    r3[i] = kI * nt * Us * ms.h[i] + ms.v[i] * dHs - kI * nt * Hs * ms.u[i] -
            ms.g[i] * dUs - ctx.kappa * eps * dwh[i] - mf.q1[i];
    r4[i] = kI * nt * Us * ms.g[i] - kI * nt * Hs * ms.v[i] -
            ctx.kappa * eps * (-kI * nt * ms.omega_h[i]) - mf.q2[i];
  }

  const double nu = norm(ms.u, NormKind::L2), nv = norm(ms.v, NormKind::L2);
  const double nh = norm(ms.h, NormKind::L2), ng = norm(ms.g, NormKind::L2);
  const double np = norm(ms.p, NormKind::L2);
  const double sc = std::abs(nt) * std::max(nUs, nHs);
  const double sgrad = ctx.mu * eps * norm(dwu, NormKind::L2);

  ResidualReport rep;
  rep.momentum_x = norm(r1, NormKind::L2) /
                   term_scale({sc * nu, sc * nh, std::abs(nt) * np, sgrad,
                               norm(mf.f1, NormKind::L2)});
  rep.momentum_y = norm(r2, NormKind::L2) /
                   term_scale({sc * nv, sc * ng, norm(dp, NormKind::L2),
                               ctx.mu * eps * std::abs(nt) * norm(ms.omega_u, NormKind::L2),
                               norm(mf.f2, NormKind::L2)});
  rep.induction_x = norm(r3, NormKind::L2) /
                    term_scale({sc * nh, sc * nu,
                                ctx.kappa * eps * norm(dwh, NormKind::L2),
                                norm(mf.q1, NormKind::L2)});
  rep.induction_y = norm(r4, NormKind::L2) /
                    term_scale({sc * ng, sc * nv,
                                ctx.kappa * eps * std::abs(nt) * norm(ms.omega_h, NormKind::L2),
                                norm(mf.q2, NormKind::L2)});
  rep.max_residual = std::max({rep.momentum_x, rep.momentum_y, rep.induction_x,
                               rep.induction_y});
  rep.verified = rep.max_residual < ctx.residual_tol;
  return rep;
}

}  // namespace

ModeSolution solve_mode(const ModeOperator& op, const ModeForcing& mf,
                        const LinearContext& ctx) {
  const auto& g = *ctx.grid;
  const std::size_t N = g.size();
  const double nt = op.ntilde;

  const auto df1 = derivative(mf.f1, 1);
  const auto dq1 = derivative(mf.q1, 1);
  std::vector<Complex> rhs(4 * N, Complex{});
  for (std::size_t i = 1; i + 1 < N; ++i) {
    rhs[4 * i + 1] = (df1[i] - kI * nt * mf.f2[i]) * op.row_scale[4 * i + 1];
    rhs[4 * i + 3] = (dq1[i] - kI * nt * mf.q2[i]) * op.row_scale[4 * i + 3];
  }
  op.matrix.solve(rhs);

  ModeSolution ms(op.n, ctx.rho, ctx.grid);
  for (std::size_t i = 0; i < N; ++i) {
    ms.phi[i] = rhs[4 * i + 0];
    ms.omega_u[i] = rhs[4 * i + 1];
    ms.psi[i] = rhs[4 * i + 2];
    ms.omega_h[i] = rhs[4 * i + 3];
  }
  const auto du_phi = derivative(ms.phi, 1);
  const auto du_psi = derivative(ms.psi, 1);
  for (std::size_t i = 0; i < N; ++i) {
    ms.u[i] = du_phi[i];
    ms.v[i] = -kI * nt * ms.phi[i];
    ms.h[i] = du_psi[i];
    ms.g[i] = -kI * nt * ms.psi[i];
  }

  // pressure from the wall-normal momentum equation, p(y_max) = 0;
  // (D^2 - nt^2) v = -i nt omega_u through the solved vorticity
  ComplexField dp(ctx.grid);
  const double rt = std::sqrt(ctx.eps);
  for (std::size_t i = 0; i < N; ++i) {
    const double Y = g.node(i) / rt;
    dp[i] = mf.f2[i] - kI * nt * ctx.profile->us(Y) * ms.v[i] +
            kI * nt * ctx.profile->hs(Y) * ms.g[i] +
            ctx.mu * ctx.eps * (-kI * nt * ms.omega_u[i]);
  }
  ms.p = integrate_to_infinity(dp, ctx.tail_tol).value;

  ms.residuals = primitive_residuals(ms, mf, ctx);
  return ms;
}

ModeSolution solve_mode(int n, const ModeForcing& mf, const LinearContext& ctx) {
  const auto op = assemble_mode_operator(n, ctx);
  return solve_mode(op, mf, ctx);
}

LinearField solve_linear_field(const std::map<int, ModeForcing>& forcing,
                               const std::optional<ZeroForcing>& zero_forcing,
                               const LinearContext& ctx, int threads) {
  LinearField out;
  if (zero_forcing)
    out.zero = solve_zero_mode(zero_forcing->f10, zero_forcing->q10, ctx.eps, ctx.mu,
                               ctx.kappa, ctx.tail_tol);

  std::vector<const std::pair<const int, ModeForcing>*> items;
  for (const auto& kv : forcing) {
    if (kv.first < 1)
      throw std::invalid_argument("solve_linear_field: provide modes n >= 1 only");
    items.push_back(&kv);
  }
  std::vector<std::optional<ModeSolution>> slots(items.size());

  auto work = [&](std::size_t idx) {
    const auto& [n, mf] = *items[idx];
    slots[idx].emplace(solve_mode(n, mf, ctx));
  };

  if (threads <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto runner = [&]() {
      for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1))
        work(i);
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(threads, static_cast<int>(items.size()));
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < items.size(); ++i)
    out.modes.emplace(items[i]->first, std::move(*slots[i]));
  return out;
}

}  // namespace mhdbl
