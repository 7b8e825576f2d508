#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mhdbl/forcing.hpp"
#include "mhdbl/nonlinear.hpp"
#include "testutil.hpp"

using namespace mhdbl;
using test::Rng;

namespace {

struct Setup {
  GridPtr grid;
  ShearProfile profile;
  WeightFunction weight;
  LinearContext ctx;
};

Setup make_setup(double eps, std::size_t n = 193) {
  auto grid = HalfLineGrid::build(eps, 12.0, n, 0.5);
  auto prof = build_profile("exp-approach", {}, grid);
  auto w = WeightFunction::build(prof, grid);
  Setup s{grid, std::move(prof), std::move(w), {}};
  s.ctx.grid = grid;
  s.ctx.profile = &s.profile;
  s.ctx.eps = eps;
  s.ctx.mu = 1.0;
  s.ctx.kappa = 1.0;
  s.ctx.rho = 1.0;
  return s;
}

ComplexField complexify_or(const RealField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

SpectralState random_divfree_state(Rng& rng, const Setup& s, int nmax) {
  SpectralState st(s.grid, nmax, 1.0);
  const double c0 = rng.normal(), c1 = rng.normal();
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    const double y = s.grid->node(i);
    st.u0[i] = c0 * y * std::exp(-0.6 * y * y);
    st.h0[i] = c1 * y * y * std::exp(-0.6 * y * y);
  }
  for (int k = 0; k < nmax; ++k) {
    const double nt = static_cast<double>(k + 1);
    auto phi = test::random_phi(rng, s.grid);
    auto psi = test::random_psi(rng, s.grid);
    auto du = derivative(phi, 1);
    auto dh = derivative(psi, 1);
    for (std::size_t i = 0; i < s.grid->size(); ++i) {
      st.modes[k].u[i] = du[i];
      st.modes[k].v[i] = Complex{0.0, -nt} * phi[i];
      st.modes[k].h[i] = dh[i];
      st.modes[k].g[i] = Complex{0.0, -nt} * psi[i];
    }
  }
  return st;
}

}  // namespace

TEST_CASE("magnetic bilinear source vanishes exactly when q == r") {
  auto s = make_setup(1e-2);
  Rng rng(3);
  auto st = random_divfree_state(rng, s, 3);
  auto q = velocity_part(st);
  const auto sp = bilinear_sources(q, q, 1.0);
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < s.grid->size(); ++i) {
        CHECK(sp.FH.modes[k][c][i].real() == 0.0);
        CHECK(sp.FH.modes[k][c][i].imag() == 0.0);
      }
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    CHECK(sp.FH.z1[i] == 0.0);
    CHECK(sp.FH.z2[i] == 0.0);
  }
}

TEST_CASE("zero fields give zero sources") {
  auto s = make_setup(1e-2);
  SpectralState st(s.grid, 2, 1.0);
  const auto sp = bilinear_sources(velocity_part(st), magnetic_part(st), 1.0);
  CHECK(norm(sp.FU.z1, NormKind::Linf) == 0.0);
  CHECK(norm(sp.FU.modes[0][0], NormKind::Linf) == 0.0);
  CHECK(norm(sp.FH.modes[1][1], NormKind::Linf) == 0.0);
}

TEST_CASE("convolution matches a physical-space oracle") {
  auto s = make_setup(1e-2, 129);
  Rng rng(8);
  const int N = 2;
  auto st = random_divfree_state(rng, s, N);
  auto sv = velocity_part(st);
  auto tv = magnetic_part(st);
  const auto got = advect(sv, tv, 1.0);

  // oracle: synthesize on an x-grid fine enough that products are alias-free
  const int Nx = 4 * N + 5;
  const double rho = 1.0;
  const std::size_t ny = s.grid->size();
  auto value_at = [&](const VecField& f, int c, double x, std::size_t i) {
    Complex acc = c == 0 ? Complex{f.z1[i], 0.0} : Complex{f.z2[i], 0.0};
    for (int m = 1; m <= N; ++m) {
      const Complex em{std::cos(m / rho * x), std::sin(m / rho * x)};
      acc += f.modes[m - 1][c][i] * em + std::conj(f.modes[m - 1][c][i] * em);
    }
    return acc.real();
  };
  std::vector<std::array<ComplexField, 2>> dt;
  dt.push_back({derivative(complexify_or(tv.z1), 1), derivative(complexify_or(tv.z2), 1)});
  for (int m = 1; m <= N; ++m)
    dt.push_back({derivative(tv.modes[m - 1][0], 1), derivative(tv.modes[m - 1][1], 1)});
  auto dy_at = [&](int c, double x, std::size_t i) {
    Complex acc = dt[0][c][i];
    for (int m = 1; m <= N; ++m) {
      const Complex em{std::cos(m / rho * x), std::sin(m / rho * x)};
      acc += dt[m][c][i] * em + std::conj(dt[m][c][i] * em);
    }
    return acc.real();
  };
  auto dx_at = [&](int c, double x, std::size_t i) {
    double acc = 0.0;
    for (int m = 1; m <= N; ++m) {
      const Complex em{std::cos(m / rho * x), std::sin(m / rho * x)};
      const Complex ik{0.0, m / rho};
      acc += 2.0 * std::real(ik * tv.modes[m - 1][c][i] * em);
    }
    return acc;
  };

  double worst = 0.0, scale = 1e-30;
  for (int n = 0; n <= N; ++n) {
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < ny; i += 7) {
        Complex proj{};
        for (int jx = 0; jx < Nx; ++jx) {
          const double x = 2.0 * std::numbers::pi * rho * jx / Nx;
          const double sval =
              value_at(sv, 0, x, i) * dx_at(c, x, i) + value_at(sv, 1, x, i) * dy_at(c, x, i);
          proj += sval * Complex{std::cos(n / rho * x), -std::sin(n / rho * x)};
        }
        proj /= static_cast<double>(Nx);
        const Complex want = n == 0 ? Complex{got.z1[i], 0.0} * (c == 0 ? 1.0 : 0.0) +
                                          Complex{got.z2[i], 0.0} * (c == 1 ? 1.0 : 0.0)
                                    : got.modes[n - 1][c][i];
        worst = std::max(worst, std::abs(proj - want));
        scale = std::max(scale, std::abs(want));
      }
    }
  }
  CHECK(worst / scale < 1e-10);
}

TEST_CASE("source compatibility defects converge at second order") {
  // The identities hold exactly in the continuum; discretely they carry the
  // product-rule error of dy, so the defect must shrink like h^2.
  std::vector<double> zid;
  std::vector<double> dmax;
  for (std::size_t n : {257, 1025}) {
    auto s = make_setup(1e-2, n);
    Rng rng(21);
    auto st = random_divfree_state(rng, s, 3);
    auto q = velocity_part(st);
    auto r = magnetic_part(st);
    const auto sp = bilinear_sources(q, r, 1.0);
    const auto rep = check_source_compatibility(sp, q, r, 1.0);
    zid.push_back(rep.zero_mode_identity);
    dmax.push_back(*std::max_element(rep.divergence.begin(), rep.divergence.end()));
    for (double t : rep.wall_trace) CHECK(t < 1e-12);
  }
  CHECK(zid[0] / zid[1] > 8.0);   // two refinements at order 2 gives 16
  CHECK(dmax[0] / dmax[1] > 8.0);
}

TEST_CASE("phi of the zero state under zero forcing is zero") {
  auto s = make_setup(1e-2, 129);
  std::vector<ModeOperator> ops;
  for (int n = 1; n <= 2; ++n) ops.push_back(assemble_mode_operator(n, s.ctx));
  SpectralState st(s.grid, 2, 1.0);
  ExternalForcing fext;
  const auto out = phi_apply(st, fext, ops, s.ctx);
  CHECK(x_norm(out, s.weight, s.ctx.eps).total == 0.0);
}

TEST_CASE("fixed point with zero forcing converges immediately to zero") {
  auto s = make_setup(1e-2, 129);
  FixedPointOptions opt;
  opt.nmax = 2;
  ExternalForcing fext;
  const auto its = fixed_point_solve(fext, s.ctx, s.weight, opt);
  CHECK(its.iterations == 1);
  CHECK(x_norm(its.field, s.weight, s.ctx.eps).total == 0.0);
  CHECK(its.fixed_point_residual == 0.0);
}

TEST_CASE("small forcing contracts fast and leaves a tiny fixed-point defect") {
  auto s = make_setup(1e-2, 193);
  ForcingSpec spec;
  spec.modes = {1, 2};
  auto fext = make_forcing(spec, s.grid, 1.0);
  const double bound = 0.1 * std::pow(s.ctx.eps, 0.75) /
                       std::pow(std::abs(std::log(s.ctx.eps)), 4.0);
  scale_forcing_to(fext, s.weight, 1.0, 0.5 * bound);

  FixedPointOptions opt;
  opt.nmax = 2;
  opt.delta2 = 0.1;
  const auto its = fixed_point_solve(fext, s.ctx, s.weight, opt);
  CHECK(its.forcing_within_bound);
  CHECK(its.iterations <= 20);
  for (double r : its.contraction_ratios) CHECK(r < 0.9);
  CHECK(its.fixed_point_residual < 1e-8);
  const double t1 = nonlinear_estimate_ratio(its.field, fext, s.weight, s.ctx.eps, 1.0);
  CHECK(std::isfinite(t1));
  CHECK(t1 > 0.0);
}

TEST_CASE("oversized forcing either converges or reports non-contraction") {
  auto s = make_setup(1e-2, 193);
  ForcingSpec spec;
  spec.modes = {1, 2};
  spec.amplitude = 1.0;
  auto fext = make_forcing(spec, s.grid, 1.0);
  const double bound = 0.1 * std::pow(s.ctx.eps, 0.75) /
                       std::pow(std::abs(std::log(s.ctx.eps)), 4.0);
  scale_forcing_to(fext, s.weight, 1.0, 1000.0 * bound);
  FixedPointOptions opt;
  opt.nmax = 2;
  opt.max_iter = 30;
  bool converged = false, flagged = false;
  try {
    const auto its = fixed_point_solve(fext, s.ctx, s.weight, opt);
    converged = its.final_update < 1e-6;
    CHECK_FALSE(its.forcing_within_bound);
  } catch (const NonContractionError& e) {
    flagged = true;
    CHECK_FALSE(e.history.contraction_ratios.empty());
  }
  CHECK((converged || flagged));
}

TEST_CASE("contraction ratio shrinks with the forcing amplitude") {
  auto s = make_setup(1e-2, 193);
  ForcingSpec spec;
  spec.modes = {1, 2};
  const double bound = 0.1 * std::pow(s.ctx.eps, 0.75) /
                       std::pow(std::abs(std::log(s.ctx.eps)), 4.0);
  FixedPointOptions opt;
  opt.nmax = 2;
  auto run_at = [&](double frac) {
    auto fext = make_forcing(spec, s.grid, 1.0);
    scale_forcing_to(fext, s.weight, 1.0, frac * bound);
    const auto its = fixed_point_solve(fext, s.ctx, s.weight, opt);
    double worst = 0.0;
    for (double r : its.contraction_ratios) worst = std::max(worst, r);
    return worst;
  };
  // contraction-regime forcing leaves the second increment at roundoff, so probe
  // at amplitudes where the quadratic term is resolvable
  const double big = run_at(1e4);
  const double small = run_at(1e2);
  CHECK(big < 0.9);
  CHECK(small <= big * 0.1);  // ratio scales linearly with the amplitude
}

TEST_CASE("fixed point contracts with distinct viscosities and rho != 1") {
  auto grid = HalfLineGrid::build(1e-2, 12.0, 193, 0.5);
  auto prof = build_profile("exp-approach", {}, grid);
  auto w = WeightFunction::build(prof, grid);
  LinearContext ctx{grid, &prof, 1e-2, 1.3, 0.7, 2.0, 1e-6, 1e-8};
  ForcingSpec spec;
  spec.modes = {1, 2};
  auto fext = make_forcing(spec, grid, 2.0);
  const double bound =
      0.1 * std::pow(ctx.eps, 0.75) / std::pow(std::abs(std::log(ctx.eps)), 4.0);
  scale_forcing_to(fext, w, 2.0, 0.5 * bound);
  FixedPointOptions opt;
  opt.nmax = 2;
  const auto its = fixed_point_solve(fext, ctx, w, opt);
  CHECK(its.iterations <= 20);
  CHECK(its.fixed_point_residual < 1e-8);
}
