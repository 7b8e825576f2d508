#pragma once

#include <map>
#include <optional>

#include "mhdbl/banded.hpp"
#include "mhdbl/grid.hpp"
#include "mhdbl/profile.hpp"

namespace mhdbl {

/// Shared read-only context for the per-mode solves.
struct LinearContext {
  GridPtr grid;
  const ShearProfile* profile = nullptr;
  double eps = 0.0;
  double mu = 1.0;
  double kappa = 1.0;
  double rho = 1.0;                 // torus radius; ntilde = n / rho
  double residual_tol = 1e-6;      // flag threshold, not fatal
  double tail_tol = 1e-8;

  double ntilde(int n) const { return static_cast<double>(n) / rho; }
};

/// Per-mode source pair (f_n, q_n). The magnetic source must satisfy the
/// discrete compatibility i*ntilde*q1 + dy q2 = 0 with q2(0) = 0.
struct ModeForcing {
  int n = 0;
  double rho = 1.0;
  ComplexField f1, f2, q1, q2;

  ModeForcing(int mode, double rho_, GridPtr g)
      : n(mode), rho(rho_), f1(g), f2(g), q1(g), q2(g) {}
};

/// Relative divergence of the compatibility condition for q (and the wall
/// trace); used both as a precondition check and a diagnostic.
struct CompatibilityReport {
  double divergence = 0.0;   // ||i n q1 + dy q2|| / ||(q1,q2)||
  double wall_trace = 0.0;   // |q2(0)| / max|q2|
  bool ok = true;
};
CompatibilityReport check_mode_forcing(const ModeForcing& mf);

struct ResidualReport {
  double momentum_x = 0.0;   // first momentum equation (not used in recovery)
  double momentum_y = 0.0;
  double induction_x = 0.0;
  double induction_y = 0.0;
  double max_residual = 0.0;
  bool verified = true;      // all residuals below the context tolerance
};

struct ModeSolution {
  int n = 0;
  double rho = 1.0;
  ComplexField u, v, h, g, p;
  ComplexField phi, psi;     // u = phi', v = -i*ntilde*phi; h = psi', g = -i*ntilde*psi
  ComplexField omega_u, omega_h;  // solved vorticity unknowns (D^2 - nt^2) of phi, psi
  ResidualReport residuals;

  ModeSolution(int mode, double rho_, GridPtr gr)
      : n(mode), rho(rho_), u(gr), v(gr), h(gr), g(gr), p(gr), phi(gr), psi(gr),
        omega_u(gr), omega_h(gr) {}
};

struct ZeroModeSolution {
  RealField u0, h0;          // v0 = g0 = 0 by construction
  bool tail_warning_f = false;
  bool tail_warning_q = false;

  ZeroModeSolution(GridPtr g) : u0(g), h0(g) {}
};

/// Explicit quadrature solution of the zero-mode ODE system:
///   u0 = -(1/(mu eps)) dy^{-1} (I f10),   h0 = -(1/(kappa eps)) I (dy^{-1} q10).
ZeroModeSolution solve_zero_mode(const RealField& f10, const RealField& q10, double eps,
                                 double mu, double kappa, double tail_tol = 1e-8);

/// The discrete curled system for mode n over interleaved (phi, omega_u,
/// psi, omega_h) per node, with rows equilibrated; factored and ready.
struct ModeOperator {
  int n = 0;
  double ntilde = 0.0;
  BandedMatrix matrix;
  std::vector<double> row_scale;
};

ModeOperator assemble_mode_operator(int n, const LinearContext& ctx);

/// Solve one Fourier mode: banded solve of the curled stream-function
/// system, primitive recovery, pressure from the wall-normal momentum
/// equation (p(y_max) = 0), and a primitive-variable residual report.
ModeSolution solve_mode(int n, const ModeForcing& mf, const LinearContext& ctx);

/// Mode solve reusing a factored operator (refinement sweeps, Picard loops).
ModeSolution solve_mode(const ModeOperator& op, const ModeForcing& mf,
                        const LinearContext& ctx);

/// Zero-mode forcing (tangential components of the x-average).
struct ZeroForcing {
  RealField f10, q10;
  ZeroForcing(GridPtr g) : f10(g), q10(g) {}
};

/// Full linear solution: zero mode plus modes 1..N (negative modes are the
/// conjugates, which the solver reproduces bit-exactly).
struct LinearField {
  std::optional<ZeroModeSolution> zero;
  std::map<int, ModeSolution> modes;  // keys >= 1
};

LinearField solve_linear_field(const std::map<int, ModeForcing>& forcing,
                               const std::optional<ZeroForcing>& zero_forcing,
                               const LinearContext& ctx, int threads = 1);

}  // namespace mhdbl
