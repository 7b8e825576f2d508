#pragma once

#include "mhdbl/norms.hpp"

namespace mhdbl {

/// One 2-vector field on the torus x half-line in mode space.
struct VecField {
  RealField z1, z2;                             // zero-mode components
  std::vector<std::array<ComplexField, 2>> modes;  // n = 1..N

  VecField(GridPtr g, int nmax) : z1(g), z2(g) {
    modes.reserve(nmax);
    for (int n = 0; n < nmax; ++n) modes.push_back({ComplexField(g), ComplexField(g)});
  }
  int nmax() const { return static_cast<int>(modes.size()); }
  GridPtr grid() const { return z1.grid(); }
};

VecField velocity_part(const SpectralState& s);
VecField magnetic_part(const SpectralState& s);

/// s . grad t by truncated mode convolution (no dealiasing; the physical
/// space oracle in the tests guards the truncation algebra).
VecField advect(const VecField& s, const VecField& t, double rho);

struct SourcePair {
  VecField FU, FH;  // -q.grad q + r.grad r and -q.grad r + r.grad q
};

SourcePair bilinear_sources(const VecField& q, const VecField& r, double rho);

struct SourceCompatibility {
  std::vector<double> divergence;   // per mode n=1..N, relative
  std::vector<double> wall_trace;   // per mode
  double zero_mode_identity = 0.0;  // P0(s.grad t) = dy P0(Q0 s2 Q0 t) defect
  bool ok = true;
};

/// Check the magnetic bilinear source satisfies the forcing compatibility
/// and the zero-mode projection identity.
SourceCompatibility check_source_compatibility(const SourcePair& sp, const VecField& q,
                                               const VecField& r, double rho);

/// External forcing in the shape the nonlinear map consumes.
struct ExternalForcing {
  std::map<int, ModeForcing> modes;  // Q0 modes, n >= 1
};

/// One application of the nonlinear map: linear solve with total forcing
/// = bilinear sources of (q, r) = (velocity, magnetic) parts of the state
/// plus the external forcing. Mode operators are reused across calls.
SpectralState phi_apply(const SpectralState& state, const ExternalForcing& fext,
                        const std::vector<ModeOperator>& ops, const LinearContext& ctx);

class NonContractionError;

struct IterationState {
  SpectralState field;
  int iterations = 0;
  std::vector<double> x_norm_history;        // per iterate
  std::vector<double> update_history;        // ||d_k||_X / ||W_k||_X per iterate
  std::vector<double> contraction_ratios;    // ||d_{k+1}||_X / ||d_k||_X
  double final_update = 0.0;                 // last relative X-norm change
  double fixed_point_residual = 0.0;         // ||Phi(W) - W||_X / ||W||_X
  double forcing_norm = 0.0;
  double forcing_bound = 0.0;
  bool forcing_within_bound = true;
};

class NonContractionError : public std::runtime_error {
 public:
  NonContractionError(const std::string& what, IterationState hist)
      : std::runtime_error(what), history(std::move(hist)) {}
  IterationState history;
};

struct FixedPointOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double delta2 = 0.1;  // scale of the contraction-regime forcing-size threshold
  double eta = 1.0;
  int nmax = 8;
  int threads = 1;
};

/// Picard iteration of the map from the zero field. Throws
/// NonContractionError after three consecutive expansion steps.
IterationState fixed_point_solve(const ExternalForcing& fext, const LinearContext& ctx,
                                 const WeightFunction& w, const FixedPointOptions& opt);

/// ||W||_X / (eps^{-1/4} |log eps|^{(3+eta)/2} (||F|| + eps^{-1/4} ||Z^{1/2}F||)).
double nonlinear_estimate_ratio(const SpectralState& solution, const ExternalForcing& fext,
                      const WeightFunction& w, double eps, double eta);

}  // namespace mhdbl
