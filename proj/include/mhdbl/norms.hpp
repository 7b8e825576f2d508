#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mhdbl/transform.hpp"

namespace mhdbl {

/// One nonzero Fourier mode of the perturbation (velocity and magnetic).
struct ModeComponents {
  ComplexField u, v, h, g;
  ModeComponents(GridPtr gr) : u(gr), v(gr), h(gr), g(gr) {}
};

/// Full perturbation state in mode space: tangential zero mode plus modes
/// 1..N (negative modes are conjugates by realness).
struct SpectralState {
  RealField u0, h0;
  std::vector<ModeComponents> modes;  // index k holds mode n = k+1
  double rho = 1.0;

  SpectralState(GridPtr g, int nmax, double rho_);
  int nmax() const { return static_cast<int>(modes.size()); }
  GridPtr grid() const { return u0.grid(); }
};

SpectralState to_state(const LinearField& lf, GridPtr g, int nmax, double rho);

/// The seven components of the solution norm, each already carrying its
/// eps power; total is their sum.
struct XNormReport {
  double mode_sup_sum = 0.0;   // sum_n ||W_n||_inf
  double zero_grad = 0.0;      // eps^{1/4} ||dy (u0,h0)||
  double zero_zgrad = 0.0;     // ||Z^{1/2} dy (u0,h0)||
  double q0_l2 = 0.0;          // eps^{-1/4} ||Q0 W||
  double q0_zl2 = 0.0;         // eps^{-1/2} ||Z^{1/2} Q0 W||
  double q0_grad = 0.0;        // eps^{1/4} ||grad Q0 W||
  double q0_zgrad = 0.0;       // ||Z^{1/2} grad Q0 W||
  double total = 0.0;
  double tail_truncation = 0.0;  // |n|=nmax share of the mode sup sum
};

XNormReport x_norm(const SpectralState& s, const WeightFunction& w, double eps);

/// Discrete defect of the real-part energy identity (first transformed
/// equation tested with U-hat, second with G_s H-hat); pressure term
/// included and reported separately.
struct EnergyIdentityReport {
  double defect = 0.0;
  double pressure_term = 0.0;  // relative size of Re<(in p, dy p), U-hat>
};
EnergyIdentityReport energy_identity_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                           const TransformedSource& src,
                                           const ComplexField& pressure, const ShearProfile& p,
                                           double eps, double mu, double kappa);

/// Defect of the velocity multiplier identity (induction equation tested
/// with U-hat).
double velocity_multiplier_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                 const TransformedSource& src, const ShearProfile& p,
                                 double eps, double mu, double kappa);

/// Defect of the imaginary-part weighted identity on the vorticity system
/// with multipliers sgn(nt) Z psih / mu and sgn(nt) Z phih / kappa.
double weighted_multiplier_check(const GoodUnknowns& gu, const CoefficientFields& cf,
                                 const TransformedSource& src, const WeightFunction& w,
                                 const ShearProfile& p, double eps, double mu, double kappa);

enum class LemmaTag {
  FullDerivativeL2,   // sqrt(eps)(||dy W|| + |nt| ||W||) bound
  VelocityL2,         // |nt|^{1/2} ||U-hat|| bound
  WeightedL2,         // |nt|^{1/2} ||Z^{1/2} W|| bound
  CombinedL2,         // interpolation-closed combined estimate
  WeightedGradient,   // sqrt(eps) ||Z^{1/2} dy W|| bound
};

struct EstimateRatio {
  LemmaTag tag{};
  int n = 0;
  double eps = 0.0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

EstimateRatio estimate_ratio(LemmaTag tag, const GoodUnknowns& gu,
                             const TransformedSource& src, const WeightFunction& w,
                             double mbar, double eta);

/// Omega-norms of a mode-forcing set: ||.||_{L2(Omega)} and the Z-weighted
/// version (Parseval over modes, conjugates included).
struct PairNorms {
  double l2 = 0.0;
  double zl2 = 0.0;
};
PairNorms omega_forcing_norms(const std::map<int, ModeForcing>& modes, const RealField& z,
                              double rho);

/// Ratio of the solution X-norm to the a priori linear-estimate right side
/// (eta-weighted log factors, unit constant).
double linear_estimate_ratio(const XNormReport& xr, const std::map<int, ModeForcing>& modes,
                    const std::optional<ZeroForcing>& zf, const WeightFunction& w, double eps,
                    double eta, double rho);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(value) against log(eps).
ScalingFit scaling_fit(std::span<const std::pair<double, double>> samples);

/// || Z^{1/2} grad q || / || Z^{1/2} omega_q || for a divergence-free mode
/// field q = (q1, q2) with q2(0) = 0.
double vorticity_gradient_check(const ComplexField& q1, const ComplexField& q2, int n,
                                double rho, const WeightFunction& w);

}  // namespace mhdbl
