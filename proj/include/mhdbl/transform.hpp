#pragma once

#include "mhdbl/linear.hpp"
#include "mhdbl/weight.hpp"

namespace mhdbl {

/// Good unknowns for one Fourier mode: the transform that cancels the
/// O(eps^{-1/2}) stretching terms of the linearized system. psih is the
/// stream function of (hh, gh) and phih the stream function of (uh, vh).
struct GoodUnknowns {
  int n = 0;
  double rho = 1.0;
  ComplexField uh, vh, hh, gh;
  ComplexField psih, phih;
  ComplexField omega_u, omega_h;  // discrete curls of (uh,vh) and (hh,gh)

  GoodUnknowns(int mode, double rho_, GridPtr g)
      : n(mode), rho(rho_), uh(g), vh(g), hh(g), gh(g), psih(g), phih(g), omega_u(g),
        omega_h(g) {}
};

/// uh = u - dy(a_p psi), vh = v + i*nt*a_p*psi, hh = (h - eps^{-1/2} b_p psi)/H_s,
/// gh = g/H_s, with psi = dy^{-1} h (psi(0) = 0). Profile derivatives are
/// closed-form; only the antiderivative is discrete.
GoodUnknowns to_good_unknowns(const ModeSolution& ms, const ShearProfile& p, double eps);

struct PrimitiveFields {
  ComplexField u, v, h, g;
  PrimitiveFields(GridPtr gr) : u(gr), v(gr), h(gr), g(gr) {}
};

/// Inverse transform. Uses the carried stream function psih (psi = H_s psih)
/// so the round trip is exact to roundoff; the identity psih = dy^{-1} hh is
/// a checked property rather than an input.
PrimitiveFields from_good_unknowns(const GoodUnknowns& gu, const ShearProfile& p,
                                   double eps);

/// Coefficient fields of the transformed per-mode system, sampled at the
/// grid's Y values. Matrices are diagonal except A_U whose only nonzero
/// entry is (1,2); D vectors have only a first component.
struct CoefficientFields {
  RealField A12;
  RealField B11, B22;
  RealField CU11, CU22;
  RealField CH11, CH22;
  RealField DU1, DH1;

  CoefficientFields(GridPtr g)
      : A12(g), B11(g), B22(g), CU11(g), CU22(g), CH11(g), CH22(g), DU1(g), DH1(g) {}
};

CoefficientFields build_coefficients(const ShearProfile& p, double eps, double mu,
                                     double kappa, GridPtr grid);

/// Transformed source R_n = (R_U, R_H) built from a mode forcing.
struct TransformedSource {
  ComplexField Ru1, Ru2, Rh1, Rh2;
  TransformedSource(GridPtr g) : Ru1(g), Ru2(g), Rh1(g), Rh2(g) {}

  double l2() const;
  double weighted_l2(const RealField& z) const;
};

TransformedSource transformed_source(const ModeForcing& mf, const ShearProfile& p,
                                     double eps, double mu, double kappa);

struct TransformedResidual {
  double eq_u = 0.0;  // velocity-block vector equation, relative
  double eq_h = 0.0;  // induction-block vector equation, relative
  double max_residual = 0.0;
};

/// Evaluate both vector equations of the transformed system on good unknowns
/// obtained from a solved mode; validates the coefficient algebra against
/// the primitive solve. Derivatives of the good unknowns are expanded by the
/// chain rule through the solved stream-function and vorticity unknowns, so
/// only single-level discrete derivatives appear (nesting them loses
/// consistency at the one-sided boundary stencils).
TransformedResidual transformed_residual(const GoodUnknowns& gu, const CoefficientFields& cf,
                                         const ModeSolution& ms,
                                         const TransformedSource& src,
                                         const ShearProfile& p, double eps, double mu,
                                         double kappa);

/// Both directions of the four norm equivalences between W_n and the good
/// unknowns; each forward*backward product must stay bounded.
struct EquivalencePair {
  double forward = 0.0;   // |W| / |What|
  double backward = 0.0;  // |What| / |W|
};
struct EquivalenceReport {
  EquivalencePair sup;          // L^inf norms
  EquivalencePair weighted;     // ||Z^{1/2} W|| + eps^{1/4} ||W||
  EquivalencePair h1;           // ||W|| + eps^{1/2} ||dy W||
  EquivalencePair weighted_h1;  // ||W|| + eps^{1/4} ||Z^{1/2}(dy W, nt W)||
  double max_constant = 0.0;
};
EquivalenceReport norm_equivalence_report(const ModeSolution& ms, const GoodUnknowns& gu,
                                          const WeightFunction& w, double eps);

/// Measured constants of the O(1) coefficient bounds (dense Y sampling):
///   (1+Y)(|A_U|+|B_U|)        <= c_ab * Mbar
///   (1+Y)(|C|) + (1+Y)^2 |D|  <= c_cd * Mbar (1 + Mbar)
struct CoefficientBoundReport {
  double c_ab = 0.0;
  double c_cd = 0.0;
  bool finite = true;
};
CoefficientBoundReport check_coefficient_bounds(const ShearProfile& p, double eps, double mu,
                                                double kappa);

/// Measured constant of ||R_n|| + eps^{-1/4}||Z^{1/2}R_n|| <=
/// c (1+Mbar) (||(f,q)|| + eps^{-1/4}||Z^{1/2}(f,q)||).
double measure_source_bound(const ModeForcing& mf, const TransformedSource& src,
                            const WeightFunction& w, double mbar);

}  // namespace mhdbl
