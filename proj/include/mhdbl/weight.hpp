#pragma once

#include <string>
#include <vector>

#include "mhdbl/profile.hpp"

namespace mhdbl {

/// The weight construction could not satisfy its pointwise bounds.
class WeightConstructionError : public std::runtime_error {
 public:
  explicit WeightConstructionError(const std::string& what) : std::runtime_error(what) {}
};

/// Intrinsic degenerate weight Z(y): Z' = Gtilde with
///   Gtilde = 1/G_s(y/sqrt(eps)) on [0,1],
///   a C^1 cubic Hermite bridge on [1,3/2],
///   a monotone cubic down to 0 on [3/2,2], zero beyond.
/// Z is the exact antiderivative of the closed-form pieces, so
/// G_s * Z' == 1 holds to roundoff on [0,1] and Z is constant past 2.
class WeightFunction {
 public:
  static WeightFunction build(const ShearProfile& p, GridPtr grid);

  double z(double y) const;
  double zp(double y) const;   // Gtilde
  double zpp(double y) const;  // Gtilde'
  double zbar() const { return zbar_; }
  double eps() const { return eps_; }
  double c0() const { return c0_; }
  double mbar() const { return mbar_; }

  const RealField& z_field() const { return Z_; }
  const RealField& zp_field() const { return Zp_; }
  const RealField& zpp_field() const { return Zpp_; }
  const RealField& gtilde_field() const { return Zp_; }
  const GridPtr& grid() const { return grid_; }
  const ShearProfile& profile() const { return profile_; }

 private:
  WeightFunction(const ShearProfile& p, GridPtr grid);

  ShearProfile profile_;
  GridPtr grid_;
  double eps_ = 0.0;
  double mbar_ = 0.0;
  // bridge polynomial (coefficients in (y-1)) and decay value at 3/2
  std::array<double, 4> bridge_{};
  double bval_ = 0.0;  // Gtilde(3/2)
  double z_at_1_ = 0.0, z_at_32_ = 0.0, zbar_ = 0.0;
  double c0_ = 0.0;
  // fine antiderivative table of 1/G_s(y/sqrt(eps)) on [0,1]
  std::vector<double> ztab_;
  double ztab_h_ = 0.0;
  RealField Z_, Zp_, Zpp_;

  double z_inner(double y) const;  // Z on [0,1] from the table
  void measure_c0();
};

struct LemmaZItem {
  std::string name;
  double measured = 0.0;  // binding constant for this family
  bool pass = false;
};

struct LemmaZReport {
  std::vector<LemmaZItem> items;
  double c0 = 0.0;  // single constant binding all inequality families
  bool all_pass = false;
};

/// Machine-verify the pointwise weight bounds on a dense sample and return
/// the binding constant per inequality family plus one C0 covering all.
LemmaZReport check_lemma_z(const WeightFunction& w);

/// L2 interpolation defect: ||g|| / (2 sqrt(2 C0) ||Z^{1/2}g||^{2/3}
/// ||g'||^{1/3} + C0 ||Z^{1/2}g||). Must be <= 1; 0 for g == 0.
double interpolation_check(const ComplexField& g, const WeightFunction& w);

/// Weighted-Hardy ratio on (0,2):
/// ||Z^{-1/2} dy^{-1} h|| / ||Z^{1/2} |log Z|^{1+eta/3} h||.
double weighted_hardy_check(const ComplexField& h, const WeightFunction& w, double eta);

/// Log-weight bound ratio:
/// ||Z^{1/2}|log Z|^{1+eta/3} h|| /
///   (|log eps|^{1+eta/3} (||Z^{1/2}h|| + eps^{1/4+delta} ||h||)).
double log_weight_bound_check(const ComplexField& h, const WeightFunction& w, double eta,
                              double delta);

}  // namespace mhdbl
