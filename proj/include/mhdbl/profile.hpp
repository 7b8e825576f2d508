#pragma once

#include <memory>
#include <string>

#include "mhdbl/grid.hpp"

namespace mhdbl {

/// A structural assumption on the background flow failed.
class AssumptionError : public std::runtime_error {
 public:
  explicit AssumptionError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed-form (or tabulated) background pair (U_s, H_s)(Y) with
/// Y-derivatives up to order 3 and far-field values.
class ProfileEvaluator {
 public:
  virtual ~ProfileEvaluator() = default;
  virtual double us(double Y, int k) const = 0;  // d^k/dY^k U_s
  virtual double hs(double Y, int k) const = 0;  // d^k/dY^k H_s
  virtual double u_far() const = 0;
  virtual double h_far() const = 0;
};

/// Background shear flow sampled on a grid, plus the structural constants
/// gamma0, Mbar and the |H_s| bounds obtained by dense sampling in Y.
class ShearProfile {
 public:
  ShearProfile(std::shared_ptr<const ProfileEvaluator> eval, GridPtr grid);

  double us(double Y, int k = 0) const { return eval_->us(Y, k); }
  double hs(double Y, int k = 0) const { return eval_->hs(Y, k); }
  double gs(double Y) const;        // H_s^2 - U_s^2
  double gs_prime(double Y) const;  // d/dY of gs
  double ap(double Y) const { return us(Y) / hs(Y); }
  double bp(double Y) const { return hs(Y, 1) / hs(Y); }
  // Y-derivatives of a_p and b_p by Leibniz on a_p H_s = U_s, b_p H_s = H_s'
  double ap_prime(double Y) const;
  double bp_prime(double Y) const;
  double ap_pp(double Y) const;
  double ap_ppp(double Y) const;
  double bp_pp(double Y) const;

  double u_far() const { return eval_->u_far(); }
  double h_far() const { return eval_->h_far(); }
  double gamma0() const { return gamma0_; }
  double gamma0_location() const { return gamma0_loc_; }
  double mbar() const { return mbar_; }
  double gamma_lo() const { return gamma_lo_; }
  double gamma_hi() const { return gamma_hi_; }

  const GridPtr& grid() const { return grid_; }
  double Yof(std::size_t i) const { return grid_->node(i) / std::sqrt(grid_->eps()); }

  // Samples at Y_i = y_i / sqrt(eps).
  const RealField& Us() const { return Us_; }
  const RealField& Hs() const { return Hs_; }
  const RealField& Gs() const { return Gs_; }
  const RealField& Ap() const { return Ap_; }
  const RealField& Bp() const { return Bp_; }
  RealField sample(int which, int k) const;  // which: 0 = U_s, 1 = H_s

 private:
  std::shared_ptr<const ProfileEvaluator> eval_;
  GridPtr grid_;
  RealField Us_, Hs_, Gs_, Ap_, Bp_;
  double gamma0_ = 0.0, gamma0_loc_ = 0.0, mbar_ = 0.0;
  double gamma_lo_ = 0.0, gamma_hi_ = 0.0;
};

struct ProfileReport {
  bool a1_pass = false, a2_pass = false, a3_pass = false, a4_pass = false;
  bool all_pass = false;
  double us_at_wall = 0.0;      // U_s(0)
  double dhs_at_wall = 0.0;     // H_s'(0)
  double gamma_lo = 0.0, gamma_hi = 0.0;
  double mbar = 0.0;
  double gamma0 = 0.0;
  double gamma0_location = 0.0;
};

/// Construct a built-in family. Families and parameter order:
///   constant     [h_inf]
///   exp-approach [u_inf, h_inf, bump, u_offset]
///   gauss-bump   [u_amp, h_inf, h_dip]
///   tanh         [u_inf, h_inf]
/// Missing parameters take documented defaults. Throws AssumptionError when
/// (A1) fails at the wall.
ShearProfile build_profile(const std::string& family, const std::vector<double>& params,
                           GridPtr grid);

/// Tabulated profile. Plain text, header "# U_E H_E", then rows with columns
///   Y U_s H_s flags [dUs d2Us d3Us dHs d2Hs d3Hs]
/// The derivative columns are mandatory: tables are never differentiated
/// numerically here.
ShearProfile build_profile_tabulated(const std::string& path, GridPtr grid);

ProfileReport validate_assumptions(const ShearProfile& p);

}  // namespace mhdbl
