#include "mhdbl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace mhdbl {

namespace {

constexpr double kWallTol = 1e-12;

struct ConstantProfile final : ProfileEvaluator {
  double h_inf;
  explicit ConstantProfile(double h) : h_inf(h) {}
  double us(double, int) const override { return 0.0; }
  double hs(double, int k) const override { return k == 0 ? h_inf : 0.0; }
  double u_far() const override { return 0.0; }
  double h_far() const override { return h_inf; }
};

struct ExpApproachProfile final : ProfileEvaluator {
  double u_inf, h_inf, bump, u_off;
  ExpApproachProfile(double ui, double hi, double b, double uo)
      : u_inf(ui), h_inf(hi), bump(b), u_off(uo) {}
  // U_s = u_off + u_inf (1 - e^{-Y}),  H_s = h_inf + bump e^{-Y^2}
  double us(double Y, int k) const override {
    const double e = std::exp(-Y);
    switch (k) {
      case 0: return u_off + u_inf * (1.0 - e);
      case 1: return u_inf * e;
      case 2: return -u_inf * e;
      default: return u_inf * e;
    }
  }
  double hs(double Y, int k) const override {
    const double e = std::exp(-Y * Y);
    switch (k) {
      case 0: return h_inf + bump * e;
      case 1: return bump * (-2.0 * Y) * e;
      case 2: return bump * (4.0 * Y * Y - 2.0) * e;
      default: return bump * (12.0 * Y - 8.0 * Y * Y * Y) * e;
    }
  }
  double u_far() const override { return u_off + u_inf; }
  double h_far() const override { return h_inf; }
};

struct GaussBumpProfile final : ProfileEvaluator {
  double u_amp, h_inf, h_dip;
  GaussBumpProfile(double ua, double hi, double hd) : u_amp(ua), h_inf(hi), h_dip(hd) {}
  // U_s = u_amp Y e^{-Y^2},  H_s = h_inf - h_dip e^{-Y^2}
  double us(double Y, int k) const override {
    const double e = std::exp(-Y * Y);
    const double Y2 = Y * Y;
    switch (k) {
      case 0: return u_amp * Y * e;
      case 1: return u_amp * (1.0 - 2.0 * Y2) * e;
      case 2: return u_amp * (4.0 * Y2 * Y - 6.0 * Y) * e;
      default: return u_amp * (-8.0 * Y2 * Y2 + 24.0 * Y2 - 6.0) * e;
    }
  }
  double hs(double Y, int k) const override {
    const double e = std::exp(-Y * Y);
    switch (k) {
      case 0: return h_inf - h_dip * e;
      case 1: return h_dip * 2.0 * Y * e;
      case 2: return h_dip * (2.0 - 4.0 * Y * Y) * e;
      default: return h_dip * (8.0 * Y * Y * Y - 12.0 * Y) * e;
    }
  }
  double u_far() const override { return 0.0; }
  double h_far() const override { return h_inf; }
};

struct TanhProfile final : ProfileEvaluator {
  double u_inf, h_inf;
  TanhProfile(double ui, double hi) : u_inf(ui), h_inf(hi) {}
  double us(double Y, int k) const override {
    const double t = std::tanh(Y);
    const double s2 = 1.0 - t * t;  // sech^2
    switch (k) {
      case 0: return u_inf * t;
      case 1: return u_inf * s2;
      case 2: return -2.0 * u_inf * t * s2;
      default: return u_inf * s2 * (4.0 * t * t - 2.0 * s2);
    }
  }
  double hs(double, int k) const override { return k == 0 ? h_inf : 0.0; }
  double u_far() const override { return u_inf; }
  double h_far() const override { return h_inf; }
};

struct TabulatedProfile final : ProfileEvaluator {
  std::vector<double> Y;
  std::array<std::vector<double>, 4> ucols;  // U_s, dU, d2U, d3U
  std::array<std::vector<double>, 4> hcols;
  double UE = 0.0, HE = 0.0;

  double interp(const std::vector<double>& v, double Yq) const {
    if (Yq <= Y.front()) return v.front();
    if (Yq >= Y.back()) return v.back();
    const auto it = std::upper_bound(Y.begin(), Y.end(), Yq);
    const std::size_t j = static_cast<std::size_t>(it - Y.begin());
    const double t = (Yq - Y[j - 1]) / (Y[j] - Y[j - 1]);
    return (1.0 - t) * v[j - 1] + t * v[j];
  }
  double us(double Yq, int k) const override { return interp(ucols[k], Yq); }
  double hs(double Yq, int k) const override { return interp(hcols[k], Yq); }
  double u_far() const override { return UE; }
  double h_far() const override { return HE; }
};

double param_or(const std::vector<double>& p, std::size_t i, double dflt) {
  return i < p.size() ? p[i] : dflt;
}

}  // namespace

ShearProfile::ShearProfile(std::shared_ptr<const ProfileEvaluator> eval, GridPtr grid)
    : eval_(std::move(eval)),
      grid_(std::move(grid)),
      Us_(grid_),
      Hs_(grid_),
      Gs_(grid_),
      Ap_(grid_),
      Bp_(grid_) {
  if (std::abs(us(0.0)) > kWallTol)
    throw AssumptionError("(A1) violated: U_s(0) != 0");
  if (std::abs(hs(0.0, 1)) > kWallTol)
    throw AssumptionError("(A1) violated: H_s'(0) != 0");

  const double eps = grid_->eps();
  const double rt = std::sqrt(eps);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double Y = grid_->node(i) / rt;
    Us_[i] = us(Y);
    Hs_[i] = hs(Y);
    Gs_[i] = gs(Y);
    Ap_[i] = ap(Y);
    Bp_[i] = bp(Y);
  }

  // Structural constants by dense sampling plus the far-field limit.
  const double Ymax = std::max(50.0, 5.0 * grid_->y_max() / rt);
  const std::size_t nd = 100000;
  double g0 = eval_->h_far() * eval_->h_far() - eval_->u_far() * eval_->u_far();
  double g0loc = Ymax;
  double lo = std::abs(eval_->h_far());
  double hi = lo;
  std::array<double, 3> sup{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i <= nd; ++i) {
    const double Y = Ymax * static_cast<double>(i) / static_cast<double>(nd);
    const double G = gs(Y);
    if (G < g0) {
      g0 = G;
      g0loc = Y;
    }
    const double ah = std::abs(hs(Y));
    lo = std::min(lo, ah);
    hi = std::max(hi, ah);
    const double w = std::pow(1.0 + Y, 3);
    for (int k = 1; k <= 3; ++k)
      sup[k - 1] = std::max(sup[k - 1], w * (std::abs(us(Y, k)) + std::abs(hs(Y, k))));
  }
  gamma0_ = g0;
  gamma0_loc_ = g0loc;
  gamma_lo_ = lo;
  gamma_hi_ = hi;
  mbar_ = sup[0] + sup[1] + sup[2];
}

double ShearProfile::gs(double Y) const {
  const double U = us(Y), H = hs(Y);
  return H * H - U * U;
}

double ShearProfile::gs_prime(double Y) const {
  return 2.0 * (hs(Y) * hs(Y, 1) - us(Y) * us(Y, 1));
}

double ShearProfile::ap_prime(double Y) const {
  const double H = hs(Y);
  return (us(Y, 1) * H - us(Y) * hs(Y, 1)) / (H * H);
}

double ShearProfile::bp_prime(double Y) const {
  const double H = hs(Y);
  return (hs(Y, 2) * H - hs(Y, 1) * hs(Y, 1)) / (H * H);
}

double ShearProfile::ap_pp(double Y) const {
  const double H = hs(Y);
  return (us(Y, 2) - 2.0 * ap_prime(Y) * hs(Y, 1) - ap(Y) * hs(Y, 2)) / H;
}

double ShearProfile::ap_ppp(double Y) const {
  const double H = hs(Y);
  return (us(Y, 3) - 3.0 * ap_pp(Y) * hs(Y, 1) - 3.0 * ap_prime(Y) * hs(Y, 2) -
          ap(Y) * hs(Y, 3)) /
         H;
}

double ShearProfile::bp_pp(double Y) const {
  const double H = hs(Y);
  return (hs(Y, 3) - 2.0 * bp_prime(Y) * hs(Y, 1) - bp(Y) * hs(Y, 2)) / H;
}

RealField ShearProfile::sample(int which, int k) const {
  RealField out(grid_);
  const double rt = std::sqrt(grid_->eps());
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double Y = grid_->node(i) / rt;
    out[i] = which == 0 ? us(Y, k) : hs(Y, k);
  }
  return out;
}

ShearProfile build_profile(const std::string& family, const std::vector<double>& params,
                           GridPtr grid) {
  std::shared_ptr<const ProfileEvaluator> ev;
  if (family == "constant") {
    ev = std::make_shared<ConstantProfile>(param_or(params, 0, 1.0));
  } else if (family == "exp-approach") {
    ev = std::make_shared<ExpApproachProfile>(
        param_or(params, 0, 0.5), param_or(params, 1, 1.0), param_or(params, 2, 0.1),
        param_or(params, 3, 0.0));
  } else if (family == "gauss-bump") {
    ev = std::make_shared<GaussBumpProfile>(
        param_or(params, 0, 0.3), param_or(params, 1, 1.0), param_or(params, 2, 0.2));
  } else if (family == "tanh") {
    ev = std::make_shared<TanhProfile>(param_or(params, 0, 1.2), param_or(params, 1, 1.0));
  } else {
    throw std::invalid_argument("build_profile: unknown family '" + family + "'");
  }
  return ShearProfile(std::move(ev), std::move(grid));
}

ShearProfile build_profile_tabulated(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("tabulated profile: cannot open " + path);
  auto tab = std::make_shared<TabulatedProfile>();
  std::string line;
  bool have_far = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      if (hs >> tab->UE >> tab->HE) have_far = true;
      continue;
    }
    std::istringstream ls(line);
    double Y, U, H, flags;
    if (!(ls >> Y >> U >> H >> flags))
      throw std::invalid_argument("tabulated profile: malformed row");
    std::array<double, 6> d{};
    bool have_derivs = true;
    for (double& dv : d)
      if (!(ls >> dv)) {
        have_derivs = false;
        break;
      }
    if (!have_derivs)
      throw std::invalid_argument(
          "tabulated profile: derivative columns required (tables are not "
          "differentiated numerically)");
    tab->Y.push_back(Y);
    tab->ucols[0].push_back(U);
    tab->hcols[0].push_back(H);
    for (int k = 0; k < 3; ++k) {
      tab->ucols[k + 1].push_back(d[k]);
      tab->hcols[k + 1].push_back(d[k + 3]);
    }
  }
  if (!have_far) throw std::invalid_argument("tabulated profile: missing far-field header");
  if (tab->Y.size() < 2) throw std::invalid_argument("tabulated profile: too few rows");
  return ShearProfile(std::move(tab), std::move(grid));
}

ProfileReport validate_assumptions(const ShearProfile& p) {
  ProfileReport r;
  r.us_at_wall = p.us(0.0);
  r.dhs_at_wall = p.hs(0.0, 1);
  r.a1_pass = std::abs(r.us_at_wall) <= kWallTol && std::abs(r.dhs_at_wall) <= kWallTol;
  r.gamma_lo = p.gamma_lo();
  r.gamma_hi = p.gamma_hi();
  r.a2_pass = r.gamma_lo > 0.0 && std::isfinite(r.gamma_hi);
  r.mbar = p.mbar();
  r.a3_pass = std::isfinite(r.mbar);
  r.gamma0 = p.gamma0();
  r.gamma0_location = p.gamma0_location();
  r.a4_pass = r.gamma0 > 0.0;
  r.all_pass = r.a1_pass && r.a2_pass && r.a3_pass && r.a4_pass;
  return r;
}

}  // namespace mhdbl
