#include "mhdbl/forcing.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mhdbl {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ExternalForcing make_forcing(const ForcingSpec& spec, GridPtr grid, double rho) {
  ExternalForcing fext;
  if (spec.family == "off") return fext;

  if (spec.family == "gauss") {
    for (int n : spec.modes) {
      if (n < 1) throw std::invalid_argument("forcing modes must be >= 1");
      ModeForcing mf(n, rho, grid);
      const double nt = static_cast<double>(n) / rho;
      const double an = spec.amplitude / n;
      const Complex cf1{1.0, 0.3}, cf2{0.5, -0.2}, cq{0.4, 0.25};
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const double y = grid->node(i);
        const double s = (y - spec.center) / spec.width;
        const double e = std::exp(-s * s);
        mf.f1[i] = an * cf1 * e;
        mf.f2[i] = an * cf2 * y * e;
        // magnetic source from the potential chi = y^2 e^{-s^2}
        const double chi = y * y * e;
        const double dchi = (2.0 * y - 2.0 * y * y * s / spec.width) * e;
        mf.q1[i] = an * cq * dchi;
        mf.q2[i] = -kI * nt * an * cq * chi;
      }
      fext.modes.emplace(n, std::move(mf));
    }
    return fext;
  }

  if (spec.family == "tabulated") {
    std::ifstream in(spec.path);
    if (!in) throw std::invalid_argument("forcing: cannot open " + spec.path);
    std::string line;
    std::map<int, std::size_t> row;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      int n;
      double y, a, b, c, d, e, f, g, h;
      if (!(ls >> n >> y >> a >> b >> c >> d >> e >> f >> g >> h))
        throw std::invalid_argument("forcing: malformed row");
      auto it = fext.modes.find(n);
      if (it == fext.modes.end())
        it = fext.modes.emplace(n, ModeForcing(n, rho, grid)).first;
      std::size_t& i = row[n];
      if (i >= grid->size()) throw std::invalid_argument("forcing: too many rows");
      if (std::abs(y - grid->node(i)) > 1e-9 * (1.0 + std::abs(y)))
        throw std::invalid_argument("forcing: node mismatch in tabulated input");
      it->second.f1[i] = {a, b};
      it->second.f2[i] = {c, d};
      it->second.q1[i] = {e, f};
      it->second.q2[i] = {g, h};
      ++i;
    }
    for (const auto& [n, cnt] : row)
      if (cnt != grid->size())
        throw std::invalid_argument("forcing: mode " + std::to_string(n) +
                                    " has wrong row count");
    return fext;
  }

  throw std::invalid_argument("forcing: unknown family '" + spec.family + "'");
}

void scale_forcing_to(ExternalForcing& fext, const WeightFunction& w, double rho,
                      double target) {
  const PairNorms pn = omega_forcing_norms(fext.modes, w.z_field(), rho);
  const double cur = pn.l2 + std::pow(w.eps(), -0.25) * pn.zl2;
  if (cur <= 0.0) return;
  const double s = target / cur;
  for (auto& [n, mf] : fext.modes) {
    (void)n;
    for (std::size_t i = 0; i < mf.f1.size(); ++i) {
      mf.f1[i] *= s;
      mf.f2[i] *= s;
      mf.q1[i] *= s;
      mf.q2[i] *= s;
    }
  }
}

}  // namespace mhdbl
