#pragma once

#include "mhdbl/linear.hpp"

namespace mhdbl {

/// Manufactured mode fields (polynomial-times-Gaussian stream functions
/// satisfying all wall conditions, decayed to roundoff at y_max) and the
/// forcing obtained by applying the continuous per-mode operator to them.
struct ManufacturedMode {
  ComplexField u, v, h, g, p;
  ModeForcing forcing;

  ManufacturedMode(int n, double rho, GridPtr gr)
      : u(gr), v(gr), h(gr), g(gr), p(gr), forcing(n, rho, gr) {}
};

ManufacturedMode manufactured_mode(int n, const LinearContext& ctx);

/// Relative L2 errors of a solved mode against the manufactured fields.
struct MmsError {
  double u = 0.0, v = 0.0, h = 0.0, g = 0.0;
  double max_error = 0.0;
};
MmsError mms_error(const ModeSolution& ms, const ManufacturedMode& ex);

}  // namespace mhdbl
