#pragma once

#include <string>
#include <vector>

#include "mhdbl/nonlinear.hpp"

namespace mhdbl {

/// Analytic forcing family or tabulated file, Q0 modes only.
struct ForcingSpec {
  std::string family = "gauss";  // gauss | off | tabulated
  double amplitude = 1.0;
  std::vector<int> modes = {1, 2};
  double center = 1.0;
  double width = 1.0;
  std::string path;  // tabulated input
};

/// Build the external mode forcing. The magnetic part comes from a stream
/// potential, so its compatibility condition holds by construction.
ExternalForcing make_forcing(const ForcingSpec& spec, GridPtr grid, double rho);

/// Scale so that ||F|| + eps^{-1/4}||Z^{1/2}F|| equals `target`.
void scale_forcing_to(ExternalForcing& fext, const WeightFunction& w, double rho,
                      double target);

}  // namespace mhdbl
