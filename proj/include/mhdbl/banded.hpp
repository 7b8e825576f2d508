#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhdbl {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Complex banded matrix in LAPACK general-band storage (column major,
/// kl extra super-rows reserved for partial-pivoting fill). Factor with
/// zgbtrf, solve with zgbtrs.
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  std::complex<double>& at(int i, int j);
  void add(int i, int j, std::complex<double> v) { at(i, j) += v; }

  /// Scale every row (and report the factors) so the largest entry per row
  /// has unit magnitude. Call before factor(); apply the factors to the rhs.
  std::vector<double> equilibrate_rows();

  void factor();  // throws SolverError (with condition estimate) when singular

  /// Back-substitution plus one step of iterative refinement against the
  /// retained unfactored band; keeps the solve linear in the rhs to near
  /// machine precision.
  void solve(std::span<std::complex<double>> rhs) const;
  void matvec(std::span<const std::complex<double>> x,
              std::span<std::complex<double>> y) const;
  double reciprocal_condition() const;  // valid after factor()

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<std::complex<double>> ab_;
  std::vector<std::complex<double>> orig_;  // pre-factor band for refinement
  std::vector<int> ipiv_;
  double anorm_ = 0.0;
  bool factored_ = false;
};

}  // namespace mhdbl
