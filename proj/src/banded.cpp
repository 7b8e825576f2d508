#include "mhdbl/banded.hpp"

#include <algorithm>
#include <cmath>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace mhdbl {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, {0.0, 0.0});
  ipiv_.assign(n_, 0);
}

std::complex<double>& BandedMatrix::at(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || j - i > ku_ || i - j > kl_)
    throw std::out_of_range("BandedMatrix::at outside band");
  return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

std::vector<double> BandedMatrix::equilibrate_rows() {
  std::vector<double> scale(n_, 1.0);
  for (int i = 0; i < n_; ++i) {
    double m = 0.0;
    const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j)
      m = std::max(m, std::abs(ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]));
    if (m > 0.0) {
      scale[i] = 1.0 / m;
      for (int j = j0; j <= j1; ++j)
        ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] *= scale[i];
    }
  }
  return scale;
}

void BandedMatrix::factor() {
  // 1-norm of A for the condition estimate.
  anorm_ = 0.0;
  for (int j = 0; j < n_; ++j) {
    double col = 0.0;
    const int i0 = std::max(0, j - ku_), i1 = std::min(n_ - 1, j + kl_);
    for (int i = i0; i <= i1; ++i)
      col += std::abs(ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]);
    anorm_ = std::max(anorm_, col);
  }
  orig_ = ab_;
  const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_,
                                  ipiv_.data());
  if (info != 0) {
    factored_ = (info > 0);
    const double rc = factored_ ? 0.0 : -1.0;
    throw SolverError("banded factorization failed (info=" + std::to_string(info) +
                      ", rcond=" + std::to_string(rc) + ")");
  }
  factored_ = true;
}

void BandedMatrix::matvec(std::span<const std::complex<double>> x,
                          std::span<std::complex<double>> y) const {
  for (int i = 0; i < n_; ++i) {
    std::complex<double> acc{};
    const int j0 = std::max(0, i - kl_), j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j)
      acc += orig_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] * x[j];
    y[i] = acc;
  }
}

void BandedMatrix::solve(std::span<std::complex<double>> rhs) const {
  if (!factored_) throw SolverError("BandedMatrix::solve before factor");
  if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("rhs size mismatch");
  std::vector<std::complex<double>> b(rhs.begin(), rhs.end());
  int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                            ipiv_.data(), rhs.data(), n_);
  if (info != 0) throw SolverError("banded solve failed (info=" + std::to_string(info) + ")");
  std::vector<std::complex<double>> r(n_);
  matvec(rhs, r);
  for (int i = 0; i < n_; ++i) r[i] = b[i] - r[i];
  info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ldab_,
                        ipiv_.data(), r.data(), n_);
  if (info != 0) throw SolverError("banded refinement failed");
  for (int i = 0; i < n_; ++i) rhs[i] += r[i];
}

double BandedMatrix::reciprocal_condition() const {
  if (!factored_) throw SolverError("reciprocal_condition before factor");
  double rcond = 0.0;
  const int info = LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_,
                                  const_cast<std::complex<double>*>(ab_.data()), ldab_,
                                  const_cast<int*>(ipiv_.data()), anorm_, &rcond);
  if (info != 0) throw SolverError("condition estimate failed");
  return rcond;
}

}  // namespace mhdbl
