#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "corex/common.hpp"

namespace corex {

// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending, eigenvector
// k in column k of eigenvectors.
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
  Matrix apply(const std::function<Real(Real)>& f) const;
};

// Decomposes m, enforcing Hermiticity within hermitian_tol (entrywise, on the
// skew part). Throws NotHermitian or NoConvergence.
SpectralDecomposition eig_hermitian(const Matrix& m, Real hermitian_tol = tol::kHermitian);

// Kronecker product with the first factor on the slow axis:
// out(i_a*rows_b + i_b, j_a*cols_b + j_b) = a(i_a, j_a) * b(i_b, j_b).
// Throws DimensionOverflow when an output side would exceed dim_cap.
Matrix tensor(const Matrix& a, const Matrix& b, Index dim_cap = Caps{}.tensor_dim);
Vector tensor(const Vector& a, const Vector& b, Index dim_cap = Caps{}.tensor_dim);

// Traces out every subsystem not listed in keep. dims lists the subsystem
// dimensions, slowest axis first; keep must be strictly increasing indices
// into dims. The kept subsystems stay in their original order.
Matrix partial_trace(const Matrix& joint, const std::vector<Index>& dims,
                     const std::vector<int>& keep);

// Sum of absolute eigenvalues. Hermitian input only.
Real trace_norm(const Matrix& m, Real hermitian_tol = tol::kHermitian);

// Eigenvalues of a Hermitian matrix, ascending, skipping the eigenvector
// computation. The skew check is relative to the largest entry magnitude.
RealVector eigenvalues_only(const Matrix& m, Real hermitian_tol = tol::kHermitian);

// V f(Lambda) V^dag. f is applied to every eigenvalue as is; callers that need
// support conventions use the helpers below. Throws DomainError if f returns a
// non-finite value at an eigenvalue above zero_clip.
Matrix spectral_apply(const Matrix& m, const std::function<Real(Real)>& f,
                      Real zero_clip = tol::kZeroClip);

// m^p on the support of m: eigenvalues at or below zero_clip map to 0 for
// every p (pseudo-inverse convention for p < 0), others to lambda^p.
// Eigenvalues are floored at 0 before the power.
Matrix matrix_power_psd(const Matrix& m, Real p, Real zero_clip = tol::kZeroClip);

// log2 on the support of m, 0 on the null space.
Matrix matrix_log2_psd(const Matrix& m, Real zero_clip = tol::kZeroClip);

// Consecutive eigenvalues closer than group_tol * max(1, |lambda_max|) fall in
// one group. Returns (representative value, eigenvector column indices) pairs,
// values ascending.
struct SpectralGroup {
  Real value;
  std::vector<Index> columns;
};
std::vector<SpectralGroup> group_spectrum(const SpectralDecomposition& eig,
                                          Real group_tol = tol::kPinchGroup);

// Projects rho onto the eigenspaces of sigma: sum_g P_g rho P_g with P_g the
// projector of eigenvalue group g of sigma.
Matrix pinch(const Matrix& sigma, const Matrix& rho, Real group_tol = tol::kPinchGroup);

}  // namespace corex
