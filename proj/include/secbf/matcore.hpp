#pragma once

// Dense Hermitian kernels shared by every solver. All functions are templated
// on the Eigen expression type so they accept blocks, products and maps, and
// work for any real or complex scalar (double, long double, ...).

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "secbf/types.hpp"

namespace secbf {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
template <typename Scalar>
struct HermitianEig {
  DenseVector<typename Eigen::NumTraits<Scalar>::Real> eigenvalues;
  DenseMatrix<Scalar> eigenvectors;
};

/// Ratio below which an eigenvalue counts as zero relative to the largest.
inline constexpr double kRankThreshold = 1e-9;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (!a.allFinite()) throw DataError(std::string(what) + ": non-finite entries");
}

}  // namespace detail

/// (A + A^H) / 2.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "hermitian_part");
  DenseMatrix<typename Derived::Scalar> out = a;
  return (out + out.adjoint()) / typename Derived::RealScalar(2);
}

template <typename Derived>
HermitianEig<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "hermitian_eig");
  detail::require_finite(a, "hermitian_eig");
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw SolverError("hermitian_eig: QL iteration failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename Derived>
typename Derived::RealScalar lambda_max(const Eigen::MatrixBase<Derived>& a) {
  return hermitian_eig(a).eigenvalues.maxCoeff();
}

template <typename Derived>
typename Derived::RealScalar lambda_min(const Eigen::MatrixBase<Derived>& a) {
  return hermitian_eig(a).eigenvalues.minCoeff();
}

/// Solves A X = B for Hermitian positive-definite A via Cholesky.
template <typename DerivedA, typename DerivedB>
DenseMatrix<typename DerivedA::Scalar> solve_hpd(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b) {
  detail::require_square(a, "solve_hpd");
  if (a.rows() != b.rows()) throw DimensionError("solve_hpd: row mismatch between A and B");
  detail::require_finite(a, "solve_hpd");
  detail::require_finite(b, "solve_hpd");
  using Scalar = typename DerivedA::Scalar;
  Eigen::LLT<DenseMatrix<Scalar>> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw SingularityError("solve_hpd: matrix is not positive definite");
  return llt.solve(DenseMatrix<Scalar>(b));
}

/// Inverse of a Hermitian positive-definite matrix, returned Hermitian.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> inverse_hpd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return hermitian_part(solve_hpd(a, DenseMatrix<Scalar>::Identity(a.rows(), a.rows())));
}

/// log det A in nats for A Hermitian positive definite.
template <typename Derived>
typename Derived::RealScalar logdet_hpd(const Eigen::MatrixBase<Derived>& a) {
  detail::require_square(a, "logdet_hpd");
  detail::require_finite(a, "logdet_hpd");
  using Scalar = typename Derived::Scalar;
  using Real = typename Derived::RealScalar;
  Eigen::LLT<DenseMatrix<Scalar>> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw SingularityError("logdet_hpd: matrix is not positive definite");
  Real sum(0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Real d = std::real(llt.matrixL()(i, i));
    if (!(d > Real(0))) throw SingularityError("logdet_hpd: matrix is not positive definite");
    sum += std::log(d);
  }
  return Real(2) * sum;
}

/// Unit vector minimising (u^H A u) / (u^H B u) and the minimal ratio.
template <typename Scalar>
struct RayleighMin {
  DenseVector<Scalar> vector;
  typename Eigen::NumTraits<Scalar>::Real ratio;
};

/// Smallest generalized eigenpair of the pencil (A, B) through Cholesky
/// whitening: with B = L L^H, solve the standard problem for L^{-1} A L^{-H}.
template <typename DerivedA, typename DerivedB>
RayleighMin<typename DerivedA::Scalar> min_rayleigh_vec(const Eigen::MatrixBase<DerivedA>& a,
                                                        const Eigen::MatrixBase<DerivedB>& b) {
  detail::require_square(a, "min_rayleigh_vec");
  detail::require_square(b, "min_rayleigh_vec");
  if (a.rows() != b.rows()) throw DimensionError("min_rayleigh_vec: pencil size mismatch");
  using Scalar = typename DerivedA::Scalar;
  Eigen::LLT<DenseMatrix<Scalar>> llt(hermitian_part(b));
  if (llt.info() != Eigen::Success) throw SingularityError("min_rayleigh_vec: B is not positive definite");
  const DenseMatrix<Scalar> l = llt.matrixL();
  DenseMatrix<Scalar> whitened = l.template triangularView<Eigen::Lower>().solve(hermitian_part(a));
  whitened = l.template triangularView<Eigen::Lower>().solve(whitened.adjoint().eval()).adjoint();
  const auto eig = hermitian_eig(whitened);
  DenseVector<Scalar> u =
      l.adjoint().template triangularView<Eigen::Upper>().solve(eig.eigenvectors.col(0).eval());
  u.normalize();
  return {u, eig.eigenvalues(0)};
}

/// Number of eigenvalues above kRankThreshold * lambda_max.
template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& a, double rel = kRankThreshold) {
  const auto ev = hermitian_eig(a).eigenvalues;
  const auto top = ev.cwiseAbs().maxCoeff();
  if (top == 0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel * top) ++r;
  return r;
}

/// Principal square root of a PSD matrix; negative eigenvalues are clipped.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& a) {
  const auto eig = hermitian_eig(a);
  const auto root = eig.eigenvalues.cwiseMax(0).cwiseSqrt().eval();
  return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Factor of a PSD matrix: returns F (n x n) with A = F F^H, columns scaled
/// eigenvectors in descending eigenvalue order.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> psd_factor(const Eigen::MatrixBase<Derived>& a) {
  const auto eig = hermitian_eig(a);
  const Eigen::Index n = a.rows();
  DenseMatrix<typename Derived::Scalar> f(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;
    using Real = typename Derived::RealScalar;
    using std::sqrt;
    f.col(k) = eig.eigenvectors.col(src) * sqrt(std::max(Real(eig.eigenvalues(src)), Real(0)));
  }
  return f;
}

/// Real trace of A B for Hermitian arguments (the Frobenius inner product).
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar trace_product(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  return std::real((a.transpose().cwiseProduct(b)).sum());
}

}  // namespace secbf
