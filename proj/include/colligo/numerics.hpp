#pragma once

// Rank-tolerant dense linear algebra shared by every other module.
//
// All routines are templated on the scalar type (real or complex) and work on
// dynamic Eigen matrices. Rank decisions are relative: a singular value is
// treated as zero when it is at most rank_tol * sigma_max.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "colligo/errors.hpp"

namespace colligo {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = Mat<cplx>;
using VectorXc = Vec<cplx>;

inline constexpr double kDefaultRankTol = 1e-9;

/// A subspace of an ambient coordinate space, stored as an orthonormal basis.
template <typename Scalar>
struct Subspace {
  Eigen::Index ambient_dim = 0;
  Mat<Scalar> basis;  // ambient_dim x dim, orthonormal columns

  Eigen::Index dim() const { return basis.cols(); }
  bool empty() const { return basis.cols() == 0; }

  Mat<Scalar> projector() const {
    if (empty()) return Mat<Scalar>::Zero(ambient_dim, ambient_dim);
    return basis * basis.adjoint();
  }

  static Subspace zero(Eigen::Index ambient) {
    return {ambient, Mat<Scalar>::Zero(ambient, 0)};
  }
  static Subspace whole(Eigen::Index ambient) {
    return {ambient, Mat<Scalar>::Identity(ambient, ambient)};
  }
};

using SubspaceC = Subspace<cplx>;

namespace internal {

template <typename Scalar>
typename Eigen::NumTraits<Scalar>::Real magnitude(const Scalar& s) {
  using std::abs;
  return abs(s);
}

// Rotates each column so that its largest-magnitude entry is real and
// positive. Makes bases reproducible independent of the SVD's phase choice.
template <typename Scalar>
void normalize_phases(Mat<Scalar>& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const double m = magnitude(basis(r, c));
      // Ties resolved toward the first index; 1e-12 keeps noise from flipping.
      if (m > best_mag + 1e-12) {
        best_mag = m;
        best = r;
      }
    }
    if (best_mag > 0) {
      const Scalar phase = basis(best, c) / Scalar(best_mag);
      basis.col(c) /= phase;
    }
  }
}

template <typename Scalar>
Eigen::Index numerical_rank(const Eigen::VectorXd& sv, double rank_tol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = rank_tol * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return r;
}

}  // namespace internal

/// Largest singular value; zero for empty matrices.
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Mat<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

/// Orthonormal basis for the numerical column space of m.
template <typename Derived>
Subspace<typename Derived::Scalar> orthonormal_range(
    const Eigen::MatrixBase<Derived>& m, double rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0 || m.cols() == 0) return Subspace<Scalar>::zero(m.rows());
  Eigen::JacobiSVD<Mat<Scalar>> svd(m.eval(), Eigen::ComputeThinU);
  const Eigen::Index r =
      internal::numerical_rank<Scalar>(svd.singularValues(), rank_tol);
  Mat<Scalar> basis = svd.matrixU().leftCols(r);
  internal::normalize_phases(basis);
  return {m.rows(), basis};
}

/// Orthonormal basis for the numerical kernel of m.
template <typename Derived>
Subspace<typename Derived::Scalar> null_space(
    const Eigen::MatrixBase<Derived>& m, double rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = m.cols();
  if (n == 0) return Subspace<Scalar>::zero(0);
  if (m.rows() == 0) return Subspace<Scalar>::whole(n);
  Eigen::JacobiSVD<Mat<Scalar>> svd(m.eval(), Eigen::ComputeFullV);
  const Eigen::Index r =
      internal::numerical_rank<Scalar>(svd.singularValues(), rank_tol);
  Mat<Scalar> basis = svd.matrixV().rightCols(n - r);
  internal::normalize_phases(basis);
  return {n, basis};
}

/// Orthonormal basis of `within` minus `removed` (both in the same ambient
/// space). Used for orthocomplements such as U0 minus ran(zeta).
template <typename Scalar>
Subspace<Scalar> complement_within(const Subspace<Scalar>& within,
                                   const Subspace<Scalar>& removed,
                                   double rank_tol = kDefaultRankTol) {
  if (within.empty()) return within;
  Mat<Scalar> residual = within.basis;
  if (!removed.empty()) {
    residual -= removed.basis * (removed.basis.adjoint() * within.basis);
  }
  // The residual of an orthonormal family has singular values in [0, 1], so
  // an absolute cutoff is the meaningful one here.
  Eigen::JacobiSVD<Mat<Scalar>> svd(residual, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > std::sqrt(rank_tol)) ++r;
  Mat<Scalar> basis = svd.matrixU().leftCols(r);
  internal::normalize_phases(basis);
  return {within.ambient_dim, basis};
}

template <typename Scalar>
Subspace<Scalar> orthogonal_complement(const Subspace<Scalar>& s,
                                       double rank_tol = kDefaultRankTol) {
  return complement_within(Subspace<Scalar>::whole(s.ambient_dim), s,
                           rank_tol);
}

/// Largest sine of the principal angles between two subspaces; 1 when the
/// dimensions differ.
template <typename Scalar>
double subspace_distance(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  if (a.dim() != b.dim() || a.ambient_dim != b.ambient_dim) return 1.0;
  if (a.empty()) return 0.0;
  const Mat<Scalar> off = a.basis - b.basis * (b.basis.adjoint() * a.basis);
  return op_norm(off);
}

/// Hermitian PSD square root. Eigenvalues within rank_tol * max(1, lambda_max)
/// of zero are clamped to zero; more negative eigenvalues raise NotPSD.
template <typename Derived>
Mat<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& h,
                                       double rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "psd_sqrt expects a square matrix");
  }
  if (h.rows() == 0) return Mat<Scalar>(0, 0);
  const Mat<Scalar> herm = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(herm);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -rank_tol * scale) {
    throw Error(ErrorCode::NotPSD,
                "minimum eigenvalue " + std::to_string(lambda.minCoeff()));
  }
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    lambda(i) = lambda(i) <= rank_tol * scale ? 0.0 : std::sqrt(lambda(i));
  }
  const Mat<Scalar>& v = eig.eigenvectors();
  Mat<Scalar> root = v * lambda.asDiagonal() * v.adjoint();
  return (root + root.adjoint()) / 2.0;
}

/// Moore-Penrose pseudoinverse with a relative singular value cutoff.
template <typename Derived>
Mat<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& s,
                                             double rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() == 0 || s.cols() == 0) return Mat<Scalar>::Zero(s.cols(), s.rows());
  Eigen::JacobiSVD<Mat<Scalar>> svd(s.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r =
      internal::numerical_rank<Scalar>(svd.singularValues(), rank_tol);
  const Eigen::VectorXd inv = svd.singularValues().head(r).cwiseInverse();
  return svd.matrixV().leftCols(r) * inv.asDiagonal() *
         svd.matrixU().leftCols(r).adjoint();
}

/// Solves G * s = t for an operator G defined only on ran(s): the returned G
/// vanishes on ran(s)^perp. Raises Inconsistent when t does not factor
/// through s, i.e. when ||G s - t|| > residual_tol * (1 + ||t||).
template <typename DerivedS, typename DerivedT>
Mat<typename DerivedS::Scalar> restricted_solve(
    const Eigen::MatrixBase<DerivedS>& s, const Eigen::MatrixBase<DerivedT>& t,
    double rank_tol = kDefaultRankTol, double residual_tol = 1e-8) {
  using Scalar = typename DerivedS::Scalar;
  if (s.cols() != t.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "restricted_solve: s and t must have the same column count");
  }
  Mat<Scalar> g = t * pseudo_inverse(s, rank_tol);
  if (t.size() > 0) {
    const double res = op_norm(g * s - t);
    const double scale = 1.0 + op_norm(t);
    if (res > residual_tol * scale) {
      throw Error(ErrorCode::Inconsistent,
                  "operator does not factor through its domain (residual " +
                      std::to_string(res) + ")");
    }
  }
  return g;
}

/// Polar factor of a square full-rank matrix: the unitary closest in
/// Frobenius norm.
template <typename Derived>
Mat<typename Derived::Scalar> nearest_unitary(const Eigen::MatrixBase<Derived>& m,
                                              double rank_tol = kDefaultRankTol) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "nearest_unitary expects a square matrix");
  }
  if (m.rows() == 0) return Mat<Scalar>(0, 0);
  Eigen::JacobiSVD<Mat<Scalar>> svd(m.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= rank_tol * sv(0)) {
    throw Error(ErrorCode::Singular, "nearest_unitary of a rank-deficient matrix");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// ||M^* M - I|| for a matrix expected to be an isometry.
template <typename Derived>
double isometry_defect(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.cols() == 0) return 0.0;
  return op_norm(m.adjoint() * m - Mat<Scalar>::Identity(m.cols(), m.cols()));
}

/// max(||M^* M - I||, ||M M^* - I||).
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return std::max(isometry_defect(m), isometry_defect(m.adjoint()));
}

/// Block-diagonal lift I_d (x) g acting on d stacked copies of a space.
template <typename Derived>
Mat<typename Derived::Scalar> diagonal_lift(const Eigen::MatrixBase<Derived>& g,
                                            int d) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> out = Mat<Scalar>::Zero(d * g.rows(), d * g.cols());
  for (int j = 0; j < d; ++j) {
    out.block(j * g.rows(), j * g.cols(), g.rows(), g.cols()) = g;
  }
  return out;
}

/// Block diagonal of two matrices.
template <typename DA, typename DB>
Mat<typename DA::Scalar> block_diag(const Eigen::MatrixBase<DA>& a,
                                    const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  Mat<Scalar> out = Mat<Scalar>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace colligo
