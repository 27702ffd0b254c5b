#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string_view>
#include <vector>

#include "colligo/numerics.hpp"

namespace colligo {

/// A point of C^d; a ball point when its Euclidean norm is below one.
using Point = VectorXc;

/// Exponent of a monomial z^alpha in d variables.
using MultiIndex = std::vector<int>;

/// Taylor coefficients keyed by multi-index.
using TaylorCoeffs = std::map<MultiIndex, MatrixXc>;

/// All multi-indices of total degree `degree` in `d` variables, in
/// lexicographically decreasing order ((k,0,..) first).
std::vector<MultiIndex> multi_indices_of_degree(int d, int degree);

/// Colligation U = [A B; C D] : X (+) U -> X^d (+) Y, stored blockwise.
///
/// A[j] is n x n, B[j] is n x p, C is q x n, D is q x p. The stacked operator
/// is (d*n + q) x (n + p). The state dimension n may be zero, in which case
/// the transfer function is the constant D.
struct Colligation {
  int d = 1;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::vector<MatrixXc> A;
  std::vector<MatrixXc> B;
  MatrixXc C;
  MatrixXc D;

  /// Throws DimensionMismatch unless every block has the declared size.
  void validate() const;

  MatrixXc stacked_A() const;  // dn x n
  MatrixXc stacked_B() const;  // dn x p
  MatrixXc op() const;         // (dn+q) x (n+p)

  static Colligation from_op(int d, Eigen::Index n, Eigen::Index p,
                             Eigen::Index q, const MatrixXc& u);
};

enum class Verdict { Unitary, Coisometric, Isometric, Contractive, None };

std::string_view to_string(Verdict v);

struct ColligationClass {
  Verdict verdict = Verdict::None;
  double coisometry_defect = 0;   // ||U U^* - I||
  double isometry_defect = 0;     // ||U^* U - I||
  double unitarity_defect = 0;    // max of the two above
  double contraction_excess = 0;  // max(0, ||U|| - 1)

  bool coisometric() const {
    return verdict == Verdict::Unitary || verdict == Verdict::Coisometric;
  }
  bool contractive() const { return verdict != Verdict::None; }
};

ColligationClass classify(const Colligation& u, double tol);

/// phi(z) = D + C (I - sum z_j A_j)^{-1} (sum z_j B_j).
MatrixXc eval_transfer(const Colligation& u, const Point& z);

/// Coefficients of the power series of the transfer function through
/// total degree `order`.
TaylorCoeffs taylor_coeffs(const Colligation& u, int order);

/// Coefficients Y_alpha (q x n) of the observability map
/// x -> C (I - ZA)^{-1} x, through total degree `order`.
TaylorCoeffs output_coeffs(const Colligation& u, int order);

/// Appends m_dim zero input columns: transfer function [phi(z) 0].
Colligation pad_input(const Colligation& u, Eigen::Index m_dim);

/// Seeded generator shared by every randomized construction.
using Rng = std::mt19937_64;

MatrixXc random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
MatrixXc random_unitary(Eigen::Index n, Rng& rng);

/// Random colligation of the requested class built by orthonormalizing a
/// seeded complex Gaussian matrix. Throws DimensionMismatch when the class is
/// infeasible for the dimensions.
Colligation random_colligation(int d, Eigen::Index n, Eigen::Index p,
                               Eigen::Index q, Verdict class_target,
                               std::uint64_t seed);

/// Coisometric functional model realization on a random backward-shift
/// invariant subspace of the vector-valued Drury-Arveson space.
///
/// The state space is spanned by kernel functions k(., lambda) y and, when
/// room permits, a degree-one polynomial together with its backward shifts.
/// The state coordinates are orthonormal in the Drury-Arveson norm, so
/// A_j is the compressed backward shift and C is evaluation at the origin.
/// Requires p >= (d - 1) n + q.
Colligation random_functional_model(int d, Eigen::Index n, Eigen::Index p,
                                    Eigen::Index q, std::uint64_t seed);

/// Colligation of psi(z) = beta phi(z) alpha^* whose state space is rotated by
/// `lambda`: blocks (L^d A L^*, L^d B a^*, b C L^*, b D a^*).
Colligation rotate(const Colligation& u, const MatrixXc& lambda,
                   const MatrixXc& alpha, const MatrixXc& beta);

namespace fixtures {

/// d = 1, A = 0, B = 1, C = 1, D = 0: phi(z) = z.
Colligation shift();
/// d = 1 permutation colligation realizing phi(z) = z^2.
Colligation z_squared();
/// d = 2 identity 3x3 with n = 1, p = 2, q = 1: phi(z) = [0, 1].
Colligation constant_row();
/// phi(z) = 2z; not Schur.
Colligation double_shift();
/// d = 2 scalar phi(z) = z_1.
Colligation coordinate_z1();
/// d = 2 scalar phi(z) = (z_1 + z_2)/sqrt(2).
Colligation coordinate_diagonal();
/// d = 1 colligation with a decoupled unobservable state.
Colligation unobservable();

}  // namespace fixtures

}  // namespace colligo
