#include "colligo/numerics.hpp"

#include <gtest/gtest.h>

#include "colligo/colligation.hpp"

namespace colligo {
namespace {

MatrixXc Real(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXc m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index k = 0;
    for (double v : row) m(i, k++) = v;
    ++i;
  }
  return m;
}

// Random matrix of the given rank.
MatrixXc RandomOfRank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank,
                      Rng& rng) {
  return random_gaussian(rows, rank, rng) * random_gaussian(rank, cols, rng);
}

GTEST_TEST(OrthonormalRange, ZeroMatrixHasEmptyBasis) {
  const SubspaceC s = orthonormal_range(MatrixXc::Zero(3, 3));
  EXPECT_EQ(s.dim(), 0);
  EXPECT_EQ(s.ambient_dim, 3);
}

GTEST_TEST(OrthonormalRange, IdentitySpansEverything) {
  const SubspaceC s = orthonormal_range(MatrixXc::Identity(3, 3));
  EXPECT_EQ(s.dim(), 3);
  EXPECT_LE(op_norm(s.projector() - MatrixXc::Identity(3, 3)), 1e-12);
}

GTEST_TEST(OrthonormalRange, RankOneHandExample) {
  const SubspaceC s = orthonormal_range(Real({{1, 2}, {2, 4}}));
  ASSERT_EQ(s.dim(), 1);
  // Phase normalization makes the largest entry real and positive.
  VectorXc expected(2);
  expected << 1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0);
  EXPECT_LE((s.basis.col(0) - expected).norm(), 1e-12);
}

GTEST_TEST(NullSpace, HandExamples) {
  EXPECT_EQ(null_space(MatrixXc::Identity(2, 2)).dim(), 0);
  EXPECT_EQ(null_space(MatrixXc::Zero(2, 2)).dim(), 2);

  const SubspaceC s = null_space(Real({{0, 1}}));
  ASSERT_EQ(s.dim(), 1);
  EXPECT_NEAR(std::abs(s.basis(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.basis(1, 0)), 0.0, 1e-12);
}

GTEST_TEST(RangeNullSpace, RankNullityAndOrthonormality) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index rows = 1 + trial % 5, cols = 1 + (trial / 5) % 6;
    const Eigen::Index rank = trial % (std::min(rows, cols) + 1);
    const MatrixXc m = RandomOfRank(rows, cols, rank, rng);
    const SubspaceC range = orthonormal_range(m);
    const SubspaceC kernel = null_space(m);
    EXPECT_EQ(range.dim(), rank);
    EXPECT_EQ(range.dim() + kernel.dim(), cols);
    EXPECT_LE(isometry_defect(range.basis), 1e-12);
    EXPECT_LE(isometry_defect(kernel.basis), 1e-12);
    if (!kernel.empty()) {
      EXPECT_LE(op_norm(m * kernel.basis), 1e-10 * (1 + op_norm(m)));
    }
  }
}

GTEST_TEST(RelativeRankCutoff, ScaleInvariant) {
  Rng rng(3);
  const MatrixXc m = RandomOfRank(4, 4, 2, rng);
  for (double scale : {1e-8, 1.0, 1e8}) {
    EXPECT_EQ(orthonormal_range(MatrixXc(scale * m)).dim(), 2) << scale;
  }
}

GTEST_TEST(PsdSqrt, HandExamples) {
  EXPECT_LE(op_norm(psd_sqrt(MatrixXc::Identity(3, 3)) - MatrixXc::Identity(3, 3)),
            1e-14);
  EXPECT_LE(op_norm(psd_sqrt(Real({{4, 0}, {0, 9}})) - Real({{2, 0}, {0, 3}})), 1e-14);
  EXPECT_LE(op_norm(psd_sqrt(MatrixXc::Zero(2, 2))), 1e-14);
}

GTEST_TEST(PsdSqrt, RejectsIndefinite) {
  try {
    psd_sqrt(Real({{1, 0}, {0, -0.5}}));
    FAIL() << "expected NotPSD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPSD);
  }
}

GTEST_TEST(PsdSqrt, ClampsRoundoffNegatives) {
  const MatrixXc h = Real({{1, 0}, {0, -1e-13}});
  const MatrixXc r = psd_sqrt(h);
  EXPECT_LE(std::abs(r(1, 1)), 1e-14);
  EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-14);
}

GTEST_TEST(PsdSqrt, SquaresBackOnWellConditionedInputs) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    const MatrixXc q = random_unitary(n, rng);
    Eigen::VectorXd lambda(n);
    std::uniform_real_distribution<double> exponent(-8, 0);
    for (Eigen::Index i = 0; i < n; ++i) lambda(i) = std::pow(10.0, exponent(rng));
    lambda(0) = 1.0;
    const MatrixXc h = q * lambda.cast<cplx>().asDiagonal() * q.adjoint();
    const MatrixXc r = psd_sqrt(h);
    EXPECT_LE(op_norm(r * r - h), 1e-10);
    EXPECT_LE(op_norm(r - r.adjoint()), 1e-14);
  }
}

GTEST_TEST(RestrictedSolve, HandExamples) {
  Rng rng(2);
  const MatrixXc t = random_gaussian(2, 3, rng);
  EXPECT_LE(op_norm(restricted_solve(MatrixXc::Identity(3, 3), t) - t), 1e-12);

  EXPECT_LE(op_norm(restricted_solve(MatrixXc::Zero(2, 2), MatrixXc::Zero(1, 2))), 0.0);

  const MatrixXc g = restricted_solve(Real({{1, 0}, {0, 0}}), Real({{1, 0}}));
  EXPECT_LE(op_norm(g - Real({{1, 0}})), 1e-14);
}

GTEST_TEST(RestrictedSolve, ConsistentInputsReproduce) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const MatrixXc s = RandomOfRank(5, 7, 1 + trial % 4, rng);
    const MatrixXc t = random_gaussian(3, 5, rng) * s;
    const MatrixXc g = restricted_solve(s, t);
    EXPECT_LE(op_norm(g * s - t), 1e-10 * (1 + op_norm(t)));
    // G vanishes off ran(s).
    const SubspaceC perp = orthogonal_complement(orthonormal_range(s));
    if (!perp.empty()) {
      EXPECT_LE(op_norm(g * perp.basis), 1e-10 * (1 + op_norm(g)));
    }
  }
}

GTEST_TEST(RestrictedSolve, InconsistentRaises) {
  // s has a repeated column, t disagrees on it.
  const MatrixXc s = Real({{1, 1}, {0, 0}});
  const MatrixXc t = Real({{1, 2}});
  try {
    restricted_solve(s, t);
    FAIL() << "expected Inconsistent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Inconsistent);
  }
}

GTEST_TEST(NearestUnitary, HandExamples) {
  EXPECT_LE(op_norm(nearest_unitary(Real({{2, 0}, {0, 0.5}})) - MatrixXc::Identity(2, 2)),
            1e-14);
  try {
    nearest_unitary(Real({{1, 0}, {0, 0}}));
    FAIL() << "expected Singular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

GTEST_TEST(NearestUnitary, RecoversPolarFactor) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 5;
    const MatrixXc u = random_unitary(n, rng);
    const MatrixXc g = random_gaussian(n, n, rng);
    const MatrixXc p = g.adjoint() * g + 0.1 * MatrixXc::Identity(n, n);
    EXPECT_LE(op_norm(nearest_unitary(MatrixXc(u * p)) - u), 1e-10);
    // Idempotent on unitaries.
    EXPECT_LE(op_norm(nearest_unitary(u) - u), 1e-12);
  }
}

GTEST_TEST(SubspaceDistance, PrincipalAngles) {
  MatrixXc a(2, 1), b(2, 1);
  a << 1, 0;
  const double theta = 0.3;
  b << std::cos(theta), std::sin(theta);
  EXPECT_NEAR(subspace_distance(SubspaceC{2, a}, SubspaceC{2, b}), std::sin(theta),
              1e-14);
  EXPECT_EQ(subspace_distance(SubspaceC{2, a}, SubspaceC::whole(2)), 1.0);
}

GTEST_TEST(ComplementWithin, RemovesSubspace) {
  Rng rng(4);
  const SubspaceC all = orthonormal_range(random_gaussian(6, 4, rng));
  const SubspaceC part{6, all.basis.leftCols(1)};
  const SubspaceC rest = complement_within(all, part);
  EXPECT_EQ(rest.dim(), 3);
  EXPECT_LE(op_norm(part.basis.adjoint() * rest.basis), 1e-12);
  EXPECT_LE(op_norm(all.projector() * rest.basis - rest.basis), 1e-12);
}

GTEST_TEST(DiagonalLift, BlockStructure) {
  const MatrixXc g = Real({{1, 2}, {3, 4}, {5, 6}});
  const MatrixXc lifted = diagonal_lift(g, 2);
  ASSERT_EQ(lifted.rows(), 6);
  ASSERT_EQ(lifted.cols(), 4);
  EXPECT_EQ(lifted.topLeftCorner(3, 2), g);
  EXPECT_EQ(lifted.bottomRightCorner(3, 2), g);
  EXPECT_EQ(lifted.topRightCorner(3, 2), MatrixXc::Zero(3, 2));
}

GTEST_TEST(Templates, WorkForRealScalars) {
  const Eigen::MatrixXd m{{1, 2}, {2, 4}};
  EXPECT_EQ(orthonormal_range(m).dim(), 1);
  EXPECT_EQ(null_space(m).dim(), 1);
  const Eigen::MatrixXd r = psd_sqrt(Eigen::MatrixXd{{4, 0}, {0, 1}});
  EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
}

}  // namespace
}  // namespace colligo
