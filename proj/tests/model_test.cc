#include "colligo/model.hpp"

#include <gtest/gtest.h>

#include "colligo/kernels.hpp"

namespace colligo {
namespace {

const Tolerances kTol;

MatrixXc Row(std::initializer_list<cplx> entries) {
  MatrixXc m(1, entries.size());
  Eigen::Index k = 0;
  for (cplx c : entries) m(0, k++) = c;
  return m;
}

template <typename F>
void ExpectCode(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Functional models whose parameter has a nonzero defect range.
std::vector<Colligation> DefectModels(int count) {
  std::vector<Colligation> out;
  for (std::uint64_t seed = 0; static_cast<int>(out.size()) < count && seed < 200;
       ++seed) {
    Colligation u = random_functional_model(2, 3, 5, 2, seed);
    if (build_apparatus(u, kTol, seed).defect1_range.dim() > 0) out.push_back(u);
  }
  return out;
}

GTEST_TEST(KernelSpace, HandExamples) {
  EXPECT_EQ(kernel_space(fixtures::shift(), 4).dim(), 0);

  const SubspaceC row = kernel_space(fixtures::constant_row(), 4);
  ASSERT_EQ(row.dim(), 1);
  EXPECT_NEAR(std::abs(row.basis(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(row.basis(1, 0)), 0.0, 1e-14);
}

GTEST_TEST(KernelSpace, PaddingAddsExactlyThePadding) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Colligation u = random_functional_model(2, 2, 3, 1, seed);
    const int base = kernel_space(u, kernel_space_order(u)).dim();
    const Colligation v = pad_input(u, 3);
    EXPECT_EQ(kernel_space(v, kernel_space_order(v)).dim(), base + 3);
  }
}

GTEST_TEST(VerifyFunctionalModel, Fixtures) {
  const FunctionalModelReport shift = verify_functional_model(fixtures::shift(), 8, 1e-10);
  EXPECT_TRUE(shift.passed);
  EXPECT_LE(shift.shift_residual, 1e-14);

  EXPECT_TRUE(verify_functional_model(fixtures::z_squared(), 8, 1e-10).passed);

  ExpectCode(ErrorCode::NotObservable,
             [] { verify_functional_model(fixtures::unobservable(), 8, 1e-10); });
}

GTEST_TEST(VerifyFunctionalModel, RejectsNonCommutingRealizations) {
  // A random unitary colligation with d = 2 is almost never the backward shift.
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Colligation u = random_colligation(2, 2, 3, 1, Verdict::Unitary, seed);
    rejected += !verify_functional_model(u, 6, 1e-8).passed;
  }
  EXPECT_EQ(rejected, 5);
}

GTEST_TEST(VerifyFunctionalModel, DifferenceQuotientInequality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 1 + seed % 3;
    const Eigen::Index n = 1 + seed % 4;
    const Colligation u = random_functional_model(d, n, (d - 1) * n + 2, 1, seed);
    ASSERT_TRUE(verify_functional_model(u, 6, 1e-8).passed) << seed;
    const MatrixXc a = u.stacked_A();
    const MatrixXc excess =
        a.adjoint() * a + u.C.adjoint() * u.C - MatrixXc::Identity(u.n, u.n);
    EXPECT_LE(Eigen::SelfAdjointEigenSolver<MatrixXc>(excess).eigenvalues().maxCoeff(),
              1e-10);
  }
}

GTEST_TEST(BuildApparatus, ShiftByHand) {
  const ModelApparatus app = build_apparatus(fixtures::shift(), kTol, 1);
  EXPECT_EQ(app.d_phi.dim(), 1);
  EXPECT_EQ(app.d_phi_perp.dim(), 0);
  EXPECT_EQ(app.U0.dim(), 0);
  EXPECT_EQ(app.defect1_range.dim(), 0);
  EXPECT_LE(op_norm(app.R - MatrixXc::Ones(1, 1)), 1e-12);
  EXPECT_LE(op_norm(app.T12 - Row({0, 1})), 1e-12);
  EXPECT_LE(op_norm(app.T22 - Row({1, 0})), 1e-12);
  EXPECT_LE(op_norm(app.G2 - Row({1, 0})), 1e-12);
  EXPECT_LE(op_norm(app.T11), 1e-12);
  EXPECT_LE(op_norm(app.G1), 1e-12);
}

GTEST_TEST(BuildApparatus, NoStates) {
  Colligation u;
  u.d = 2;
  u.n = 0;
  u.p = 2;
  u.q = 1;
  u.A.assign(2, MatrixXc(0, 0));
  u.B.assign(2, MatrixXc(0, 2));
  u.C = MatrixXc(1, 0);
  u.D = Row({0.6, 0.8});
  const ModelApparatus app = build_apparatus(u, kTol, 1);
  EXPECT_EQ(app.d_phi.dim(), 0);
  EXPECT_EQ(app.T12.rows(), 0);
  ASSERT_EQ(app.T22.rows(), 2);
  ASSERT_EQ(app.T22.cols(), 1);
  EXPECT_LE(op_norm(app.T22 - u.D.adjoint()), 1e-14);
  EXPECT_EQ(app.U0.dim(), 1);
}

GTEST_TEST(BuildApparatus, InvariantsOnFunctionalModels) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int d = 1 + seed % 3;
    const Eigen::Index n = 1 + seed % 3;
    Colligation u = random_functional_model(d, n, (d - 1) * n + 1 + seed % 2, 1, seed);
    if (seed % 2 == 1) u = pad_input(u, 2);
    const ModelApparatus app = build_apparatus(u, kTol, seed);
    EXPECT_LE(app.d_phi.dim(), d * n);
    EXPECT_EQ(app.d_phi.dim() + app.d_phi_perp.dim(), d * n);
    // ran G2 and ran T22 lie in U0-perp.
    EXPECT_LE(op_norm(app.U0.basis.adjoint() * app.T22), 1e-9);
    EXPECT_LE(op_norm(app.U0.basis.adjoint() * app.G2), 1e-9);
    EXPECT_LE(op_norm(app.G1), 1 + 1e-9);
    EXPECT_LE(op_norm(app.G2), 1 + 1e-9);
    // T11 and T12 recombine to A^* and C^*.
    const MatrixXc a_star = u.stacked_A().adjoint();
    EXPECT_LE(op_norm(app.T11 + app.T12.leftCols(d * n) - a_star), 1e-10);
    EXPECT_LE(op_norm(app.T12.rightCols(u.q) - u.C.adjoint()), 1e-12);
  }
}

GTEST_TEST(ExtractParameter, ShiftHasEmptyParameter) {
  const Colligation u = fixtures::shift();
  const ModelApparatus app = build_apparatus(u, kTol, 1);
  const ParameterExtraction par = extract_parameter(u, app, kTol);
  EXPECT_LE(op_norm(par.zeta), 1e-14);
  EXPECT_LE(par.r_residual, 1e-14);
  EXPECT_TRUE(par.isometric);
}

GTEST_TEST(ExtractParameter, IsometricOnCoisometricModels) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Colligation u = random_functional_model(2, 2, 3 + seed % 2, 1, seed);
    const ModelApparatus app = build_apparatus(u, kTol, seed);
    const ParameterExtraction par = extract_parameter(u, app, kTol);
    EXPECT_TRUE(par.isometric) << seed;
    EXPECT_LE(par.range_residual, 1e-9);
  }
}

GTEST_TEST(ExtractParameter, CorruptedBIsInconsistent) {
  const std::vector<Colligation> models = DefectModels(3);
  ASSERT_FALSE(models.empty());
  for (Colligation u : models) {
    u.B[0](0, 0) += 0.1;
    const ModelApparatus app = build_apparatus(u, kTol, 3);
    ExpectCode(ErrorCode::Inconsistent, [&] { extract_parameter(u, app, kTol); });
  }
}

GTEST_TEST(BuildXiIso, HandExamples) {
  const MatrixXc zero = build_xi_iso(MatrixXc::Zero(1, 1));
  EXPECT_LE(op_norm(zero - MatrixXc(Row({0, 1}).transpose())), 1e-15);

  const MatrixXc six = build_xi_iso(MatrixXc::Constant(1, 1, 0.6));
  EXPECT_LE(op_norm(six - MatrixXc(Row({0.6, 0.8}).transpose())), 1e-15);

  // Isometric input has zero defect.
  Rng rng(1);
  const MatrixXc v = random_unitary(3, rng).leftCols(2);
  const MatrixXc iso = build_xi_iso(v);
  EXPECT_LE(op_norm(iso.topRows(3) - v), 1e-15);
  EXPECT_LE(op_norm(iso.bottomRows(2)), 1e-7);

  ExpectCode(ErrorCode::NotContraction, [] { build_xi_iso(MatrixXc::Constant(1, 1, 1.1)); });
}

GTEST_TEST(BuildXiIso, OutputIsIsometric) {
  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index k = 1 + trial % 4, s = 1 + trial % 3;
    MatrixXc xi = random_gaussian(k, s, rng);
    xi /= op_norm(xi) * (1.0 + 0.1 * (trial % 5));
    EXPECT_LE(isometry_defect(build_xi_iso(xi)), 1e-10);
  }
}

GTEST_TEST(JReduction, ShiftIsAFixedPoint) {
  const Colligation u = fixtures::shift();
  const ModelApparatus app = build_apparatus(u, kTol, 1);
  const JReduction red = j_reduction(u, app, extract_parameter(u, app, kTol), kTol);
  EXPECT_EQ(red.n_space_dim, 1);
  EXPECT_LE(op_norm(red.J - MatrixXc::Identity(1, 1)), 1e-14);
  EXPECT_LE(op_norm(red.reduced.op() - u.op()), 1e-12);
}

GTEST_TEST(JReduction, ConstantRowKillsKernelDirection) {
  const Colligation u = fixtures::constant_row();
  const ModelApparatus app = build_apparatus(u, kTol, 1);
  const JReduction red = j_reduction(u, app, extract_parameter(u, app, kTol), kTol);
  EXPECT_LE(red.J.col(0).norm(), 1e-14);
  Rng rng(2);
  const std::vector<Point> pts = sample_ball_points(2, 6, rng);
  for (const Point& z : pts) {
    EXPECT_LE(op_norm(eval_transfer(red.reduced, z) - eval_transfer(u, z) * red.J), 1e-12);
    EXPECT_LE(std::abs(eval_transfer(red.reduced, z)(0, 0)), 1e-12);
  }
  EXPECT_LE(op_norm(kphi_gram(red.reduced, pts, {}, 1e-9).gram -
                    kphi_gram(u, pts, {}, 1e-9).gram),
            1e-10);
}

GTEST_TEST(JReduction, WeaklyCoisometricInstances) {
  const std::vector<Colligation> models = DefectModels(4);
  ASSERT_GE(models.size(), 2u);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::uint64_t seed = 70 + i;
    const Colligation u = scale_parameter(models[i], 0.5, kTol, seed);
    EXPECT_EQ(classify(u, 1e-8).verdict, Verdict::Contractive);

    const ModelApparatus app = build_apparatus(u, kTol, seed);
    const ParameterExtraction par = extract_parameter(u, app, kTol);
    EXPECT_FALSE(par.isometric);
    const JReduction red = j_reduction(u, app, par, kTol);
    EXPECT_EQ(red.n_space_dim, u.p + app.defect1_range.dim());
    EXPECT_EQ(classify(red.reduced, 1e-8).verdict, Verdict::Coisometric);
    EXPECT_LE(isometry_defect(red.xi_iso), 1e-10);

    Rng rng(seed);
    const std::vector<Point> pts = sample_ball_points(u.d, 10, rng);
    EXPECT_LE(op_norm(kphi_gram(red.reduced, pts, {}, 1e-9).gram -
                      kphi_gram(u, pts, {}, 1e-9).gram),
              1e-10);
    for (const Point& z : pts) {
      EXPECT_LE(op_norm(eval_transfer(red.reduced, z) - eval_transfer(u, z) * red.J),
                1e-10);
    }

    const ModelApparatus rapp = build_apparatus(red.reduced, kTol, seed);
    for (const auto& [name, v] : reduction_identities(app, rapp, red.J)) {
      EXPECT_LE(v, 1e-9) << name;
    }
    EXPECT_EQ(rapp.U0.dim(), app.U0.dim() + app.defect1_range.dim());
  }
}

GTEST_TEST(ScaleParameter, KeepsTransferFunction) {
  const std::vector<Colligation> models = DefectModels(2);
  ASSERT_FALSE(models.empty());
  Rng rng(5);
  for (const Colligation& u : models) {
    for (double factor : {0.0, 0.4, 1.0}) {
      const Colligation v = scale_parameter(u, factor, kTol, 9);
      for (const Point& z : sample_ball_points(u.d, 5, rng)) {
        EXPECT_LE(op_norm(eval_transfer(v, z) - eval_transfer(u, z)), 1e-10);
      }
    }
  }
}

}  // namespace
}  // namespace colligo
