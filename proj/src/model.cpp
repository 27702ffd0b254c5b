#include "colligo/model.hpp"

#include <algorithm>

#include "colligo/kernels.hpp"

namespace colligo {

namespace {

MatrixXc stack_rows(const TaylorCoeffs& coeffs, Eigen::Index rows_each,
                    Eigen::Index cols) {
  MatrixXc out(rows_each * static_cast<Eigen::Index>(coeffs.size()), cols);
  Eigen::Index r = 0;
  for (const auto& [alpha, c] : coeffs) {
    out.middleRows(r, rows_each) = c;
    r += rows_each;
  }
  return out;
}

// Residual of G s = t relative to 1 + ||t||.
double solve_residual(const MatrixXc& g, const MatrixXc& s, const MatrixXc& t) {
  if (t.size() == 0) return 0.0;
  return op_norm(g * s - t) / (1.0 + op_norm(t));
}

MatrixXc embed_dphi_y(const SubspaceC& d_phi, Eigen::Index q) {
  return block_diag(d_phi.basis, MatrixXc::Identity(q, q));
}

}  // namespace

FunctionalModelReport verify_functional_model(const Colligation& u, int order,
                                              double tol, double rank_tol) {
  u.validate();
  if (order < 1) throw Error(ErrorCode::InvalidInput, "order must be >= 1");
  const TaylorCoeffs y = output_coeffs(u, order);
  FunctionalModelReport report;
  const MatrixXc obs = stack_rows(y, u.q, u.n);
  report.observability_rank = u.n == 0 ? 0 : orthonormal_range(obs, rank_tol).dim();
  if (report.observability_rank < u.n) {
    throw Error(ErrorCode::NotObservable,
                "observability rank " + std::to_string(report.observability_rank) +
                    " < state dimension " + std::to_string(u.n));
  }
  // (M_{z_j}^* f)^_alpha = f^_{alpha + e_j} (alpha_j + 1) / (|alpha| + 1).
  for (int k = 0; k < order; ++k) {
    for (const MultiIndex& alpha : multi_indices_of_degree(u.d, k)) {
      for (int j = 0; j < u.d; ++j) {
        MultiIndex up = alpha;
        ++up[j];
        const double w = static_cast<double>(alpha[j] + 1) / (k + 1);
        const double res = op_norm(y.at(alpha) * u.A[j] - w * y.at(up));
        report.shift_residual = std::max(report.shift_residual, res);
      }
    }
  }
  report.coisometric = classify(u, tol).coisometric();
  report.passed = report.shift_residual <= tol;
  return report;
}

int kernel_space_order(const Colligation& u) {
  return std::max<int>(2, static_cast<int>(u.n) * u.d);
}

SubspaceC kernel_space(const Colligation& u, int order, double rank_tol) {
  u.validate();
  const TaylorCoeffs coeffs = taylor_coeffs(u, order);
  return null_space(stack_rows(coeffs, u.q, u.p), rank_tol);
}

ModelApparatus build_apparatus(const Colligation& u, const Tolerances& tol,
                               std::uint64_t seed) {
  u.validate();
  const Eigen::Index n = u.n, p = u.p, q = u.q;
  const Eigen::Index dn = u.d * n;
  ModelApparatus app;
  app.source = u;

  // Generators W^* g_{w,y} of D_phi and their images under R.
  Rng rng(seed);
  MatrixXc gens(dn, 0);
  MatrixXc images(p, 0);
  const MatrixXc d_star = u.D.adjoint();
  int stable = 0;
  Eigen::Index last_dim = -1;
  while (stable < 3) {
    if (static_cast<int>(app.samples.size()) >= tol.sample_budget) {
      throw Error(ErrorCode::SaturationFailure,
                  "D_phi still growing after " + std::to_string(tol.sample_budget) +
                      " sample points");
    }
    const Point w = sample_ball_points(u.d, 1, rng).front();
    app.samples.push_back(w);
    const MatrixXc g = kernel_state(u, w);
    MatrixXc block(dn, q);
    for (int j = 0; j < u.d; ++j) block.middleRows(j * n, n) = std::conj(w(j)) * g;
    gens.conservativeResize(Eigen::NoChange, gens.cols() + q);
    gens.rightCols(q) = block;
    images.conservativeResize(Eigen::NoChange, images.cols() + q);
    images.rightCols(q) = eval_transfer(u, w).adjoint() - d_star;

    const Eigen::Index dim = orthonormal_range(gens, tol.rank).dim();
    stable = dim == last_dim ? stable + 1 : 0;
    last_dim = dim;
  }
  app.d_phi = orthonormal_range(gens, tol.rank);
  app.d_phi_perp = orthogonal_complement(app.d_phi, tol.rank);

  app.R = restricted_solve(gens, images, tol.rank, tol.residual);
  app.residuals["R_solve"] = solve_residual(app.R, gens, images);

  const MatrixXc p_d = app.d_phi.projector();
  const MatrixXc p_perp = app.d_phi_perp.projector();
  const MatrixXc a_star = u.stacked_A().adjoint();  // n x dn

  app.T11 = a_star * p_perp;
  app.T12.resize(n, dn + q);
  app.T12 << a_star * p_d, u.C.adjoint();
  app.T22.resize(p, dn + q);
  app.T22 << app.R, d_star;

  // G1 (I - T12 T12^*)^{1/2} = T11^*.
  app.delta1 = psd_sqrt(MatrixXc::Identity(n, n) - app.T12 * app.T12.adjoint(), tol.rank);
  const MatrixXc t11_star = app.T11.adjoint();
  app.G1 = restricted_solve(app.delta1, t11_star, tol.rank, tol.residual);
  app.residuals["G1_solve"] = solve_residual(app.G1, app.delta1, t11_star);

  // G2 (I - T12^* T12)^{1/2} = T22 on D_phi (+) Y.
  const MatrixXc e = embed_dphi_y(app.d_phi, q);
  const MatrixXc t12c = app.T12 * e;
  const MatrixXc delta2c =
      psd_sqrt(MatrixXc::Identity(e.cols(), e.cols()) - t12c.adjoint() * t12c, tol.rank);
  const MatrixXc t22c = app.T22 * e;
  const MatrixXc g2c = restricted_solve(delta2c, t22c, tol.rank, tol.residual);
  app.residuals["G2_solve"] = solve_residual(g2c, delta2c, t22c);
  app.delta2 = e * delta2c * e.adjoint();
  app.G2 = g2c * e.adjoint();

  // Defect of G1^* on D_phi^perp.
  const MatrixXc& qp = app.d_phi_perp.basis;
  const MatrixXc g1c = qp.adjoint() * app.G1;
  const MatrixXc defect_c =
      psd_sqrt(MatrixXc::Identity(qp.cols(), qp.cols()) - g1c * g1c.adjoint(), tol.rank);
  app.defect1 = qp * defect_c * qp.adjoint();
  app.defect1_range = {dn, qp * orthonormal_range(defect_c, tol.rank).basis};

  app.U0 = kernel_space(u, kernel_space_order(u), tol.rank);

  const MatrixXc p_u0 = app.U0.projector();
  app.residuals["T22_in_U0"] = op_norm(p_u0 * app.T22);
  app.residuals["G2_in_U0"] = op_norm(p_u0 * app.G2);
  app.residuals["G1_excess"] = std::max(0.0, op_norm(app.G1) - 1.0);
  app.residuals["G2_excess"] = std::max(0.0, op_norm(app.G2) - 1.0);
  app.residuals["G1_range_in_Dperp"] = op_norm(p_d * app.G1);
  MatrixXc dq = u.C.adjoint() * u.C;
  for (int j = 0; j < u.d; ++j) dq += u.A[j].adjoint() * u.A[j];
  double dq_excess = 0.0;
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> eig(dq, Eigen::EigenvaluesOnly);
    dq_excess = std::max(0.0, eig.eigenvalues().maxCoeff() - 1.0);
  }
  app.residuals["difference_quotient"] = dq_excess;
  return app;
}

ParameterExtraction extract_parameter(const Colligation& u,
                                      const ModelApparatus& app,
                                      const Tolerances& tol) {
  const MatrixXc b_star = u.stacked_B().adjoint();  // p x dn
  if (b_star.rows() != app.R.rows() || b_star.cols() != app.R.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "apparatus built from another colligation");
  }
  ParameterExtraction out;
  const MatrixXc p_d = app.d_phi.projector();
  const MatrixXc p_perp = app.d_phi_perp.projector();
  out.r_residual = op_norm(b_star * p_d - app.R);
  if (out.r_residual > tol.residual * (1.0 + op_norm(app.R))) {
    throw Error(ErrorCode::Inconsistent, "B^* on D_phi differs from R");
  }
  const MatrixXc target = b_star * p_perp + app.G2 * app.T12.adjoint() * app.G1.adjoint();
  out.zeta = restricted_solve(app.defect1, target, tol.rank, tol.residual);
  out.solve_residual = solve_residual(out.zeta, app.defect1, target);

  const MatrixXc p_u0_perp =
      MatrixXc::Identity(u.p, u.p) - app.U0.projector();
  out.range_residual = op_norm(p_u0_perp * out.zeta);
  if (out.range_residual > tol.residual) {
    throw Error(ErrorCode::Inconsistent,
                "parameter leaves the kernel space (residual " +
                    std::to_string(out.range_residual) + ")");
  }
  const MatrixXc restricted = out.zeta * app.defect1_range.basis;
  if (op_norm(restricted) > 1.0 + tol.residual) {
    throw Error(ErrorCode::Inconsistent, "parameter is not a contraction");
  }
  out.isometry_defect = isometry_defect(restricted);
  out.isometric = out.isometry_defect <= tol.residual;
  return out;
}

MatrixXc build_xi_iso(const MatrixXc& xi, double tol) {
  if (op_norm(xi) > 1.0 + tol) {
    throw Error(ErrorCode::NotContraction, "xi has norm above one");
  }
  const Eigen::Index s = xi.cols();
  MatrixXc out(xi.rows() + s, s);
  out.topRows(xi.rows()) = xi;
  out.bottomRows(s) = psd_sqrt(MatrixXc::Identity(s, s) - xi.adjoint() * xi);
  return out;
}

namespace {

// B^* assembled from the apparatus: (-G2 T12^* G1^* + param * defect1) on
// D_phi^perp and R on D_phi.
MatrixXc model_b_star(const ModelApparatus& app, const MatrixXc& param) {
  return -app.G2 * app.T12.adjoint() * app.G1.adjoint() + param * app.defect1 + app.R;
}

Colligation with_b_star(const Colligation& u, const MatrixXc& b_star) {
  Colligation out = u;
  const MatrixXc b = b_star.adjoint();
  out.p = b.cols();
  for (int j = 0; j < u.d; ++j) out.B[j] = b.middleRows(j * u.n, u.n);
  return out;
}

}  // namespace

JReduction j_reduction(const Colligation& u, const ModelApparatus& app,
                       const ParameterExtraction& params, const Tolerances& tol) {
  const Eigen::Index p = u.p;
  const Eigen::Index dn = u.d * u.n;
  const MatrixXc& v = app.defect1_range.basis;
  const Eigen::Index s = v.cols();

  JReduction out;
  out.n_space_dim = p + s;
  out.defect_basis = v;
  out.xi_iso = build_xi_iso(params.zeta * v, tol.residual);

  const MatrixXc p0_perp = MatrixXc::Identity(p, p) - app.U0.projector();
  out.J = MatrixXc::Zero(p, p + s);
  out.J.leftCols(p) = p0_perp;

  // B^{phi_J *} = ([-J^* G2 T12^* G1^* + xi_iso defect1], J^* R).
  MatrixXc b_star(p + s, dn);
  b_star.topRows(p) =
      p0_perp * (-app.G2 * app.T12.adjoint() * app.G1.adjoint() + app.R) +
      params.zeta * app.defect1;
  b_star.bottomRows(s) = out.xi_iso.bottomRows(s) * v.adjoint() * app.defect1;

  out.reduced = with_b_star(u, b_star);
  out.reduced.D = u.D * out.J;
  return out;
}

std::map<std::string, double> reduction_identities(const ModelApparatus& app,
                                                   const ModelApparatus& reduced,
                                                   const MatrixXc& J) {
  const MatrixXc j_star = J.adjoint();
  return {
      {"T11", op_norm(reduced.T11 - app.T11)},
      {"T12", op_norm(reduced.T12 - app.T12)},
      {"T22", op_norm(reduced.T22 - j_star * app.T22)},
      {"G1", op_norm(reduced.G1 - app.G1)},
      {"G2", op_norm(reduced.G2 - j_star * app.G2)},
  };
}

Colligation scale_parameter(const Colligation& u, double factor,
                            const Tolerances& tol, std::uint64_t seed) {
  const ModelApparatus app = build_apparatus(u, tol, seed);
  const ParameterExtraction params = extract_parameter(u, app, tol);
  return with_b_star(u, model_b_star(app, factor * params.zeta));
}

}  // namespace colligo
