#include "colligo/coincidence.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "colligo/kernels.hpp"

namespace colligo {

namespace {

constexpr int kCheckPoints = 20;

std::vector<Point> check_points(int d, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ball_points(d, kCheckPoints, rng);
}

double max_coeff_residual(const TaylorCoeffs& phi, const TaylorCoeffs& psi,
                          const MatrixXc& alpha, const MatrixXc& beta) {
  double res = 0;
  for (const auto& [gamma, c] : phi) {
    res = std::max(res, op_norm(beta * c - psi.at(gamma) * alpha));
  }
  return res;
}

MatrixXc projector_perp(const SubspaceC& s) {
  return MatrixXc::Identity(s.ambient_dim, s.ambient_dim) - s.projector();
}

// Column-major vec of beta (q x q) followed by alpha (p x p).
Eigen::VectorXcd pack(const MatrixXc& beta, const MatrixXc& alpha) {
  Eigen::VectorXcd x(beta.size() + alpha.size());
  x.head(beta.size()) = beta.reshaped();
  x.tail(alpha.size()) = alpha.reshaped();
  return x;
}

struct ModelData {
  ModelApparatus app;
  ParameterExtraction params;
  Eigen::Index zeta_rank = 0;
  Eigen::Index complement_dim() const { return app.U0.dim() - zeta_rank; }
};

ModelData model_data(const Colligation& u, const Tolerances& tol,
                     std::uint64_t seed) {
  ModelData m;
  m.app = build_apparatus(u, tol, seed);
  m.params = extract_parameter(u, m.app, tol);
  m.zeta_rank = orthonormal_range(m.params.zeta, tol.rank).dim();
  return m;
}

void require_functional_model(const Colligation& u, const Tolerances& tol,
                              const char* which) {
  const FunctionalModelReport r =
      verify_functional_model(u, tol.taylor_order, tol.residual, tol.rank);
  if (!r.passed) {
    throw Error(ErrorCode::Inconsistent,
                std::string(which) + " colligation is not a functional model");
  }
}

}  // namespace

std::string_view to_string(CoincidenceVerdict v) {
  switch (v) {
    case CoincidenceVerdict::Coincident: return "coincident";
    case CoincidenceVerdict::NotCoincident: return "not_coincident";
    case CoincidenceVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Side s) {
  return s == Side::First ? "first" : "second";
}

int exit_code(CoincidenceVerdict v) {
  switch (v) {
    case CoincidenceVerdict::Coincident: return 0;
    case CoincidenceVerdict::NotCoincident: return 1;
    case CoincidenceVerdict::Unknown: return 2;
  }
  return 2;
}

CoincidenceCheck verify_coincidence(const Colligation& phi, const Colligation& psi,
                                    const MatrixXc& alpha, const MatrixXc& beta,
                                    const std::vector<Point>& points, double tol,
                                    int order) {
  phi.validate();
  psi.validate();
  if (phi.d != psi.d || alpha.rows() != psi.p || alpha.cols() != phi.p ||
      beta.rows() != psi.q || beta.cols() != phi.q) {
    throw Error(ErrorCode::DimensionMismatch,
                "alpha must map U_phi to U_psi and beta Y_phi to Y_psi");
  }
  if (unitarity_defect(alpha) > tol) {
    throw Error(ErrorCode::NotUnitary, "alpha is not unitary");
  }
  if (unitarity_defect(beta) > tol) {
    throw Error(ErrorCode::NotUnitary, "beta is not unitary");
  }
  double res = max_coeff_residual(taylor_coeffs(phi, order),
                                  taylor_coeffs(psi, order), alpha, beta);
  for (const Point& z : points) {
    res = std::max(res, op_norm(beta * eval_transfer(phi, z) -
                                eval_transfer(psi, z) * alpha));
  }
  CoincidenceCheck out;
  out.witness = {alpha, beta, res};
  out.passed = res <= tol;
  return out;
}

SolveResult solve_coincidence(const Colligation& phi, const Colligation& psi,
                              const Tolerances& tol, int max_iter,
                              std::uint64_t seed) {
  phi.validate();
  psi.validate();
  SolveResult out;
  if (phi.d != psi.d || phi.p != psi.p || phi.q != psi.q) {
    out.verdict = CoincidenceVerdict::NotCoincident;
    out.reason = "dimensions differ";
    return out;
  }
  const Eigen::Index p = phi.p, q = phi.q;
  const std::vector<Point> points = check_points(phi.d, seed);

  // Unitary coincidence leaves the spectra of the block kernel matrices
  // unchanged; compare them on a few points first.
  try {
    const std::vector<Point> few(points.begin(), points.begin() + 6);
    const MatrixXc g1 = kphi_gram(phi, few, {}, tol.residual).gram;
    const MatrixXc g2 = kphi_gram(psi, few, {}, tol.residual).gram;
    const Eigen::VectorXd e1 = Eigen::SelfAdjointEigenSolver<MatrixXc>(g1).eigenvalues();
    const Eigen::VectorXd e2 = Eigen::SelfAdjointEigenSolver<MatrixXc>(g2).eigenvalues();
    const double scale = 1.0 + e1.cwiseAbs().maxCoeff();
    if ((e1 - e2).cwiseAbs().maxCoeff() > std::max(1e-6, 1e3 * tol.residual) * scale) {
      out.verdict = CoincidenceVerdict::NotCoincident;
      out.reason = "kernel Gram spectra differ";
      return out;
    }
  } catch (const Error&) {
    // A pole at a sample point; the coefficient test below still decides.
  }

  // beta phi_g - psi_g alpha = 0 for every coefficient, as a linear map on
  // (vec beta, vec alpha).
  const TaylorCoeffs cphi = taylor_coeffs(phi, tol.taylor_order);
  const TaylorCoeffs cpsi = taylor_coeffs(psi, tol.taylor_order);
  const Eigen::Index block = q * p;
  MatrixXc m(block * static_cast<Eigen::Index>(cphi.size()), q * q + p * p);
  const MatrixXc iq = MatrixXc::Identity(q, q), ip = MatrixXc::Identity(p, p);
  Eigen::Index r = 0;
  for (const auto& [gamma, c] : cphi) {
    m.block(r, 0, block, q * q) = Eigen::kroneckerProduct(c.transpose(), iq);
    m.block(r, q * q, block, p * p) = -Eigen::kroneckerProduct(ip, cpsi.at(gamma));
    r += block;
  }
  const SubspaceC sol = null_space(m, tol.rank);
  out.null_space_dim = sol.dim();
  if (sol.empty()) {
    out.verdict = CoincidenceVerdict::NotCoincident;
    out.reason = "coefficient constraints admit only the zero solution";
    return out;
  }
  const MatrixXc proj = sol.projector();

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  constexpr int kStarts = 8;
  for (int start = 0; start < kStarts; ++start) {
    MatrixXc beta = start == 0 ? iq : random_unitary(q, rng);
    MatrixXc alpha = start == 0 ? ip : random_unitary(p, rng);
    // Iterate well past the tolerance so the witness carries no visible
    // residual, then verify.
    double prev = std::numeric_limits<double>::infinity();
    double dist = prev;
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::VectorXcd x = pack(beta, alpha);
      const Eigen::VectorXcd y = proj * x;
      dist = (x - y).norm();
      if (dist <= 1e-4 * tol.residual) break;
      if (std::abs(prev - dist) <= 1e-15 * (1.0 + dist)) break;
      prev = dist;
      ++out.iterations;
      try {
        beta = nearest_unitary(y.head(q * q).reshaped(q, q).eval(), tol.rank);
        alpha = nearest_unitary(y.tail(p * p).reshaped(p, p).eval(), tol.rank);
      } catch (const Error&) {
        dist = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (dist <= tol.residual) {
      const CoincidenceCheck check = verify_coincidence(
          phi, psi, alpha, beta, points, tol.residual, tol.taylor_order);
      if (check.passed) {
        out.verdict = CoincidenceVerdict::Coincident;
        out.witness = check.witness;
        return out;
      }
    }
  }
  out.verdict = CoincidenceVerdict::Unknown;
  out.reason = "no unitary pair found in the solution space";
  return out;
}

GammaMap build_gamma(const Colligation& phi, const Colligation& psi,
                     const MatrixXc& beta, const Tolerances& tol,
                     std::uint64_t seed) {
  if (phi.d != psi.d || beta.rows() != psi.q || beta.cols() != phi.q) {
    throw Error(ErrorCode::DimensionMismatch, "beta must map Y_phi to Y_psi");
  }
  Rng rng(seed);
  std::vector<Point> points{Point::Zero(phi.d)};
  const std::vector<Point> more = sample_ball_points(phi.d, tol.sample_budget, rng);
  points.insert(points.end(), more.begin(), more.end());

  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  MatrixXc s(phi.n, m * phi.q), t(psi.n, m * phi.q);
  for (Eigen::Index i = 0; i < m; ++i) {
    s.middleCols(i * phi.q, phi.q) = kernel_state(phi, points[i]);
    t.middleCols(i * phi.q, phi.q) = kernel_state(psi, points[i]) * beta;
  }
  GammaMap out;
  out.gamma = restricted_solve(s, t, tol.rank, tol.residual);
  out.solve_residual = op_norm(out.gamma * s - t) / (1.0 + op_norm(t));
  const MatrixXc gs = s.adjoint() * s;
  out.gram_residual = op_norm(gs - t.adjoint() * t) / (1.0 + op_norm(gs));
  out.unitarity_defect = unitarity_defect(out.gamma);
  return out;
}

IntertwiningReport verify_intertwinings(const GammaMap& gamma,
                                        const ModelApparatus& app_phi,
                                        const ModelApparatus& app_psi,
                                        const MatrixXc& alpha,
                                        const MatrixXc& beta, double tol) {
  const Colligation& phi = app_phi.source;
  const Colligation& psi = app_psi.source;
  const MatrixXc& g = gamma.gamma;
  if (g.rows() != psi.n || g.cols() != phi.n) {
    throw Error(ErrorCode::DimensionMismatch, "Gamma must map X_phi to X_psi");
  }
  const MatrixXc gd = diagonal_lift(g, phi.d);
  const MatrixXc lift = block_diag(gd, beta);

  IntertwiningReport out;
  auto& res = out.residuals;
  double shift = 0;
  for (int j = 0; j < phi.d; ++j) {
    shift = std::max(shift, op_norm(g * phi.A[j] - psi.A[j] * g));
  }
  res["shift"] = shift;
  res["T11"] = op_norm(g * app_phi.T11 - app_psi.T11 * gd);
  res["T12"] = op_norm(g * app_phi.T12 - app_psi.T12 * lift);
  res["T22"] = op_norm(alpha * app_phi.T22 - app_psi.T22 * lift);
  res["G1"] = op_norm(gd * app_phi.G1 - app_psi.G1 * g);
  res["G2"] = op_norm(alpha * app_phi.G2 - app_psi.G2 * lift);
  res["defect"] = op_norm(gd * app_phi.defect1 - app_psi.defect1 * gd);
  res["G2T12G1"] = op_norm(
      alpha * app_phi.G2 * app_phi.T12.adjoint() * app_phi.G1.adjoint() -
      app_psi.G2 * app_psi.T12.adjoint() * app_psi.G1.adjoint() * gd);
  res["D_phi"] = subspace_distance(
      SubspaceC{gd.rows(), gd * app_phi.d_phi.basis}, app_psi.d_phi);
  res["defect_range"] = subspace_distance(
      SubspaceC{gd.rows(), gd * app_phi.defect1_range.basis},
      app_psi.defect1_range);
  res["gamma_unitary"] = gamma.unitarity_defect;
  out.passed = std::all_of(res.begin(), res.end(),
                           [tol](const auto& kv) { return kv.second <= tol; });
  return out;
}

UnitaryCheck verify_unitary_coincidence(const Colligation& first,
                                        const Colligation& second,
                                        const UnitaryCoincidenceWitness& w,
                                        double tol, std::uint64_t seed) {
  if (w.pad_dim < 0) throw Error(ErrorCode::InvalidInput, "negative pad_dim");
  const bool first_padded = w.padded_side == Side::First;
  const Colligation src = pad_input(first_padded ? first : second, w.pad_dim);
  const Colligation& tgt = first_padded ? second : first;
  if (src.d != tgt.d || w.Lambda.rows() != tgt.n || w.Lambda.cols() != src.n ||
      w.Omega1.rows() != tgt.p || w.Omega1.cols() != src.p ||
      w.Omega2.rows() != tgt.q || w.Omega2.cols() != src.q) {
    throw Error(ErrorCode::DimensionMismatch,
                "witness blocks do not match the colligations");
  }
  for (const MatrixXc* m : {&w.Lambda, &w.Omega1, &w.Omega2}) {
    if (unitarity_defect(*m) > tol) {
      throw Error(ErrorCode::NotUnitary, "witness block is not unitary");
    }
  }
  UnitaryCheck out;
  const MatrixXc left = block_diag(diagonal_lift(w.Lambda, src.d), w.Omega2);
  const MatrixXc right = block_diag(w.Lambda, w.Omega1);
  out.block_residual = op_norm(left * src.op() - tgt.op() * right);
  for (const Point& z : check_points(src.d, seed)) {
    out.transfer_residual =
        std::max(out.transfer_residual,
                 op_norm(w.Omega2 * eval_transfer(src, z) -
                         eval_transfer(tgt, z) * w.Omega1));
  }
  out.passed = out.block_residual <= tol && out.transfer_residual <= tol;
  return out;
}

Construction construct_unitary_coincidence(const Colligation& phi,
                                           const Colligation& psi,
                                           const MatrixXc& alpha,
                                           const MatrixXc& beta,
                                           const Tolerances& tol,
                                           std::uint64_t seed) {
  phi.validate();
  psi.validate();
  if (phi.d != psi.d || phi.q != psi.q) {
    throw Error(ErrorCode::DimensionMismatch, "colligations are not comparable");
  }
  if (!classify(phi, tol.residual).coisometric() ||
      !classify(psi, tol.residual).coisometric()) {
    throw Error(ErrorCode::NotCoisometric, "both colligations must be coisometric");
  }
  const Eigen::Index p_hat = std::max(phi.p, psi.p);
  const Colligation phi_hat = pad_input(phi, p_hat - phi.p);
  const Colligation psi_hat = pad_input(psi, p_hat - psi.p);
  const std::vector<Point> points = check_points(phi.d, seed);
  if (!verify_coincidence(phi_hat, psi_hat, alpha, beta, points, tol.residual,
                          tol.taylor_order)
           .passed) {
    throw Error(ErrorCode::Inconsistent, "(alpha, beta) is not a coincidence");
  }
  require_functional_model(phi, tol, "first");
  require_functional_model(psi, tol, "second");

  const ModelData mphi = model_data(phi, tol, seed);
  const ModelData mpsi = model_data(psi, tol, seed);
  if (mphi.complement_dim() > mpsi.complement_dim()) {
    Construction out = construct_unitary_coincidence(
        psi, phi, alpha.adjoint(), beta.adjoint(), tol, seed);
    out.witness.padded_side = Side::Second;
    out.gamma.gamma.adjointInPlace();
    std::swap(out.kernel_complement_first, out.kernel_complement_second);
    return out;
  }
  if (!mphi.params.isometric || !mpsi.params.isometric) {
    throw Error(ErrorCode::ParameterNotIsometric,
                "J-reduce before constructing a unitary coincidence");
  }
  const Eigen::Index pad = mpsi.complement_dim() - mphi.complement_dim();
  if (phi.p + pad != psi.p) {
    throw Error(ErrorCode::KernelDimMismatch,
                "kernel spaces are incompatible with the input dimensions");
  }

  Construction out;
  out.kernel_complement_first = mphi.complement_dim();
  out.kernel_complement_second = mpsi.complement_dim();
  out.gamma = build_gamma(phi, psi, beta, tol, seed);
  out.intertwinings = verify_intertwinings(out.gamma, mphi.app, mpsi.app,
                                           alpha.leftCols(phi.p),
                                           beta, tol.residual);
  if (!out.intertwinings.passed) {
    throw Error(ErrorCode::Inconsistent, "intertwining relations fail");
  }
  const MatrixXc gd = diagonal_lift(out.gamma.gamma, phi.d);

  // zeta^psi Gamma^d zeta^phi* relates the parameter ranges; any unitary
  // between the remaining parts of the kernel spaces completes it.
  const MatrixXc delta = mpsi.params.zeta * gd * mphi.params.zeta.adjoint();
  const SubspaceC ran_phi = orthonormal_range(mphi.params.zeta, tol.rank);
  const SubspaceC ran_psi = orthonormal_range(mpsi.params.zeta, tol.rank);
  const SubspaceC rest_phi = complement_within(mphi.app.U0, ran_phi, tol.rank);
  const SubspaceC rest_psi = complement_within(mpsi.app.U0, ran_psi, tol.rank);

  MatrixXc left = MatrixXc::Zero(psi.p, rest_phi.dim() + pad);
  left.topLeftCorner(phi.p, rest_phi.dim()) = rest_phi.basis;
  left.bottomRightCorner(pad, pad).setIdentity();
  if (left.cols() != rest_psi.dim()) {
    throw Error(ErrorCode::KernelDimMismatch, "kernel complements differ in dimension");
  }
  Rng rng(seed);
  const MatrixXc w = random_unitary(left.cols(), rng);

  MatrixXc perp = MatrixXc::Zero(psi.p, psi.p);
  perp.topLeftCorner(phi.p, phi.p) = projector_perp(mphi.app.U0);
  MatrixXc omega1 = alpha * perp + rest_psi.basis * w * left.adjoint();
  omega1.leftCols(phi.p) += delta;

  out.padded = pad_input(phi, pad);
  out.witness.Lambda = out.gamma.gamma;
  out.witness.Omega1 = omega1;
  out.witness.Omega2 = beta;
  out.witness.pad_dim = pad;
  out.witness.padded_side = Side::First;

  MatrixXc zeta_hat = MatrixXc::Zero(psi.p, gd.cols());
  zeta_hat.topRows(phi.p) = mphi.params.zeta;
  out.diagram_residual = op_norm(omega1 * zeta_hat - mpsi.params.zeta * gd);

  const UnitaryCheck check =
      verify_unitary_coincidence(phi, psi, out.witness, tol.residual, seed);
  out.witness.residual = std::max(check.block_residual, check.transfer_residual);
  if (!check.passed) {
    throw Error(ErrorCode::Inconsistent,
                "constructed unitary coincidence fails verification");
  }
  return out;
}

CoincidenceWitness coincidence_from_unitary(const Colligation& first,
                                            const Colligation& second,
                                            const UnitaryCoincidenceWitness& w,
                                            const MatrixXc& tau,
                                            const Tolerances& tol,
                                            std::uint64_t seed) {
  first.validate();
  second.validate();
  const Eigen::Index p_hat = std::max(first.p, second.p);
  const Colligation first_hat = pad_input(first, p_hat - first.p);
  const Colligation second_hat = pad_input(second, p_hat - second.p);
  const bool first_src = w.padded_side == Side::First;
  const Colligation& src = first_src ? first_hat : second_hat;
  const Colligation& tgt = first_src ? second_hat : first_hat;

  const SubspaceC u0_src = kernel_space(src, kernel_space_order(src), tol.rank);
  const SubspaceC u0_tgt = kernel_space(tgt, kernel_space_order(tgt), tol.rank);
  if (u0_src.dim() != u0_tgt.dim()) {
    throw Error(ErrorCode::KernelDimMismatch, "kernel spaces differ in dimension");
  }
  if (tau.rows() != u0_src.dim() || tau.cols() != u0_src.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "tau must be square on the kernel space");
  }
  if (w.Omega1.rows() < p_hat || w.Omega1.cols() < p_hat ||
      w.Omega2.rows() != tgt.q || w.Omega2.cols() != src.q) {
    throw Error(ErrorCode::DimensionMismatch, "witness blocks are too small");
  }
  const MatrixXc tau_src = first_src ? tau : MatrixXc(tau.adjoint());
  MatrixXc a = w.Omega1.topLeftCorner(p_hat, p_hat) * projector_perp(u0_src) +
               u0_tgt.basis * tau_src * u0_src.basis.adjoint();
  MatrixXc b = w.Omega2;
  if (!first_src) {
    a.adjointInPlace();
    b.adjointInPlace();
  }
  const CoincidenceCheck check =
      verify_coincidence(first_hat, second_hat, a, b, check_points(first.d, seed),
                         tol.residual, tol.taylor_order);
  if (!check.passed) {
    throw Error(ErrorCode::Inconsistent,
                "recovered pair fails the coincidence check");
  }
  return check.witness;
}

PipelineReport coincide_pipeline(const Colligation& phi, const Colligation& psi,
                                 const Tolerances& tol, std::uint64_t seed) {
  PipelineReport out;
  const SolveResult solved = solve_coincidence(phi, psi, tol, 200, seed);
  out.verdict = solved.verdict;
  out.reason = solved.reason;
  if (solved.verdict != CoincidenceVerdict::Coincident) return out;
  out.coincidence = solved.witness;
  const MatrixXc& alpha = solved.witness->alpha;
  const MatrixXc& beta = solved.witness->beta;

  require_functional_model(phi, tol, "first");
  require_functional_model(psi, tol, "second");
  const ModelData mphi = model_data(phi, tol, seed);
  const ModelData mpsi = model_data(psi, tol, seed);
  out.kernel_dim_first = mphi.app.U0.dim();
  out.kernel_dim_second = mpsi.app.U0.dim();

  Colligation first = phi, second = psi;
  MatrixXc alpha_n = alpha;
  out.reduced = !mphi.params.isometric || !mpsi.params.isometric;
  if (out.reduced) {
    const JReduction rphi = j_reduction(phi, mphi.app, mphi.params, tol);
    const JReduction rpsi = j_reduction(psi, mpsi.app, mpsi.params, tol);
    const GammaMap gamma = build_gamma(phi, psi, beta, tol, seed);
    const MatrixXc gd = diagonal_lift(gamma.gamma, phi.d);
    alpha_n = block_diag(alpha, rpsi.defect_basis.adjoint() * gd * rphi.defect_basis);
    first = rphi.reduced;
    second = rpsi.reduced;
  }
  const Construction c =
      construct_unitary_coincidence(first, second, alpha_n, beta, tol, seed);
  out.first = first;
  out.second = second;
  out.witness = c.witness;
  out.diagram_residual = c.diagram_residual;
  out.residuals = c.intertwinings.residuals;
  out.unitary_check =
      verify_unitary_coincidence(first, second, c.witness, tol.residual, seed);

  const CoincidenceWitness back = coincidence_from_unitary(
      phi, psi, c.witness,
      MatrixXc::Identity(out.kernel_dim_first, out.kernel_dim_first), tol, seed);
  out.residuals["recovered_coincidence"] = back.residual;
  return out;
}

}  // namespace colligo
