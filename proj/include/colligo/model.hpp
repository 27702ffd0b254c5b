#pragma once

// de Branges-Rovnyak model apparatus in state coordinates.
//
// The state space X of an observable coisometric realization is identified
// with H(k_phi): the kernel section k_phi(., w) y corresponds to the state
// g_{w,y} returned by kernel_state(). Every operator below is stored in
// ambient coordinates of its natural space (X, X^d, X^d (+) Y, U) and vanishes
// off its domain, so results do not depend on the choice of bases.

#include <cstdint>
#include <map>
#include <string>

#include "colligo/colligation.hpp"
#include "colligo/tolerances.hpp"

namespace colligo {

struct FunctionalModelReport {
  Eigen::Index observability_rank = 0;
  double shift_residual = 0;  // backward-shift coefficient rule
  bool coisometric = false;
  bool passed = false;
};

/// Checks that A_j acts as the backward shift M_{z_j}^* and C as evaluation at
/// the origin on the functions x -> C (I - ZA)^{-1} x, in Taylor coordinates
/// through degree `order`. Throws NotObservable when the observability map is
/// not injective.
FunctionalModelReport verify_functional_model(const Colligation& u, int order,
                                              double tol,
                                              double rank_tol = kDefaultRankTol);

/// Joint null space of the Taylor coefficients of phi through `order`: the
/// inputs u with phi(z) u == 0.
SubspaceC kernel_space(const Colligation& u, int order,
                       double rank_tol = kDefaultRankTol);

/// Saturation order used for kernel_space: max(2, n d).
int kernel_space_order(const Colligation& u);

struct ModelApparatus {
  Colligation source;
  std::vector<Point> samples;  // ball points used to generate D_phi

  SubspaceC d_phi;       // in X^d
  SubspaceC d_phi_perp;  // in X^d
  MatrixXc R;            // U <- X^d, zero on D_phi^perp
  MatrixXc T11;          // X <- X^d, A^* restricted to D_phi^perp
  MatrixXc T12;          // X <- X^d (+) Y, (A^* on D_phi, C^*)
  MatrixXc T22;          // U <- X^d (+) Y, (R, phi(0)^*)
  MatrixXc delta1;       // (I_X - T12 T12^*)^{1/2}
  MatrixXc G1;           // X^d <- X, G1 delta1 = T11^*
  MatrixXc delta2;       // (I - T12^* T12)^{1/2} on D_phi (+) Y
  MatrixXc G2;           // U <- X^d (+) Y, G2 delta2 = T22
  MatrixXc defect1;      // (I - G1 G1^*)^{1/2} on D_phi^perp, zero on D_phi
  SubspaceC defect1_range;  // in X^d
  SubspaceC U0;          // kernel space in U

  std::map<std::string, double> residuals;
};

/// Builds the apparatus. D_phi is the span of the stacked states
/// (conj(w_j) g_{w,y})_j over seeded ball points, grown one point at a time
/// until three successive points add nothing.
ModelApparatus build_apparatus(const Colligation& u, const Tolerances& tol,
                               std::uint64_t seed);

struct ParameterExtraction {
  MatrixXc zeta;  // U <- X^d, supported on defect1_range, values in U0
  bool isometric = false;
  double isometry_defect = 0;   // of zeta restricted to the defect range
  double range_residual = 0;    // ||P_{U0^perp} zeta||
  double r_residual = 0;        // ||B^* on D_phi - R||
  double solve_residual = 0;
};

/// Solves zeta (I - G1 G1^*)^{1/2} = B^*|_{D_phi^perp} + G2 T12^* G1^* for the
/// free parameter of the given realization. Throws Inconsistent when the
/// colligation is not a functional model realization of its own transfer
/// function.
ParameterExtraction extract_parameter(const Colligation& u,
                                      const ModelApparatus& app,
                                      const Tolerances& tol);

/// h -> xi h (+) (I - xi^* xi)^{1/2} h, stacked as a (k + s) x s isometry.
MatrixXc build_xi_iso(const MatrixXc& xi, double tol = 1e-8);

struct JReduction {
  Eigen::Index n_space_dim = 0;  // dim U + dim defect1_range
  MatrixXc J;        // U <- N, projection onto U0^perp
  MatrixXc xi_iso;   // (U (+) defect coords) <- defect coords
  MatrixXc defect_basis;  // X^d <- defect coords
  Colligation reduced;    // coisometric model colligation of phi J
};

/// The reduced multiplier phi_J = phi J on N = U (+) defect range, with its
/// coisometric functional model colligation.
JReduction j_reduction(const Colligation& u, const ModelApparatus& app,
                       const ParameterExtraction& params, const Tolerances& tol);

/// Residuals of T11^J = T11, T12^J = T12, T22^J = J^* T22, G1^J = G1,
/// G2^J = J^* G2 between an apparatus and that of its reduction.
std::map<std::string, double> reduction_identities(const ModelApparatus& app,
                                                   const ModelApparatus& reduced,
                                                   const MatrixXc& J);

/// Functional model of the same transfer function whose B-parameter on the
/// defect range is `factor` times the extracted isometry (0 <= factor < 1
/// gives a non-coisometric, contractive realization).
Colligation scale_parameter(const Colligation& u, double factor,
                            const Tolerances& tol, std::uint64_t seed);

}  // namespace colligo
