#pragma once

// Coincidence of transfer functions (beta phi(z) = psi(z) alpha) and unitary
// coincidence of colligations, with constructions in both directions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colligo/model.hpp"

namespace colligo {

struct CoincidenceWitness {
  MatrixXc alpha;  // U -> V
  MatrixXc beta;   // Y -> W
  double residual = 0;
};

struct CoincidenceCheck {
  bool passed = false;
  CoincidenceWitness witness;
};

/// Max of ||beta phi - psi alpha|| over the Taylor coefficients through
/// `order` and over `points`. Throws DimensionMismatch or NotUnitary.
CoincidenceCheck verify_coincidence(const Colligation& phi, const Colligation& psi,
                                    const MatrixXc& alpha, const MatrixXc& beta,
                                    const std::vector<Point>& points, double tol,
                                    int order = 8);

enum class CoincidenceVerdict { Coincident, NotCoincident, Unknown };

std::string_view to_string(CoincidenceVerdict v);

struct SolveResult {
  CoincidenceVerdict verdict = CoincidenceVerdict::Unknown;
  std::optional<CoincidenceWitness> witness;
  Eigen::Index null_space_dim = 0;
  int iterations = 0;
  std::string reason;
};

/// Searches for unitaries (alpha, beta) with beta phi = psi alpha.
///
/// The coefficient constraints through tol.taylor_order are linear in
/// (beta, alpha); an empty solution space proves non-coincidence. Otherwise
/// the search alternates between the solution space and the unitary pairs.
/// The search itself is heuristic: Unknown means no witness was found.
SolveResult solve_coincidence(const Colligation& phi, const Colligation& psi,
                              const Tolerances& tol, int max_iter,
                              std::uint64_t seed);

struct GammaMap {
  MatrixXc gamma;  // X_phi -> X_psi
  double solve_residual = 0;
  double gram_residual = 0;
  double unitarity_defect = 0;
};

/// The unitary Gamma with Gamma g^phi_{w,y} = g^psi_{w,beta y}. Throws
/// Inconsistent when beta does not make the kernels match.
GammaMap build_gamma(const Colligation& phi, const Colligation& psi,
                     const MatrixXc& beta, const Tolerances& tol,
                     std::uint64_t seed);

struct IntertwiningReport {
  std::map<std::string, double> residuals;
  bool passed = false;
};

IntertwiningReport verify_intertwinings(const GammaMap& gamma,
                                        const ModelApparatus& app_phi,
                                        const ModelApparatus& app_psi,
                                        const MatrixXc& alpha,
                                        const MatrixXc& beta, double tol);

/// Which colligation of the pair received the zero input padding.
enum class Side { First, Second };

std::string_view to_string(Side s);

/// Unitaries (Lambda, Omega1, Omega2) intertwining pad_input(source, pad_dim)
/// with target, where source is the `padded_side` member of the pair:
/// (Lambda^d (+) Omega2) U_source = U_target (Lambda (+) Omega1).
struct UnitaryCoincidenceWitness {
  MatrixXc Lambda;
  MatrixXc Omega1;
  MatrixXc Omega2;
  Eigen::Index pad_dim = 0;
  Side padded_side = Side::First;
  double residual = 0;
};

struct UnitaryCheck {
  double block_residual = 0;
  double transfer_residual = 0;
  bool passed = false;
};

UnitaryCheck verify_unitary_coincidence(const Colligation& first,
                                        const Colligation& second,
                                        const UnitaryCoincidenceWitness& w,
                                        double tol, std::uint64_t seed);

struct Construction {
  Colligation padded;
  UnitaryCoincidenceWitness witness;
  GammaMap gamma;
  IntertwiningReport intertwinings;
  double diagram_residual = 0;
  Eigen::Index kernel_complement_first = 0;   // dim(U0 - ran zeta) of first
  Eigen::Index kernel_complement_second = 0;  // same for second
};

/// Builds a unitary coincidence between coisometric functional models from a
/// coincidence (alpha, beta). When the input dimensions differ, alpha relates
/// the zero-padded transfer functions. The side with the smaller
/// dim(U0 - ran zeta) receives the padding.
Construction construct_unitary_coincidence(const Colligation& phi,
                                           const Colligation& psi,
                                           const MatrixXc& alpha,
                                           const MatrixXc& beta,
                                           const Tolerances& tol,
                                           std::uint64_t seed);

/// Recovers a coincidence of `first` and `second` from a unitary coincidence
/// whose colligations carry the original inputs as their leading input
/// coordinates (padded or J-reduced versions qualify). `tau` maps the kernel
/// space basis of `first` to that of `second`. Throws KernelDimMismatch when
/// the kernel spaces have different dimensions.
CoincidenceWitness coincidence_from_unitary(const Colligation& first,
                                            const Colligation& second,
                                            const UnitaryCoincidenceWitness& w,
                                            const MatrixXc& tau,
                                            const Tolerances& tol,
                                            std::uint64_t seed);

struct PipelineReport {
  CoincidenceVerdict verdict = CoincidenceVerdict::Unknown;
  std::string reason;
  std::optional<CoincidenceWitness> coincidence;
  bool reduced = false;
  // Colligations related by the witness (J-reduced when `reduced`).
  std::optional<Colligation> first;
  std::optional<Colligation> second;
  std::optional<UnitaryCoincidenceWitness> witness;
  UnitaryCheck unitary_check;
  double diagram_residual = 0;
  std::map<std::string, double> residuals;
  Eigen::Index kernel_dim_first = 0;
  Eigen::Index kernel_dim_second = 0;
};

/// Decides coincidence, then (for coincident pairs) J-reduces when either
/// parameter is a strict contraction and constructs a verified unitary
/// coincidence of the resulting coisometric models.
PipelineReport coincide_pipeline(const Colligation& phi, const Colligation& psi,
                                 const Tolerances& tol, std::uint64_t seed);

/// Process exit code for a verdict: 0 coincident, 1 not, 2 unknown.
int exit_code(CoincidenceVerdict v);

}  // namespace colligo
