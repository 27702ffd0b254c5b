#include "colligo/kernels.hpp"

#include <cmath>

namespace colligo {

cplx da_kernel(const Point& z, const Point& w) {
  if (z.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch, "points of different dimension");
  }
  // <z, w> = sum z_j conj(w_j); Eigen's dot conjugates its left operand.
  const cplx denom = cplx(1.0) - w.dot(z);
  if (std::abs(denom) <= 1e-14) throw Error(ErrorCode::Pole, "<z, w> = 1");
  return cplx(1.0) / denom;
}

MatrixXc kphi(const Colligation& u, const Point& z, const Point& w) {
  const cplx k = da_kernel(z, w);
  const MatrixXc pz = eval_transfer(u, z);
  const MatrixXc pw = eval_transfer(u, w);
  return k * (MatrixXc::Identity(u.q, u.q) - pz * pw.adjoint());
}

GramReport kphi_gram(const Colligation& u, const std::vector<Point>& points,
                     const std::vector<VectorXc>& vectors, double tol) {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (!vectors.empty() && static_cast<Eigen::Index>(vectors.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "one vector per point expected");
  }
  std::vector<MatrixXc> phis;
  phis.reserve(points.size());
  for (const Point& w : points) phis.push_back(eval_transfer(u, w));

  const Eigen::Index block = vectors.empty() ? u.q : 1;
  GramReport report;
  report.gram = MatrixXc::Zero(m * block, m * block);
  const MatrixXc id = MatrixXc::Identity(u.q, u.q);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const MatrixXc k = da_kernel(points[i], points[j]) *
                         (id - phis[i] * phis[j].adjoint());
      MatrixXc entry = vectors.empty()
                           ? k
                           : MatrixXc::Constant(1, 1, vectors[i].dot(k * vectors[j]));
      report.gram.block(i * block, j * block, block, block) = entry;
      if (j != i) {
        report.gram.block(j * block, i * block, block, block) = entry.adjoint();
      } else {
        report.gram.block(i * block, i * block, block, block) =
            (entry + entry.adjoint()) / 2.0;
      }
    }
  }
  if (report.gram.size() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> eig(report.gram,
                                                Eigen::EigenvaluesOnly);
    report.min_eigenvalue = eig.eigenvalues().minCoeff();
  }
  report.psd = report.min_eigenvalue >= -tol;
  return report;
}

MatrixXc kernel_state(const Colligation& u, const Point& w) {
  if (w.size() != u.d) {
    throw Error(ErrorCode::DimensionMismatch, "point has wrong number of coordinates");
  }
  if (u.n == 0) return MatrixXc(0, u.q);
  MatrixXc m = MatrixXc::Identity(u.n, u.n);
  for (int j = 0; j < u.d; ++j) m -= std::conj(w(j)) * u.A[j].adjoint();
  Eigen::PartialPivLU<MatrixXc> lu(m);
  if (!(lu.rcond() > 1e-13)) {
    throw Error(ErrorCode::SingularResolvent, "I - Z_w A^* is numerically singular");
  }
  return lu.solve(u.C.adjoint());
}

double check_realization_identity(const Colligation& u,
                                  const std::vector<Point>& points) {
  std::vector<MatrixXc> states;
  states.reserve(points.size());
  for (const Point& w : points) states.push_back(kernel_state(u, w));
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      // <g_{w_j, y}, g_{w_i, x}> = x^* G_i^* G_j y.
      const MatrixXc lhs = kphi(u, points[i], points[j]);
      const MatrixXc rhs = states[i].adjoint() * states[j];
      worst = std::max(worst, op_norm(lhs - rhs));
    }
  }
  return worst;
}

double monomial_norm_sq(const MultiIndex& alpha) {
  // alpha! / |alpha|! accumulated as a product of ratios to avoid overflow.
  double value = 1.0;
  int total = 0;
  for (int a : alpha) {
    for (int k = 1; k <= a; ++k) {
      ++total;
      value *= static_cast<double>(k) / total;
    }
  }
  return value;
}

std::vector<Point> sample_ball_points(int d, int count, Rng& rng, double cap) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    VectorXc dir = random_gaussian(d, 1, rng);
    dir.normalize();
    const double r = cap * std::pow(unif(rng), 1.0 / (2.0 * d));
    out.push_back(r * dir);
  }
  return out;
}

}  // namespace colligo
