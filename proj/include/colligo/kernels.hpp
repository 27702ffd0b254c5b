#pragma once

#include <vector>

#include "colligo/colligation.hpp"

namespace colligo {

/// Scalar Drury-Arveson kernel 1 / (1 - <z, w>). Throws Pole at <z, w> = 1.
cplx da_kernel(const Point& z, const Point& w);

/// k_phi(z, w) = (I - phi(z) phi(w)^*) / (1 - <z, w>), a q x q matrix.
MatrixXc kphi(const Colligation& u, const Point& z, const Point& w);

struct GramReport {
  MatrixXc gram;
  double min_eigenvalue = 0;
  bool psd = false;
};

/// Gram matrix gram(i, j) = <k_phi(w_i, w_j) y_j, y_i>. With `vectors`
/// empty, every standard basis vector is used at every point and the result
/// is the full block kernel matrix (point-major ordering).
GramReport kphi_gram(const Colligation& u, const std::vector<Point>& points,
                     const std::vector<VectorXc>& vectors, double tol);

/// States g_{w,y} = (I - sum conj(w_j) A_j^*)^{-1} C^* y as the columns of an
/// n x q matrix. For a coisometric colligation, <g_{w,y}, g_{z,x}> equals
/// <k_phi(z, w) y, x>.
MatrixXc kernel_state(const Colligation& u, const Point& w);

/// Max over point pairs of ||k_phi(z, w) - G_z^* G_w|| with G the kernel
/// states; vanishes for coisometric colligations.
double check_realization_identity(const Colligation& u,
                                  const std::vector<Point>& points);

/// ||z^alpha||^2 = alpha! / |alpha|! in the Drury-Arveson space.
double monomial_norm_sq(const MultiIndex& alpha);

/// Seeded ball points: uniform direction, radius cap * U^(1/2d).
std::vector<Point> sample_ball_points(int d, int count, Rng& rng,
                                      double cap = 0.9);

}  // namespace colligo
