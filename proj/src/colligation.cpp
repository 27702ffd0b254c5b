#include "colligo/colligation.hpp"

#include <cmath>
#include <string>

namespace colligo {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

void collect_indices(int d, int remaining, int pos, MultiIndex& cur,
                     std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    collect_indices(d, remaining - k, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_degree(int d, int degree) {
  std::vector<MultiIndex> out;
  if (d <= 0 || degree < 0) return out;
  MultiIndex cur(d, 0);
  collect_indices(d, degree, 0, cur, out);
  return out;
}

void Colligation::validate() const {
  require(d >= 1, "colligation needs d >= 1");
  require(n >= 0 && p >= 0 && q >= 0, "negative dimension");
  require(static_cast<int>(A.size()) == d && static_cast<int>(B.size()) == d,
          "expected d blocks of A and B");
  for (int j = 0; j < d; ++j) {
    require(A[j].rows() == n && A[j].cols() == n, "A block has wrong size");
    require(B[j].rows() == n && B[j].cols() == p, "B block has wrong size");
  }
  require(C.rows() == q && C.cols() == n, "C has wrong size");
  require(D.rows() == q && D.cols() == p, "D has wrong size");
}

MatrixXc Colligation::stacked_A() const {
  MatrixXc out(d * n, n);
  for (int j = 0; j < d; ++j) out.middleRows(j * n, n) = A[j];
  return out;
}

MatrixXc Colligation::stacked_B() const {
  MatrixXc out(d * n, p);
  for (int j = 0; j < d; ++j) out.middleRows(j * n, n) = B[j];
  return out;
}

MatrixXc Colligation::op() const {
  MatrixXc u(d * n + q, n + p);
  u.topLeftCorner(d * n, n) = stacked_A();
  u.topRightCorner(d * n, p) = stacked_B();
  u.bottomLeftCorner(q, n) = C;
  u.bottomRightCorner(q, p) = D;
  return u;
}

Colligation Colligation::from_op(int d, Eigen::Index n, Eigen::Index p,
                                 Eigen::Index q, const MatrixXc& u) {
  require(d >= 1, "colligation needs d >= 1");
  require(u.rows() == d * n + q && u.cols() == n + p,
          "operator size does not match (dn+q) x (n+p)");
  Colligation c;
  c.d = d;
  c.n = n;
  c.p = p;
  c.q = q;
  for (int j = 0; j < d; ++j) {
    c.A.push_back(u.block(j * n, 0, n, n));
    c.B.push_back(u.block(j * n, n, n, p));
  }
  c.C = u.block(d * n, 0, q, n);
  c.D = u.block(d * n, n, q, p);
  return c;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Unitary: return "Unitary";
    case Verdict::Coisometric: return "Coisometric";
    case Verdict::Isometric: return "Isometric";
    case Verdict::Contractive: return "Contractive";
    case Verdict::None: return "None";
  }
  return "None";
}

ColligationClass classify(const Colligation& u, double tol) {
  u.validate();
  const MatrixXc m = u.op();
  ColligationClass c;
  c.coisometry_defect = isometry_defect(m.adjoint());
  c.isometry_defect = isometry_defect(m);
  c.unitarity_defect = std::max(c.coisometry_defect, c.isometry_defect);
  c.contraction_excess = std::max(0.0, op_norm(m) - 1.0);
  const bool coiso = c.coisometry_defect <= tol;
  const bool iso = c.isometry_defect <= tol;
  if (coiso && iso) {
    c.verdict = Verdict::Unitary;
  } else if (coiso) {
    c.verdict = Verdict::Coisometric;
  } else if (iso) {
    c.verdict = Verdict::Isometric;
  } else if (c.contraction_excess <= tol) {
    c.verdict = Verdict::Contractive;
  } else {
    c.verdict = Verdict::None;
  }
  return c;
}

MatrixXc eval_transfer(const Colligation& u, const Point& z) {
  require(z.size() == u.d, "point has wrong number of coordinates");
  if (u.n == 0) return u.D;
  MatrixXc za = MatrixXc::Identity(u.n, u.n);
  MatrixXc zb = MatrixXc::Zero(u.n, u.p);
  for (int j = 0; j < u.d; ++j) {
    za -= z(j) * u.A[j];
    zb += z(j) * u.B[j];
  }
  Eigen::PartialPivLU<MatrixXc> lu(za);
  if (!(lu.rcond() > 1e-13)) {
    throw Error(ErrorCode::SingularResolvent, "I - ZA is numerically singular");
  }
  return u.D + u.C * lu.solve(zb);
}

TaylorCoeffs output_coeffs(const Colligation& u, int order) {
  TaylorCoeffs y;
  y[MultiIndex(u.d, 0)] = u.C;
  for (int k = 1; k <= order; ++k) {
    for (const MultiIndex& alpha : multi_indices_of_degree(u.d, k)) {
      MatrixXc acc = MatrixXc::Zero(u.q, u.n);
      for (int j = 0; j < u.d; ++j) {
        if (alpha[j] == 0) continue;
        MultiIndex prev = alpha;
        --prev[j];
        acc += y.at(prev) * u.A[j];
      }
      y[alpha] = std::move(acc);
    }
  }
  return y;
}

TaylorCoeffs taylor_coeffs(const Colligation& u, int order) {
  TaylorCoeffs out;
  out[MultiIndex(u.d, 0)] = u.D;
  if (order < 1) return out;
  // phi(z) = D + sum_j z_j Y(z) B_j with Y the observability series.
  const TaylorCoeffs y = output_coeffs(u, order - 1);
  for (int k = 1; k <= order; ++k) {
    for (const MultiIndex& alpha : multi_indices_of_degree(u.d, k)) {
      MatrixXc acc = MatrixXc::Zero(u.q, u.p);
      for (int j = 0; j < u.d; ++j) {
        if (alpha[j] == 0) continue;
        MultiIndex prev = alpha;
        --prev[j];
        acc += y.at(prev) * u.B[j];
      }
      out[alpha] = std::move(acc);
    }
  }
  return out;
}

Colligation pad_input(const Colligation& u, Eigen::Index m_dim) {
  require(m_dim >= 0, "negative padding");
  Colligation out = u;
  out.p = u.p + m_dim;
  for (int j = 0; j < u.d; ++j) {
    out.B[j] = MatrixXc::Zero(u.n, out.p);
    out.B[j].leftCols(u.p) = u.B[j];
  }
  out.D = MatrixXc::Zero(u.q, out.p);
  out.D.leftCols(u.p) = u.D;
  return out;
}

MatrixXc random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXc m(rows, cols);
  // Column-major fill order keeps the stream layout fixed.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

MatrixXc random_unitary(Eigen::Index n, Rng& rng) {
  if (n == 0) return MatrixXc(0, 0);
  const MatrixXc g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<MatrixXc> qr(g);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(n, n);
  // Fix the phases against R's diagonal so the law is Haar.
  const MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

Colligation random_colligation(int d, Eigen::Index n, Eigen::Index p,
                               Eigen::Index q, Verdict class_target,
                               std::uint64_t seed) {
  require(d >= 1 && n >= 0 && p >= 0 && q >= 0, "invalid dimensions");
  const Eigen::Index rows = d * n + q;
  const Eigen::Index cols = n + p;
  Rng rng(seed);
  MatrixXc u;
  switch (class_target) {
    case Verdict::Unitary:
      require(rows == cols, "unitary colligation needs n + p = dn + q");
      u = random_unitary(rows, rng);
      break;
    case Verdict::Coisometric:
      require(cols >= rows, "coisometric colligation needs n + p >= dn + q");
      u = random_unitary(cols, rng).topRows(rows);
      break;
    case Verdict::Isometric:
      require(cols <= rows, "isometric colligation needs n + p <= dn + q");
      u = random_unitary(rows, rng).leftCols(cols);
      break;
    case Verdict::Contractive: {
      u = random_gaussian(rows, cols, rng);
      const double norm = op_norm(u);
      if (norm > 0) u /= 1.25 * norm;
      break;
    }
    case Verdict::None:
      u = 2.0 * random_unitary(std::max(rows, cols), rng).topLeftCorner(rows, cols);
      break;
  }
  return Colligation::from_op(d, n, p, q, u);
}

namespace {

// An element of the vector-valued Drury-Arveson space that is either a
// kernel function k(., lambda) y or a polynomial of degree at most one.
struct DaElement {
  bool is_kernel = false;
  VectorXc lambda;  // d
  VectorXc y;       // q
  VectorXc c0;      // q, constant term
  MatrixXc c1;      // q x d, linear coefficients

  VectorXc value_at(const VectorXc& z) const {
    if (is_kernel) return y / (cplx(1.0) - lambda.dot(z));
    return c0 + c1 * z;
  }
};

// <a, b> in the Drury-Arveson norm, linear in a.
cplx da_inner(const DaElement& a, const DaElement& b) {
  if (a.is_kernel && b.is_kernel) {
    return b.y.dot(a.y) / (cplx(1.0) - a.lambda.dot(b.lambda));
  }
  if (!a.is_kernel && b.is_kernel) return b.y.dot(a.value_at(b.lambda));
  if (a.is_kernel && !b.is_kernel) return std::conj(da_inner(b, a));
  // Monomials of degree <= 1 are orthonormal.
  cplx s = b.c0.dot(a.c0);
  for (Eigen::Index j = 0; j < a.c1.cols(); ++j) s += b.c1.col(j).dot(a.c1.col(j));
  return s;
}

VectorXc random_ball_point(int d, double radius_cap, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXc dir = random_gaussian(d, 1, rng);
  dir.normalize();
  const double r = radius_cap * std::pow(unif(rng), 1.0 / (2.0 * d));
  return r * dir;
}

}  // namespace

Colligation random_functional_model(int d, Eigen::Index n, Eigen::Index p,
                                    Eigen::Index q, std::uint64_t seed) {
  require(d >= 1 && n >= 0 && q >= 1, "invalid dimensions");
  require(p >= (d - 1) * n + q,
          "functional model colligation needs p >= (d - 1) n + q");
  Rng rng(seed);

  // Polynomial part: either one random degree-one polynomial h, or the full
  // block {z_1 v, ..., z_d v} for a random vector v. Either way it is closed
  // under the backward shifts once the constants they produce are added.
  enum class PolyKind { None, Single, Block };
  const Eigen::Index single_dim = std::min<Eigen::Index>(d, q) + 1;
  const Eigen::Index block_dim = d + 1;
  std::vector<PolyKind> options{PolyKind::None};
  if (n >= single_dim) options.push_back(PolyKind::Single);
  if (d >= 2 && n >= block_dim) {
    options.push_back(PolyKind::Block);
    options.push_back(PolyKind::Block);
  }
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  const PolyKind kind = options[pick(rng)];

  std::vector<DaElement> linear;
  if (kind == PolyKind::Single) {
    DaElement h;
    h.c0 = random_gaussian(q, 1, rng);
    h.c1 = random_gaussian(q, d, rng);
    linear.push_back(std::move(h));
  } else if (kind == PolyKind::Block) {
    VectorXc v = random_gaussian(q, 1, rng);
    v.normalize();
    for (int j = 0; j < d; ++j) {
      DaElement e;
      e.c0 = VectorXc::Zero(q);
      e.c1 = MatrixXc::Zero(q, d);
      e.c1.col(j) = v;
      linear.push_back(std::move(e));
    }
  }
  MatrixXc coefficient_span(q, 0);
  for (const auto& e : linear) {
    coefficient_span.conservativeResize(Eigen::NoChange, coefficient_span.cols() + d);
    coefficient_span.rightCols(d) = e.c1;
  }
  const MatrixXc const_basis = orthonormal_range(coefficient_span).basis;
  const Eigen::Index poly_dim =
      static_cast<Eigen::Index>(linear.size()) + const_basis.cols();
  const Eigen::Index kernel_count = n - poly_dim;

  std::vector<DaElement> basis;
  std::vector<VectorXc> nodes;
  while (static_cast<Eigen::Index>(nodes.size()) < kernel_count) {
    VectorXc lam = random_ball_point(d, 0.7, rng);
    bool separated = lam.norm() > 0.05;
    for (const auto& other : nodes) separated = separated && (lam - other).norm() > 0.2;
    if (!separated) continue;
    nodes.push_back(lam);
    DaElement e;
    e.is_kernel = true;
    e.lambda = lam;
    e.y = random_gaussian(q, 1, rng);
    e.y.normalize();
    basis.push_back(std::move(e));
  }
  const Eigen::Index first_linear = static_cast<Eigen::Index>(basis.size());
  for (const auto& e : linear) basis.push_back(e);
  const Eigen::Index first_const = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index m = 0; m < const_basis.cols(); ++m) {
    DaElement c;
    c.c0 = const_basis.col(m);
    c.c1 = MatrixXc::Zero(q, d);
    basis.push_back(std::move(c));
  }
  require(static_cast<Eigen::Index>(basis.size()) == n,
          "internal: state basis has the wrong size");

  MatrixXc gram(n, n);
  MatrixXc eval0(q, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) gram(i, k) = da_inner(basis[k], basis[i]);
    eval0.col(k) = basis[k].value_at(VectorXc::Zero(d));
  }
  // Backward shifts in basis coordinates.
  std::vector<MatrixXc> shift(d, MatrixXc::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const DaElement& e = basis[k];
    if (e.is_kernel) {
      for (int j = 0; j < d; ++j) shift[j](k, k) = std::conj(e.lambda(j));
    } else if (k >= first_linear && k < first_const) {
      for (int j = 0; j < d; ++j) {
        shift[j].block(first_const, k, const_basis.cols(), 1) =
            const_basis.adjoint() * e.c1.col(j);
      }
    }
  }

  const MatrixXc root = psd_sqrt(gram);
  const MatrixXc root_inv = root.inverse();
  MatrixXc v(d * n + q, n);
  for (int j = 0; j < d; ++j) v.middleRows(j * n, n) = root * shift[j] * root_inv;
  v.bottomRows(q) = eval0 * root_inv;
  if (isometry_defect(v) > 1e-9) {
    throw Error(ErrorCode::Inconsistent,
                "backward-shift model failed the isometry identity");
  }

  // Complete the isometric column [A; C] to a coisometry [A B; C D].
  MatrixXc w = null_space(v.adjoint(), 1e-10).basis;
  const Eigen::Index k = w.cols();
  w *= random_unitary(k, rng);
  MatrixXc bd = w;
  if (p > k) bd = w * random_unitary(p, rng).topRows(k);
  MatrixXc u(d * n + q, n + p);
  u << v, bd;
  return Colligation::from_op(d, n, p, q, u);
}

Colligation rotate(const Colligation& u, const MatrixXc& lambda,
                   const MatrixXc& alpha, const MatrixXc& beta) {
  require(lambda.rows() == u.n && lambda.cols() == u.n, "state unitary size");
  require(alpha.rows() == u.p && alpha.cols() == u.p, "input unitary size");
  require(beta.rows() == u.q && beta.cols() == u.q, "output unitary size");
  Colligation out = u;
  for (int j = 0; j < u.d; ++j) {
    out.A[j] = lambda * u.A[j] * lambda.adjoint();
    out.B[j] = lambda * u.B[j] * alpha.adjoint();
  }
  out.C = beta * u.C * lambda.adjoint();
  out.D = beta * u.D * alpha.adjoint();
  return out;
}

namespace fixtures {

namespace {
Colligation from_real(int d, Eigen::Index n, Eigen::Index p, Eigen::Index q,
                      const Eigen::MatrixXd& m) {
  return Colligation::from_op(d, n, p, q, m.cast<cplx>());
}
}  // namespace

Colligation shift() {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1,
       1, 0;
  return from_real(1, 1, 1, 1, m);
}

Colligation z_squared() {
  Eigen::MatrixXd m(3, 3);
  m << 0, 0, 1,
       1, 0, 0,
       0, 1, 0;
  return from_real(1, 2, 1, 1, m);
}

Colligation constant_row() {
  return from_real(2, 1, 2, 1, Eigen::MatrixXd::Identity(3, 3));
}

Colligation double_shift() {
  Eigen::MatrixXd m(2, 2);
  m << 0, 2,
       1, 0;
  return from_real(1, 1, 1, 1, m);
}

Colligation coordinate_z1() {
  Eigen::MatrixXd m(3, 2);
  m << 0, 1,
       0, 0,
       1, 0;
  return from_real(2, 1, 1, 1, m);
}

Colligation coordinate_diagonal() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd m(3, 2);
  m << 0, s,
       0, s,
       1, 0;
  return from_real(2, 1, 1, 1, m);
}

Colligation unobservable() {
  Eigen::MatrixXd m(3, 3);
  m << 0, 0, 1,
       0, 1, 0,
       1, 0, 0;
  return from_real(1, 2, 1, 1, m);
}

}  // namespace fixtures

}  // namespace colligo
