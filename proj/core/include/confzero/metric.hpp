#pragma once

#include <Eigen/Dense>
#include <utility>

namespace confzero {

// Relative singular-value threshold used everywhere a numerical rank or
// kernel is needed. sigma_i <= tol * sigma_max counts as zero.
inline constexpr double kDefaultTol = 1e-9;

// Subspace of R^n held as a Euclidean-orthonormal column basis (n x d).
// d == 0 is the zero subspace; basis then has zero columns but n rows.
struct Subspace {
  Eigen::MatrixXd basis;

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int dim() const { return static_cast<int>(basis.cols()); }

  // Euclidean orthogonal projection onto the subspace.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    return basis * (basis.transpose() * x);
  }

  // Distance-based membership: ||x - proj x|| <= tol * (1 + ||x||).
  bool contains(const Eigen::VectorXd& x, double tol = kDefaultTol) const {
    return (x - project(x)).norm() <= tol * (1.0 + x.norm());
  }
};

// Flat pseudo-Euclidean space: R^n with a fixed symmetric nondegenerate
// bilinear form g. Signature (p,q) counts positive/negative eigenvalues.
class MetricSpace {
 public:
  // Standard form diag(+1 x p, -1 x q).
  MetricSpace(int p, int q);
  // General symmetric nondegenerate g; throws std::invalid_argument if
  // g is not symmetric or is singular at the default threshold.
  explicit MetricSpace(const Eigen::MatrixXd& g, double tol = kDefaultTol);

  int dim() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  const Eigen::MatrixXd& g() const { return g_; }
  const Eigen::MatrixXd& g_inv() const { return g_inv_; }

  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot(g_ * y);
  }
  // Index lowering: v -> g(v, .) as a row covector.
  Eigen::RowVectorXd lower(const Eigen::VectorXd& v) const {
    return (g_ * v).transpose();
  }
  // Index raising: covector -> vector, a -> g^{-1} a^T.
  Eigen::VectorXd raise(const Eigen::RowVectorXd& a) const {
    return g_inv_ * a.transpose();
  }

  bool is_null(const Eigen::VectorXd& x, double tol = kDefaultTol) const {
    return std::abs(inner(x, x)) <= tol * (1.0 + x.squaredNorm());
  }

  // g-adjoint: A* = g^{-1} A^T g.
  Eigen::MatrixXd adjoint(const Eigen::MatrixXd& A) const {
    return g_inv_ * A.transpose() * g_;
  }
  // Splitting A = sym + skew with sym self-adjoint and skew skew-adjoint
  // for g. skew_part of any A has even rank.
  Eigen::MatrixXd sym_part(const Eigen::MatrixXd& A) const {
    return 0.5 * (A + adjoint(A));
  }
  Eigen::MatrixXd skew_part(const Eigen::MatrixXd& A) const {
    return 0.5 * (A - adjoint(A));
  }

 private:
  int n_, p_, q_;
  Eigen::MatrixXd g_, g_inv_;
};

// Kernel of an m x n matrix as a Subspace of R^n, via SVD with relative
// threshold. rank(A) + kernel dim == n.
Subspace kernel(const Eigen::MatrixXd& A, double tol = kDefaultTol);

int rank_of(const Eigen::MatrixXd& A, double tol = kDefaultTol);

// Orthonormalized column span.
Subspace span_of(const Eigen::MatrixXd& vectors, double tol = kDefaultTol);

// g-orthogonal complement {y : g(y, s) = 0 for all s in S}.
// dim == n - dim S because g is nondegenerate.
Subspace orth_complement(const Subspace& S, const MetricSpace& M,
                         double tol = kDefaultTol);

Subspace intersect(const Subspace& S1, const Subspace& S2,
                   double tol = kDefaultTol);

// Signature (positive count, negative count) of a symmetric matrix;
// eigenvalues within tol * max|eigenvalue| of zero are not counted.
std::pair<int, int> signature_of(const Eigen::MatrixXd& sym,
                                 double tol = kDefaultTol);

// Gram matrix of g restricted to a subspace, in the basis of S.
Eigen::MatrixXd restricted_gram(const Subspace& S, const MetricSpace& M);

// g-skew endomorphism from n(n-1)/2 parameters: K = g^{-1} S with S
// antisymmetric, upper triangle filled row-major from theta.
Eigen::MatrixXd skew_from_params(const Eigen::VectorXd& theta,
                                 const MetricSpace& M);

// exp of the above; satisfies R^T g R = g to machine precision.
Eigen::MatrixXd isometry_from_params(const Eigen::VectorXd& theta,
                                     const MetricSpace& M);

}  // namespace confzero
