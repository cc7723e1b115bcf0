#include "confzero/metric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace confzero {

namespace {

// Fix the sign of each basis column so the entry of largest magnitude is
// positive. Keeps reported bases stable across algebraically equal inputs.
Eigen::MatrixXd canonical_signs(Eigen::MatrixXd B) {
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    Eigen::Index imax = 0;
    B.col(j).cwiseAbs().maxCoeff(&imax);
    if (B(imax, j) < 0) B.col(j) = -B.col(j);
  }
  return B;
}

}  // namespace

MetricSpace::MetricSpace(int p, int q) : n_(p + q), p_(p), q_(q) {
  if (p < 0 || q < 0 || n_ == 0)
    throw std::invalid_argument("MetricSpace: need p,q >= 0 and p+q >= 1");
  Eigen::VectorXd d(n_);
  d.head(p).setOnes();
  d.tail(q).setConstant(-1.0);
  g_ = d.asDiagonal();
  g_inv_ = g_;
}

MetricSpace::MetricSpace(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols() || g.rows() == 0)
    throw std::invalid_argument("MetricSpace: g must be square and nonempty");
  n_ = static_cast<int>(g.rows());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() >
      tol * (1.0 + g.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("MetricSpace: g must be symmetric");
  g_ = 0.5 * (g + g.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0 || ev.cwiseAbs().minCoeff() <= tol * scale)
    throw std::invalid_argument("MetricSpace: g is degenerate");
  p_ = static_cast<int>((ev.array() > 0.0).count());
  q_ = n_ - p_;
  g_inv_ = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

Subspace kernel(const Eigen::MatrixXd& A, double tol) {
  const int n = static_cast<int>(A.cols());
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
    Subspace full;
    full.basis = Eigen::MatrixXd::Identity(n, n);
    return full;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  Subspace K;
  K.basis = canonical_signs(svd.matrixV().rightCols(n - rank));
  return K;
}

int rank_of(const Eigen::MatrixXd& A, double tol) {
  return static_cast<int>(A.cols()) - kernel(A, tol).dim();
}

Subspace span_of(const Eigen::MatrixXd& vectors, double tol) {
  if (vectors.cols() == 0 || vectors.cwiseAbs().maxCoeff() == 0.0) {
    Subspace z;
    z.basis = Eigen::MatrixXd::Zero(vectors.rows(), 0);
    return z;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  Subspace S;
  S.basis = canonical_signs(svd.matrixU().leftCols(rank));
  return S;
}

Subspace orth_complement(const Subspace& S, const MetricSpace& M, double tol) {
  if (S.dim() == 0) {
    Subspace full;
    full.basis = Eigen::MatrixXd::Identity(M.dim(), M.dim());
    return full;
  }
  // y is g-orthogonal to S iff (basis^T g) y = 0.
  return kernel(S.basis.transpose() * M.g(), tol);
}

Subspace intersect(const Subspace& S1, const Subspace& S2, double tol) {
  const int n = S1.ambient_dim();
  if (S2.ambient_dim() != n)
    throw std::invalid_argument("intersect: ambient dimensions differ");
  // x lies in S iff (I - BB^T) x = 0; stack both conditions.
  Eigen::MatrixXd C(2 * n, n);
  C.topRows(n) =
      Eigen::MatrixXd::Identity(n, n) - S1.basis * S1.basis.transpose();
  C.bottomRows(n) =
      Eigen::MatrixXd::Identity(n, n) - S2.basis * S2.basis.transpose();
  return kernel(C, tol);
}

std::pair<int, int> signature_of(const Eigen::MatrixXd& sym, double tol) {
  if (sym.rows() == 0) return {0, 0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0) return {0, 0};
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol * scale) ++pos;
    if (ev(i) < -tol * scale) ++neg;
  }
  return {pos, neg};
}

Eigen::MatrixXd restricted_gram(const Subspace& S, const MetricSpace& M) {
  return S.basis.transpose() * M.g() * S.basis;
}

Eigen::MatrixXd skew_from_params(const Eigen::VectorXd& theta,
                                 const MetricSpace& M) {
  const int n = M.dim();
  if (theta.size() != n * (n - 1) / 2)
    throw std::invalid_argument("skew_from_params: need n(n-1)/2 parameters");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      S(i, j) = theta(k);
      S(j, i) = -theta(k);
      ++k;
    }
  // g K = S antisymmetric, so K is g-skew.
  return M.g_inv() * S;
}

Eigen::MatrixXd isometry_from_params(const Eigen::VectorXd& theta,
                                     const MetricSpace& M) {
  return skew_from_params(theta, M).exp();
}

}  // namespace confzero
