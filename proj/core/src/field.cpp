#include "confzero/field.hpp"

#include <stdexcept>

namespace confzero {

namespace {

void check_dims(const FlatConformalField& f, const MetricSpace& M) {
  const int n = M.dim();
  if (f.w.size() != n || f.u.size() != n || f.B.rows() != n || f.B.cols() != n)
    throw std::invalid_argument("field: parameter dimensions do not match space");
}

}  // namespace

FlatConformalField make_field(const Eigen::VectorXd& w,
                              const Eigen::MatrixXd& B, double c,
                              const Eigen::VectorXd& u, const MetricSpace& M,
                              double tol) {
  FlatConformalField f{w, B, c, u};
  check_dims(f, M);
  const Eigen::MatrixXd gB = M.g() * B;
  const double skew_defect = (gB + gB.transpose()).cwiseAbs().maxCoeff();
  if (skew_defect > tol * (1.0 + gB.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_field: B is not g-skew");
  return f;
}

Eigen::VectorXd evaluate(const FlatConformalField& f, const Eigen::VectorXd& x,
                         const MetricSpace& M) {
  check_dims(f, M);
  const double ux = M.inner(f.u, x);
  const double xx = M.inner(x, x);
  return f.w + f.B * x + f.c * x + 2.0 * ux * x - xx * f.u;
}

PointJet jet_at(const FlatConformalField& f, const Eigen::VectorXd& x,
                const MetricSpace& M) {
  check_dims(f, M);
  const int n = M.dim();
  const Eigen::RowVectorXd u_flat = M.lower(f.u);
  const Eigen::RowVectorXd x_flat = M.lower(x);
  const double ux = u_flat * x;

  PointJet jet;
  jet.x = x;
  jet.value = evaluate(f, x, M);
  jet.J = f.B + (f.c + 2.0 * ux) * Eigen::MatrixXd::Identity(n, n) +
          2.0 * x * u_flat - 2.0 * f.u * x_flat;
  jet.phi = 2.0 * f.c + 4.0 * ux;
  jet.dphi = 4.0 * u_flat;
  return jet;
}

double conformal_residual(const PointJet& jet, const MetricSpace& M) {
  const Eigen::MatrixXd gJ = M.g() * jet.J;
  return (gJ + gJ.transpose() - jet.phi * M.g()).cwiseAbs().maxCoeff();
}

FlatConformalField bracket(const FlatConformalField& f1,
                           const FlatConformalField& f2, const MetricSpace& M,
                           double tol) {
  check_dims(f1, M);
  check_dims(f2, M);
  const int n = M.dim();

  const auto br = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return jet_at(f2, x, M).J * evaluate(f1, x, M) -
           jet_at(f1, x, M).J * evaluate(f2, x, M);
  };
  // gradient of the bracket at y; centered step 1 is exact on quadratics
  const auto grad = [&](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(j) = 1.0;
      G.col(j) = 0.5 * (br(y + e) - br(y - e));
    }
    return G;
  };

  // The bracket of two fields of the family is again in the family, i.e. a
  // quadratic polynomial with gradient M' + 2<u',y> Id + 2 y (gu')^T
  // - 2 u' (gy)^T. Recover parameters from exact polynomial data:
  FlatConformalField r;
  r.w = br(Eigen::VectorXd::Zero(n));
  const Eigen::MatrixXd M0 = grad(Eigen::VectorXd::Zero(n));
  r.c = M0.trace() / n;
  r.B = M0 - r.c * Eigen::MatrixXd::Identity(n, n);
  // trace of the gradient at e_j minus at 0 isolates 2n <u', e_j>
  Eigen::RowVectorXd u_flat(n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    u_flat(j) = (grad(e).trace() - M0.trace()) / (2.0 * n);
  }
  r.u = M.raise(u_flat);

  // closure check at fixed pseudo-random points; also catches non-g-skew B
  Rng rng(0x9e3779b97f4a7c15ULL);
  double residual = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd x = rng.gauss_vec(n);
    residual = std::max(residual, (evaluate(r, x, M) - br(x)).norm());
  }
  if (residual > tol)
    throw std::runtime_error("bracket: closure residual " +
                             std::to_string(residual) + " exceeds tolerance");
  return r;
}

PointJet rescaled_jet(const PointJet& jet, const Rescaling& resc, double tol) {
  if (!jet.at_zero(tol))
    throw std::invalid_argument("rescaled_jet: jet must be taken at a zero");
  if (resc.a.size() != jet.x.size() || resc.Q.rows() != jet.x.size() ||
      resc.Q.cols() != jet.x.size())
    throw std::invalid_argument("rescaled_jet: rescaling dimensions mismatch");
  PointJet out = jet;
  // At a zero, e^tau g changes only dphi: correction is dtau composed with
  // the gradient. phi itself picks up d_v tau = 0 since v(x) = 0.
  out.dphi = jet.dphi + resc.dtau(jet.x) * jet.J;
  return out;
}

FlatConformalField field_from_jet(const PointJet& jet, const MetricSpace& M,
                                  double tol) {
  const int n = M.dim();
  if (jet.x.size() != n)
    throw std::invalid_argument("field_from_jet: dimension mismatch");
  FlatConformalField f;
  f.u = M.raise(jet.dphi) / 4.0;
  const Eigen::RowVectorXd u_flat = M.lower(f.u);
  const Eigen::RowVectorXd x_flat = M.lower(jet.x);
  f.c = jet.phi / 2.0 - 2.0 * (u_flat * jet.x).value();
  Eigen::MatrixXd B = jet.J -
                      (jet.phi / 2.0) * Eigen::MatrixXd::Identity(n, n) -
                      2.0 * jet.x * u_flat + 2.0 * f.u * x_flat;
  f.B = B;
  f.w = jet.value - evaluate(FlatConformalField{Eigen::VectorXd::Zero(n), f.B,
                                                f.c, f.u},
                             jet.x, M);
  return make_field(f.w, f.B, f.c, f.u, M, tol);
}

FlatConformalField random_field(const MetricSpace& M, Rng& rng) {
  const int n = M.dim();
  FlatConformalField f;
  f.w = rng.gauss_vec(n);
  f.u = rng.gauss_vec(n);
  f.c = rng.gauss();
  f.B = skew_from_params(rng.gauss_vec(n * (n - 1) / 2), M);
  return f;
}

}  // namespace confzero
