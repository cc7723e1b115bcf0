#pragma once

#include "confzero/metric.hpp"
#include "confzero/rng.hpp"

namespace confzero {

// Conformal vector field on flat pseudo-Euclidean space:
//
//   v(x) = w + Bx + cx + 2<u,x>x - <x,x>u,    <.,.> = g,  B g-skew.
//
// w generates translations, B rotations, c the dilation, u the special
// conformal part. Every conformal field of the flat space has this form.
struct FlatConformalField {
  Eigen::VectorXd w;
  Eigen::MatrixXd B;
  double c = 0.0;
  Eigen::VectorXd u;
};

// 1-jet data of a conformal field at a point, plus the conformal factor
// phi = (2/n) div v and its differential. For fields of the family above
// dphi is the constant covector 4 u-flat.
struct PointJet {
  Eigen::VectorXd x;
  Eigen::VectorXd value;
  Eigen::MatrixXd J;       // gradient of v at x
  double phi = 0.0;
  Eigen::RowVectorXd dphi;

  bool at_zero(double tol = kDefaultTol) const {
    return value.norm() <= tol * (1.0 + x.norm());
  }
};

// Conformal rescaling g -> e^tau g recorded through the 1-jet of tau:
// tau(x) = a x + x^T Q x (so tau(0) = 0; only dtau enters jet transport).
struct Rescaling {
  Eigen::RowVectorXd a;
  Eigen::MatrixXd Q;

  Eigen::RowVectorXd dtau(const Eigen::VectorXd& x) const {
    return a + 2.0 * (x.transpose() * Q);
  }
};

// Validates dimensions and g-skewness of B; throws std::invalid_argument.
FlatConformalField make_field(const Eigen::VectorXd& w,
                              const Eigen::MatrixXd& B, double c,
                              const Eigen::VectorXd& u, const MetricSpace& M,
                              double tol = kDefaultTol);

Eigen::VectorXd evaluate(const FlatConformalField& f, const Eigen::VectorXd& x,
                         const MetricSpace& M);

// Closed-form 1-jet:
//   J(x)  = B + (c + 2<u,x>) Id + 2 x (gu)^T - 2 u (gx)^T
//   phi   = 2c + 4<u,x>
//   dphi  = 4 (gu)^T
// These satisfy 2 sym_part(J) = phi Id identically (the conformal identity
// g J + (g J)^T = phi g in lowered form).
PointJet jet_at(const FlatConformalField& f, const Eigen::VectorXd& x,
                const MetricSpace& M);

// Max-norm of g J + (g J)^T - phi g; zero iff the jet is conformal.
double conformal_residual(const PointJet& jet, const MetricSpace& M);

// Lie bracket [f1, f2](x) = J2(x) v1(x) - J1(x) v2(x), re-expressed in
// (w,B,c,u) parameters. The family is closed under brackets; the result is
// verified against the defining identity at 20 fixed pseudo-random points
// and a std::runtime_error is thrown if the residual exceeds tol.
FlatConformalField bracket(const FlatConformalField& f1,
                           const FlatConformalField& f2, const MetricSpace& M,
                           double tol = 1e-8);

// Jet transport under the conformal change e^tau g at a zero of v:
// phi and J are unchanged, dphi gains the correction (dtau at x) composed
// with J. Requires jet.at_zero(tol).
PointJet rescaled_jet(const PointJet& jet, const Rescaling& resc,
                      double tol = kDefaultTol);

// Reconstructs the unique field of the family whose jet at jet.x matches
// the given jet data. Throws if the jet is not conformal (B not g-skew).
FlatConformalField field_from_jet(const PointJet& jet, const MetricSpace& M,
                                  double tol = 1e-7);

// Random field with parameters of unit scale; B built from gaussian
// parameters via skew_from_params.
FlatConformalField random_field(const MetricSpace& M, Rng& rng);

}  // namespace confzero
