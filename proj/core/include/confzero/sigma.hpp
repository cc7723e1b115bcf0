#pragma once

#include "confzero/zeros.hpp"

#include <optional>
#include <vector>

namespace confzero {

// The essential stratum of a zero-set component carries a natural 1-form
// xi. On components where phi vanishes, xi = g(u, .) restricted to the
// stratum tangent, for any section u of Ker grad v with g(u, grad phi) = 1;
// the choice of u does not matter because two admissible sections differ
// by an element of H, which is g-orthogonal to the tangent H ∩ H-perp.
// On components where phi is nonzero, xi is zero by definition.
enum class XiRule { PhiZero, PhiNonzero };

struct XiSample {
  Eigen::VectorXd x;
  Subspace tangent_basis;      // H ∩ H-perp at x
  Eigen::RowVectorXd xi;       // coefficients against tangent_basis.basis
  XiRule defined_by = XiRule::PhiZero;
  double section_agreement = 0.0;  // deviation between two admissible u

  // xi applied to an ambient vector tangent to the stratum.
  double value_on(const Eigen::VectorXd& dir) const {
    if (xi.size() == 0) return 0.0;
    return (xi * (tangent_basis.basis.transpose() * dir)).value();
  }
  bool vanishes(double tol = 1e-9) const { return xi.norm() <= tol; }
};

// Minimal-norm u in Ker grad v with dphi(u) = 1. nullopt when dphi
// annihilates the kernel; at an essential zero with phi = 0 that cannot
// happen, since grad phi is then outside the range of grad v.
std::optional<Eigen::VectorXd> admissible_section(const PointJet& jet,
                                                  double tol = kDefaultTol);

// xi at one essential zero. The sample's tangent basis is model.sing.
// Throws std::domain_error when phi = 0 but no admissible section exists
// (the point cannot then sit on an essential phi = 0 stratum), and
// std::runtime_error when two admissible sections disagree beyond 1e-10,
// which would mean the tangent basis is not orthogonal to H.
XiSample xi_at(const PointJet& jet, const LocalZeroModel& model,
               const MetricSpace& M, double tol = kDefaultTol);

// Max |xi(dir)| along the straight segment x + t dir, |t| <= t_max, with
// xi recomputed at every step. dir must be tangent to the stratum and the
// segment must consist of essential zeros; violations throw. A direction
// in Ker xi_x stays in the kernel along a geodesic of the stratum, so for
// such dir the result is numerically zero; callers probe non-kernel
// directions to see a far larger value.
double xi_kernel_transport(const FlatConformalField& f, const MetricSpace& M,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& dir, double t_max = 0.3,
                           int steps = 13, double tol = kDefaultTol);

// Least-squares fit of sym = mu ⊙ xi, i.e. sym_jk = mu_j xi_k + mu_k xi_j.
// restricted_residual is the size of sym on Ker xi ⊗ Ker xi, which must
// vanish exactly when sym is divisible by xi; fit_residual is the max-norm
// defect of the fitted equation.
struct DivisibilityFit {
  Eigen::VectorXd mu;
  double restricted_residual = 0.0;
  double fit_residual = 0.0;
};

DivisibilityFit fit_divisibility(const Eigen::MatrixXd& sym,
                                 const Eigen::RowVectorXd& xi,
                                 double tol = kDefaultTol);

// Symmetrized derivative of xi in the affine chart of the stratum at x,
// estimated by centered differences with Richardson extrapolation, plus
// the divisibility fit. The chart basis is fixed at x (the stratum is an
// affine subspace here, so its induced connection is the flat one and
// plain difference quotients compute D xi).
struct SymDxiCheck {
  Eigen::MatrixXd sym;        // (D xi)_jk + (D xi)_kj in the chart
  Eigen::RowVectorXd xi;      // xi at x in the chart
  Eigen::VectorXd mu;
  double restricted_residual = 0.0;
  double fit_residual = 0.0;
};

// Throws std::invalid_argument when xi vanishes at x (the divisibility
// statement is about the open set where xi is nonzero).
SymDxiCheck sym_dxi_divisibility(const FlatConformalField& f,
                                 const MetricSpace& M,
                                 const Eigen::VectorXd& x, double h = 1e-4,
                                 double tol = kDefaultTol);

// Nullspace distribution of the possibly-degenerate metric on the
// nonsingular stratum: at each sample y, P_y is the radical of g
// restricted to Ker grad v_y. Checks that the radical dimension is
// constant, that its directions are null, that straight lines from y in
// radical directions stay in the zero set, and, when a stratum point is
// given, that the generator y - sigma_point lies in P_y.
struct NullspaceReport {
  int nullity = -1;
  bool nullity_constant = true;
  double worst_null_defect = 0.0;       // |g(p,p)| over radical directions
  double worst_line_residual = 0.0;     // field norm along radical lines
  double worst_generator_residual = 0.0;
  bool generator_checked = false;
  bool vacuous = false;                 // nullity 0: nothing to transport
};

NullspaceReport nullspace_distribution_check(
    const FlatConformalField& f, const MetricSpace& M,
    const std::vector<Eigen::VectorXd>& nonsingular_samples,
    const std::optional<Eigen::VectorXd>& sigma_point = std::nullopt,
    double tol = kDefaultTol);

}  // namespace confzero
