#pragma once

#include "confzero/field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace confzero {

// Monic characteristic polynomial det(tI - A); coeffs[k] multiplies t^k for
// k = 0..n-1, the leading coefficient 1 is implicit. Computed from balanced
// eigenvalues, stable for the desk-scale matrices used here.
struct CharPoly {
  Eigen::VectorXd coeffs;
};

CharPoly char_poly(const Eigen::MatrixXd& A);

// Max-norm distance between coefficient vectors; throws on degree mismatch.
double char_poly_distance(const CharPoly& a, const CharPoly& b);

// Conformal 2-jet invariants of a field at a zero x:
//   (T, [eta], B, lambda, delta)
// with B the skew-adjoint part of 2 grad v, lambda = (2/n) tr grad v = phi,
// and delta the restriction of dphi to Ker(B + lambda Id) = Ker grad v.
// eta is carried by the stored space; its homothety class (all nonzero
// multiples, negative ones swap the signature) is what equivalence uses.
struct Quintuple {
  MetricSpace space;
  Eigen::MatrixXd B;
  double lambda = 0.0;
  Subspace kernel_B_lambda;
  Eigen::RowVectorXd delta;  // coefficients on kernel_B_lambda.basis columns

  bool delta_vanishes(double tol = kDefaultTol) const {
    return delta.size() == 0 || delta.cwiseAbs().maxCoeff() <= tol;
  }
};

// Requires jet.at_zero(tol); throws std::invalid_argument otherwise.
Quintuple extract_quintuple(const PointJet& jet, const MetricSpace& M,
                            double tol = kDefaultTol);

// Cheap necessary conditions for algebraic equivalence of quintuples, run
// in a fixed order; the first failing check refutes equivalence outright.
struct BatteryCheck {
  std::string name;
  bool pass;
};
struct BatteryResult {
  bool pass = true;
  std::string first_failure;
  std::vector<BatteryCheck> checks;
};

BatteryResult invariant_battery(const Quintuple& q1, const Quintuple& q2,
                                double tol = 1e-7);

// Witness of algebraic equivalence: Phi with Phi^T eta2 Phi = s eta1,
// Phi B1 Phi^{-1} = B2 and delta1 o Phi^{-1} = delta2 on Ker(B2+lambda).
// s < 0 occurs only on the signature-swap branch.
struct QuintupleWitness {
  Eigen::MatrixXd Phi;
  double s = 1.0;
  double objective = 0.0;           // squared residual the search minimized
  double transport_residual = 0.0;  // max defect of the three transports
};

struct SearchOptions {
  int starts = 16;
  int budget = 5000;     // objective evaluations per start
  double accept = 1e-14; // objective threshold for success
};

// Seeded multi-start Levenberg-Marquardt over s * exp(g-skew), plus the
// signature-swap branch when applicable. Never proves inequivalence:
// returns nullopt when no witness was found within budget.
std::optional<QuintupleWitness> search_witness(const Quintuple& q1,
                                               const Quintuple& q2,
                                               std::uint64_t seed,
                                               const SearchOptions& opts = {});

enum class Verdict { Equivalent, Inequivalent, Undecided };

struct EquivalenceVerdict {
  Verdict status = Verdict::Undecided;
  double residual = 0.0;
  std::string detail;
};

// Conformal 1-jet equivalence at zeros: Phi J1 Phi^{-1} = J2 with Phi a
// scalar multiple of an isometry (the scalar cancels in conjugation).
// Inequivalent only via invariant mismatches, never via failed search.
EquivalenceVerdict one_jet_equivalent(const PointJet& jet1,
                                      const MetricSpace& M1,
                                      const PointJet& jet2,
                                      const MetricSpace& M2,
                                      std::uint64_t seed,
                                      const SearchOptions& opts = {});

// Full 2-jet witness: F (value of dF), second derivatives F2[a](j,k), and
// the 1-jet of the conformal factor tau realizing the equivalence.
struct TwoJetWitness {
  Eigen::MatrixXd F;
  double tau = 0.0;
  Eigen::VectorXd sigma;              // auxiliary covector, tau_d = -2 sigma
  Eigen::RowVectorXd tau_d;
  std::vector<Eigen::MatrixXd> F2;    // F2[a](j,k)
  double sigma_residual = 0.0;        // least-squares defect of the sigma solve
};

// Requires qw.s > 0 (throws std::domain_error otherwise: a negative-s
// witness cannot be promoted to a metric-level 2-jet witness).
TwoJetWitness build_two_jet_witness(const PointJet& jet1,
                                    const MetricSpace& M1,
                                    const PointJet& jet2,
                                    const MetricSpace& M2,
                                    const QuintupleWitness& qw);

// Residuals of the four displayed equations of the 2-jet system.
struct SysResiduals {
  double linear = 0.0;             // w^a_c F^c_j = F^a_k v^k_j
  double second = 0.0;             // second-derivative transport
  double metric = 0.0;             // F^T g2 F = e^tau g1
  double metric_derivative = 0.0;  // derivative of the metric equation
  double max_residual = 0.0;
};

SysResiduals verify_sys(const PointJet& jet1, const MetricSpace& M1,
                        const PointJet& jet2, const MetricSpace& M2,
                        const TwoJetWitness& wit);

struct TwoJetResult {
  EquivalenceVerdict verdict;
  std::optional<QuintupleWitness> quintuple_witness;
  std::optional<TwoJetWitness> witness;
  std::optional<SysResiduals> residuals;
};

// Battery -> witness search -> witness construction -> verify_sys.
TwoJetResult two_jet_equivalent(const PointJet& jet1, const MetricSpace& M1,
                                const PointJet& jet2, const MetricSpace& M2,
                                std::uint64_t seed,
                                const SearchOptions& opts = {});

}  // namespace confzero
