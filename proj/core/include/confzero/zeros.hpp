#pragma once

#include "confzero/field.hpp"
#include "confzero/jets.hpp"
#include "confzero/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace confzero {

// Axis-aligned sampling region.
struct Box {
  Eigen::VectorXd lo, hi;

  static Box centered(int n, double half_width) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(n, -half_width);
    b.hi = Eigen::VectorXd::Constant(n, half_width);
    return b;
  }
  bool contains(const Eigen::VectorXd& x, double slack = 1e-9) const {
    return (x.array() >= lo.array() - slack).all() &&
           (x.array() <= hi.array() + slack).all();
  }
  double max_extent() const { return (hi - lo).maxCoeff(); }
};

struct NewtonOptions {
  int grid = 7;           // seeds per axis
  int max_iter = 80;      // generous: convergence is linear at cone vertices
  double tol = kDefaultTol;
  double dedup = 1e-6;    // sampling resolution; closer points collapse
  double max_norm = 1e3;  // abandon diverging iterates
};

// Grid-seeded damped Newton applied to the (quadratic) field. Steps use a
// least-squares solve, so singular Jacobians on the zero set are fine.
// Returns the deduplicated converged points inside the box, sorted
// lexicographically. The result samples the zero set at the grid
// resolution; it is not a parametrization.
std::vector<Eigen::VectorXd> find_zeros(const FlatConformalField& f,
                                        const MetricSpace& M, const Box& box,
                                        const NewtonOptions& opts = {});

// Refine a single starting point to a zero; nullopt when Newton fails.
std::optional<Eigen::VectorXd> refine_zero(const FlatConformalField& f,
                                           const MetricSpace& M,
                                           const Eigen::VectorXd& seed,
                                           const NewtonOptions& opts = {});

// Ker grad v at the jet's base point. The singular-value cutoff is tol
// times the jet scale 1 + |J| + |dphi|, an absolute yardstick: it keeps
// points converged onto a degenerate zero up to rounding classified like
// the exact zero, where J itself vanishes.
Subspace gradient_kernel(const PointJet& jet, double tol = kDefaultTol);

// Ker grad v  intersected with  Ker dphi, with the same cutoff convention.
Subspace simultaneous_kernel(const PointJet& jet, const MetricSpace& M,
                             double tol = kDefaultTol);

// Trichotomy at a zero. A zero is nonessential when phi vanishes and
// grad phi lies in the range of grad v; then some conformal rescaling makes
// the field Killing nearby. Essential zeros split by the restricted metric
// on H = Ker grad v ∩ Ker dphi: semidefinite means the zero is a nonsingular
// point of the zero set, indefinite means a singular one.
enum class ZeroCase { Nonessential, EssentialNonsingular, EssentialSingular };

const char* to_string(ZeroCase c);

struct ZeroClassification {
  ZeroCase kind = ZeroCase::Nonessential;
  bool essential = false;

  double phi = 0.0;
  double phi_threshold = 0.0;     // |phi| below this counts as zero
  double range_residual = 0.0;    // relative defect of grad v y = grad phi
  double range_threshold = 0.0;

  Subspace H;                     // simultaneous kernel
  Eigen::MatrixXd gram;           // g restricted to H
  Eigen::VectorXd gram_eigenvalues;
  int gram_positive = 0, gram_negative = 0, gram_null = 0;
  bool semidefinite = true;

  int rank_J = 0;
  int kernel_J_dim = 0;
};

// Requires jet.at_zero(tol); throws std::invalid_argument otherwise.
ZeroClassification classify_zero(const PointJet& jet, const MetricSpace& M,
                                 double tol = kDefaultTol);

// Local description of the zero set near a zero x:
//   cone model   zeros = x + (C ∩ H), singular stratum x + (H ∩ H-perp)
//   plane model  zeros = x + H       (Killing fields)
// with C the null cone of g and H the simultaneous kernel at x.
struct LocalZeroModel {
  Eigen::VectorXd x;
  bool cone = true;
  Subspace H;
  Subspace sing;            // tangent H ∩ H-perp of the essential stratum
                            // (cone models only; empty for plane models)
  Eigen::MatrixXd g;        // ambient metric, for the null test
  Eigen::MatrixXd gram;     // g restricted to H
  Eigen::MatrixXd gram_vecs;   // eigenvectors of gram, in H coordinates
  Eigen::VectorXd gram_vals;

  bool contains(const Eigen::VectorXd& y, double tol = 1e-6) const;

  // Euclidean-unit directions h with x + t h in the model for all t:
  // null directions of gram for the cone model, any H direction otherwise.
  // Empty when the model admits none (isolated zero).
  std::vector<Eigen::VectorXd> sample_null_dirs(Rng& rng, int count) const;

  // Euclidean-unit directions outside the model with a quantitative margin:
  // in H with |g(h,h)| >= margin when such directions exist, otherwise
  // Euclidean-orthogonal to H.
  std::vector<Eigen::VectorXd> sample_off_dirs(Rng& rng, int count,
                                               double margin = 0.25) const;
};

// Cone model at an essential zero; throws on nonessential ones.
LocalZeroModel essential_zero_model(const PointJet& jet, const MetricSpace& M,
                                    double tol = kDefaultTol);

// Plane model at a zero of a Killing field (c = 0, u = 0, so phi vanishes
// identically); throws when the field is not Killing or x is not a zero.
// The complement of H always has even dimension here.
LocalZeroModel killing_zero_model(const FlatConformalField& f,
                                  const Eigen::VectorXd& x,
                                  const MetricSpace& M,
                                  double tol = kDefaultTol);

struct ZeroSample {
  Eigen::VectorXd x;
  ZeroCase kind;
  double phi = 0.0;
  int rank_J = 0;
  int kernel_J_dim = 0;
};

// Per-component findings of a box scan. Sample indices refer to the
// ScanReport's samples vector.
struct ComponentReport {
  std::vector<int> members;
  bool essential_present = false;
  bool nonessential_present = false;
  bool singular_present = false;
  bool mixed_classification = false;   // essential and nonessential samples
  bool refined = false;                // stats recomputed on a finer grid

  double phi_value = 0.0;
  double phi_spread = 0.0;             // max |phi_i - phi_0| over members
  double char_poly_spread = 0.0;       // max coeff distance to member 0

  // stratified structure, present when singular and nonsingular samples
  // coexist in the component
  int dim_singular = -1;               // dim of the singular stratum model
  int dim_nonsingular = -1;            // dim Ker grad v at nonsingular zeros
  int restricted_rank = -1;            // rank of g on Ker grad v there
  bool sign_pattern_constant = true;
  bool dim_relation_ok = true;         // dim nonsingular - dim singular = r+1
  bool rank_relation_ok = true;        // rank at nonsingular = 2 + singular
  bool rank_relation_applicable = false;

  bool geodesic_segments_ok = true;    // singular stratum segment checks
  bool model_membership_ok = true;
  bool model_membership_checked = false;
  bool codim_even = true;              // plane-model components only

  std::vector<std::string> notes;
};

struct ScanOptions {
  NewtonOptions newton;
  double membership_tol = 1e-6;
  bool refine_on_mixed = true;
};

struct ScanReport {
  std::vector<ZeroSample> samples;
  std::vector<ComponentReport> components;
  std::vector<std::string> warnings;
};

// Finds zeros in the box, groups them into connected components at the
// sampling resolution (adjacent when closer than 3 grid spacings and the
// midpoint refines to a nearby zero), classifies every sample, and checks
// the structural relations of the zero set per component.
ScanReport component_scan(const FlatConformalField& f, const MetricSpace& M,
                          const Box& box, const ScanOptions& opts = {});

// Transport along a straight zero line x + t dir with dir in C ∩ H.
// For constant w with g(dir, w) = 0 the field satisfies, along the line,
//   d/dt [grad v . w] = (1/2) g(w, grad phi) dir
// and g(w, grad phi) stays constant. Residuals are maxima over a basis of
// w directions and over the sampled steps.
struct LineTransportCheck {
  double residual_parallel = 0.0;
  double residual_constant = 0.0;
  double max_point_residual = 0.0;  // worst ||v|| on the sampled line
};

// Throws when x is not a zero, dir is not a null direction in H, or the
// sampled line leaves the zero set.
LineTransportCheck null_line_transport(const FlatConformalField& f,
                                       const MetricSpace& M,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dir,
                                       double t_max = 0.5, int steps = 11,
                                       double tol = 1e-7);

}  // namespace confzero
