#include "confzero/jets.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "confzero/rng.hpp"

namespace confzero {

namespace {

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> ev(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) ev[i] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

// Rank via the usual relative cutoff, with an absolute zero floor: a matrix
// whose largest singular value is below the floor counts as the zero matrix.
// Powers of a numerically nilpotent map are pure rounding dust, and a
// relative cutoff alone reads dust as near-full rank; the floor is the only
// sound way to see it as zero. Above the floor the relative rule stays in
// force, so genuinely small spectra survive conjugation consistently.
int rank_with_floor(const Eigen::MatrixXd& A, double floor_value) {
  const auto sv = A.jacobiSvd().singularValues();
  if (sv.size() == 0 || sv(0) <= floor_value) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    r += sv(i) > kDefaultTol * sv(0);
  return r;
}

double operator_norm(const Eigen::MatrixXd& A) {
  return A.jacobiSvd().singularValues()(0);
}

}  // namespace

CharPoly char_poly(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.rows() != A.cols())
    throw std::invalid_argument("char_poly: square matrix required");
  const auto ev = sorted_eigenvalues(A);
  // expand prod (t - ev_i); conjugate pairs keep the result real
  std::vector<std::complex<double>> c(n + 1, 0.0);
  c[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) c[k] -= ev[i] * c[k - 1];
  // c[k] multiplies t^{n-k}; repack ascending, drop the monic lead
  CharPoly p;
  p.coeffs.resize(n);
  for (int k = 0; k < n; ++k) p.coeffs(k) = c[n - k].real();
  return p;
}

double char_poly_distance(const CharPoly& a, const CharPoly& b) {
  if (a.coeffs.size() != b.coeffs.size())
    throw std::invalid_argument("char_poly_distance: degree mismatch");
  return (a.coeffs - b.coeffs).cwiseAbs().maxCoeff();
}

Quintuple extract_quintuple(const PointJet& jet, const MetricSpace& M,
                            double tol) {
  if (!jet.at_zero(tol))
    throw std::invalid_argument("extract_quintuple: jet must be at a zero");
  const int n = M.dim();
  Quintuple q{M, {}, 0.0, {}, {}};
  q.B = 2.0 * M.skew_part(jet.J);
  q.lambda = 2.0 * jet.J.trace() / n;
  // at a zero B + lambda Id = 2 grad v, so this kernel is Ker grad v
  q.kernel_B_lambda =
      kernel(q.B + q.lambda * Eigen::MatrixXd::Identity(n, n), tol);
  q.delta = jet.dphi * q.kernel_B_lambda.basis;
  return q;
}

BatteryResult invariant_battery(const Quintuple& q1, const Quintuple& q2,
                                double tol) {
  BatteryResult R;
  const auto add = [&R](const std::string& name, bool ok) {
    R.checks.push_back({name, ok});
    if (!ok && R.pass) {
      R.pass = false;
      R.first_failure = name;
    }
  };

  const int n1 = q1.space.dim(), n2 = q2.space.dim();
  add("ambient-dim", n1 == n2);
  if (!R.pass) return R;

  add("lambda", std::abs(q1.lambda - q2.lambda) <=
                    tol * (1.0 + std::max(std::abs(q1.lambda),
                                          std::abs(q2.lambda))));

  const auto sig1 = std::pair(q1.space.p(), q1.space.q());
  const auto sig2 = std::pair(q2.space.p(), q2.space.q());
  add("eta-signature", sig1 == sig2 ||
                           sig1 == std::pair(sig2.second, sig2.first));

  const double base = std::max({1.0, operator_norm(q1.B), operator_norm(q2.B)});
  add("rank-B", rank_with_floor(q1.B, tol * base) ==
                    rank_with_floor(q2.B, tol * base));
  add("kernel-dim", q1.kernel_B_lambda.dim() == q2.kernel_B_lambda.dim());
  add("delta-vanishing", q1.delta_vanishes(tol) == q2.delta_vanishes(tol));

  bool powers_ok = true;
  Eigen::MatrixXd P1 = q1.B, P2 = q2.B;
  double floor_k = tol * base;
  for (int k = 2; k <= n1 && powers_ok; ++k) {
    P1 = P1 * q1.B;
    P2 = P2 * q2.B;
    floor_k *= base;
    powers_ok = rank_with_floor(P1, floor_k) == rank_with_floor(P2, floor_k);
  }
  add("rank-B-powers", powers_ok);

  // conformal isomorphisms conjugate B without scaling, so eigenvalues must
  // match exactly (not merely up to ratio), in either signature branch.
  // Multisets are compared by greedy nearest matching: lexicographic sorting
  // is unstable when real parts are rounding noise, as for skew spectra.
  const auto ev1 = sorted_eigenvalues(q1.B);
  auto ev2 = sorted_eigenvalues(q2.B);
  double scale = 1.0;
  for (const auto& e : ev2) scale = std::max(scale, std::abs(e));
  double eig_dist = 0.0;
  for (const auto& e1 : ev1) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < ev2.size(); ++j)
      if (std::abs(e1 - ev2[j]) < std::abs(e1 - ev2[best])) best = j;
    eig_dist = std::max(eig_dist, std::abs(e1 - ev2[best]));
    ev2.erase(ev2.begin() + static_cast<std::ptrdiff_t>(best));
  }
  add("eigenvalues-B", eig_dist <= tol * scale);

  return R;
}

namespace {

// eta = C diag(I_p, -I_q) C^T with eigenvalues sorted descending.
Eigen::MatrixXd congruence_factor(const MetricSpace& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.g());
  const int n = M.dim();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  Eigen::MatrixXd C(n, n);
  for (int j = 0; j < n; ++j)
    C.col(j) = es.eigenvectors().col(idx[j]) *
               std::sqrt(std::abs(es.eigenvalues()(idx[j])));
  return C;
}

// Base map with W0^T eta2 W0 = +eta1 (same signature) or -eta1 (swap).
Eigen::MatrixXd base_map(const MetricSpace& M1, const MetricSpace& M2,
                         bool swap) {
  const int n = M1.dim();
  const Eigen::MatrixXd C1 = congruence_factor(M1);
  const Eigen::MatrixXd C2 = congruence_factor(M2);
  Eigen::MatrixXd W0;
  if (!swap) {
    W0 = C2.transpose().fullPivLu().solve(C1.transpose());
  } else {
    // P (a;b) = (b;a) re-sorts the swapped signature blocks
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    const int p1 = M1.p(), q1 = M1.q();
    for (int i = 0; i < q1; ++i) P(i, p1 + i) = 1.0;
    for (int i = 0; i < p1; ++i) P(q1 + i, i) = 1.0;
    W0 = C2.transpose().fullPivLu().solve(P * C1.transpose());
  }
  const double sign = swap ? -1.0 : 1.0;
  const double defect =
      (W0.transpose() * M2.g() * W0 - sign * M1.g()).cwiseAbs().maxCoeff();
  if (defect > 1e-8)
    throw std::runtime_error("base_map: congruence construction failed");
  return W0;
}

struct LMResult {
  Eigen::VectorXd p;
  double obj;
};

// Levenberg-Marquardt with forward-difference Jacobian; the budget counts
// residual evaluations. Converges to the exact root despite the approximate
// Jacobian (the root is a fixed point of the update).
LMResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& r,
    Eigen::VectorXd p0, int budget, double accept) {
  int evals = 0;
  const auto eval = [&](const Eigen::VectorXd& p) {
    ++evals;
    Eigen::VectorXd v = r(p);
    if (!v.allFinite())
      v = Eigen::VectorXd::Constant(v.size(), 1e30);
    return v;
  };

  const int m = static_cast<int>(p0.size());
  Eigen::VectorXd p = p0;
  Eigen::VectorXd rv = eval(p);
  double obj = rv.squaredNorm();
  double mu = 1e-3;
  const double fd = 1e-7;
  // polish well past the acceptance threshold; converged runs reach the
  // rounding floor in a couple of extra iterations, diverging ones exit
  // through stagnation or the budget
  const double floor_obj = std::min(accept, 1e-24);

  while (obj > floor_obj && evals + m + 1 <= budget) {
    Eigen::MatrixXd Jm(rv.size(), m);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd pp = p;
      pp(i) += fd;
      Jm.col(i) = (eval(pp) - rv) / fd;
    }
    const Eigen::MatrixXd JtJ = Jm.transpose() * Jm;
    const Eigen::VectorXd g = Jm.transpose() * rv;

    bool accepted = false;
    for (int tries = 0; tries < 14 && evals < budget; ++tries) {
      const Eigen::VectorXd dp =
          (JtJ + mu * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(-g);
      const Eigen::VectorXd rv2 = eval(p + dp);
      const double obj2 = rv2.squaredNorm();
      if (obj2 < obj) {
        p += dp;
        rv = rv2;
        obj = obj2;
        mu = std::max(mu * 0.3, 1e-14);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) break;
  }
  return {p, obj};
}

struct TransportProblem {
  const Quintuple* q1;
  const Quintuple* q2;
  Eigen::MatrixXd W0;
  bool swap;
  bool use_scale;  // optimize log s only when delta is in play
  Eigen::MatrixXd W0_inv;
  Eigen::RowVectorXd delta1_ext;  // delta1 extended by zero off the kernel

  Eigen::MatrixXd phi(const Eigen::VectorXd& params) const {
    const int n = q1->space.dim();
    const int m = n * (n - 1) / 2;
    const Eigen::MatrixXd R =
        isometry_from_params(params.head(m), q1->space);
    const double t = use_scale ? params(m) : 0.0;
    return std::exp(t / 2.0) * W0 * R;
  }

  double scale(const Eigen::VectorXd& params) const {
    const int m = q1->space.dim() * (q1->space.dim() - 1) / 2;
    const double t = use_scale ? params(m) : 0.0;
    return (swap ? -1.0 : 1.0) * std::exp(t);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& params) const {
    const int n = q1->space.dim();
    const int m = n * (n - 1) / 2;
    const Eigen::MatrixXd R =
        isometry_from_params(params.head(m), q1->space);
    // isometry inverse is exact: R^{-1} = g^{-1} R^T g
    const Eigen::MatrixXd R_inv =
        q1->space.g_inv() * R.transpose() * q1->space.g();
    const Eigen::MatrixXd conj = W0 * R * q1->B * R_inv * W0_inv;

    const int d2 = q2->kernel_B_lambda.dim();
    Eigen::VectorXd r(n * n + d2);
    Eigen::Map<Eigen::MatrixXd>(r.data(), n, n) = conj - q2->B;
    if (d2 > 0) {
      const double t = use_scale ? params(m) : 0.0;
      // delta1 o Phi^{-1} on the target kernel basis
      const Eigen::MatrixXd Phi_inv =
          std::exp(-t / 2.0) * R_inv * W0_inv;
      const Eigen::RowVectorXd transported =
          delta1_ext * (Phi_inv * q2->kernel_B_lambda.basis);
      r.tail(d2) = (transported - q2->delta).transpose();
    }
    return r;
  }
};

double transport_defect(const Quintuple& q1, const Quintuple& q2,
                        const Eigen::MatrixXd& Phi, double s) {
  const double d_eta =
      (Phi.transpose() * q2.space.g() * Phi - s * q1.space.g())
          .cwiseAbs()
          .maxCoeff();
  const Eigen::MatrixXd Phi_inv = Phi.inverse();
  const double d_B = (Phi * q1.B * Phi_inv - q2.B).cwiseAbs().maxCoeff();
  double d_delta = 0.0;
  if (q2.kernel_B_lambda.dim() > 0) {
    const Eigen::RowVectorXd delta1_ext =
        q1.delta * q1.kernel_B_lambda.basis.transpose();
    d_delta = (delta1_ext * (Phi_inv * q2.kernel_B_lambda.basis) - q2.delta)
                  .cwiseAbs()
                  .maxCoeff();
  }
  return std::max({d_eta, d_B, d_delta});
}

}  // namespace

std::optional<QuintupleWitness> search_witness(const Quintuple& q1,
                                               const Quintuple& q2,
                                               std::uint64_t seed,
                                               const SearchOptions& opts) {
  if (q1.space.dim() != q2.space.dim()) return std::nullopt;
  const auto sig1 = std::pair(q1.space.p(), q1.space.q());
  const auto sig2 = std::pair(q2.space.p(), q2.space.q());

  std::vector<bool> branches;
  if (sig1 == sig2) branches.push_back(false);
  if (sig1 == std::pair(sig2.second, sig2.first)) branches.push_back(true);
  if (branches.empty()) return std::nullopt;

  const int n = q1.space.dim();
  const int m = n * (n - 1) / 2;
  const bool use_scale = !q1.delta_vanishes() || !q2.delta_vanishes();

  Rng rng(seed);
  for (const bool swap : branches) {
    TransportProblem prob;
    prob.q1 = &q1;
    prob.q2 = &q2;
    prob.swap = swap;
    prob.use_scale = use_scale;
    prob.W0 = base_map(q1.space, q2.space, swap);
    prob.W0_inv = prob.W0.inverse();
    prob.delta1_ext = q1.delta * q1.kernel_B_lambda.basis.transpose();

    const auto fn = [&prob](const Eigen::VectorXd& p) {
      return prob.residual(p);
    };

    for (int start = 0; start < opts.starts; ++start) {
      Eigen::VectorXd p0 = Eigen::VectorXd::Zero(m + (use_scale ? 1 : 0));
      if (start > 0) {
        const double spread = 0.25 * (1 + (start - 1) % 4);
        p0.head(m) = spread * rng.gauss_vec(m);
        if (use_scale) p0(m) = rng.gauss();
      }
      const LMResult res =
          levenberg_marquardt(fn, p0, opts.budget, opts.accept);
      if (res.obj < opts.accept) {
        QuintupleWitness w;
        w.Phi = prob.phi(res.p);
        w.s = prob.scale(res.p);
        w.objective = res.obj;
        w.transport_residual = transport_defect(q1, q2, w.Phi, w.s);
        return w;
      }
    }
  }
  return std::nullopt;
}

EquivalenceVerdict one_jet_equivalent(const PointJet& jet1,
                                      const MetricSpace& M1,
                                      const PointJet& jet2,
                                      const MetricSpace& M2,
                                      std::uint64_t seed,
                                      const SearchOptions& opts) {
  const double tol = 1e-7;
  if (M1.dim() != M2.dim())
    return {Verdict::Inequivalent, 0.0, "ambient-dim"};

  // invariant battery for conjugation by scalar multiples of isometries
  const double cp_dist =
      char_poly_distance(char_poly(jet1.J), char_poly(jet2.J));
  if (cp_dist > tol * (1.0 + jet2.J.cwiseAbs().maxCoeff()))
    return {Verdict::Inequivalent, cp_dist, "char-poly"};
  const double base =
      std::max({1.0, operator_norm(jet1.J), operator_norm(jet2.J)});
  if (rank_with_floor(jet1.J, tol * base) !=
      rank_with_floor(jet2.J, tol * base))
    return {Verdict::Inequivalent, 0.0, "kernel-dim"};
  Eigen::MatrixXd P1 = jet1.J, P2 = jet2.J;
  double floor_k = tol * base;
  for (int k = 2; k <= M1.dim(); ++k) {
    P1 = P1 * jet1.J;
    P2 = P2 * jet2.J;
    floor_k *= base;
    if (rank_with_floor(P1, floor_k) != rank_with_floor(P2, floor_k))
      return {Verdict::Inequivalent, 0.0,
              "rank-power-" + std::to_string(k)};
  }
  const auto sig1 = std::pair(M1.p(), M1.q());
  const auto sig2 = std::pair(M2.p(), M2.q());
  const bool same = sig1 == sig2;
  const bool swappable = sig1 == std::pair(sig2.second, sig2.first);
  if (!same && !swappable)
    return {Verdict::Inequivalent, 0.0, "eta-signature"};

  // search for Phi J1 Phi^{-1} = J2 over both branches
  const int n = M1.dim();
  const int m = n * (n - 1) / 2;
  std::vector<bool> branches;
  if (same) branches.push_back(false);
  if (swappable) branches.push_back(true);

  Rng rng(seed);
  for (const bool swap : branches) {
    Eigen::MatrixXd W0;
    try {
      W0 = base_map(M1, M2, swap);
    } catch (const std::runtime_error&) {
      continue;
    }
    const Eigen::MatrixXd W0_inv = W0.inverse();
    const auto fn = [&](const Eigen::VectorXd& th) {
      const Eigen::MatrixXd R = isometry_from_params(th, M1);
      const Eigen::MatrixXd R_inv = M1.g_inv() * R.transpose() * M1.g();
      Eigen::VectorXd r(n * n);
      Eigen::Map<Eigen::MatrixXd>(r.data(), n, n) =
          W0 * R * jet1.J * R_inv * W0_inv - jet2.J;
      return r;
    };
    for (int start = 0; start < opts.starts; ++start) {
      Eigen::VectorXd p0 = Eigen::VectorXd::Zero(m);
      if (start > 0) p0 = 0.25 * (1 + (start - 1) % 4) * rng.gauss_vec(m);
      const LMResult res = levenberg_marquardt(fn, p0, opts.budget, opts.accept);
      if (res.obj < opts.accept)
        return {Verdict::Equivalent, std::sqrt(res.obj),
                swap ? "swap-branch" : "same-signature"};
    }
  }
  return {Verdict::Undecided, 0.0, "witness search exhausted its budget"};
}

namespace {

// Second derivatives of a conformal field of the flat family, expressed
// through its jet: 2 d_j d_k v^l = dphi_k d^l_j + dphi_j d^l_k - g_jk gradphi^l.
// Valid everywhere because the Hessian of phi vanishes.
double second_derivative(const PointJet& jet, const MetricSpace& M, int l,
                         int j, int k) {
  const Eigen::VectorXd grad_phi = M.raise(jet.dphi);
  double r = 0.0;
  if (l == j) r += jet.dphi(k);
  if (l == k) r += jet.dphi(j);
  r -= M.g()(j, k) * grad_phi(l);
  return 0.5 * r;
}

}  // namespace

TwoJetWitness build_two_jet_witness(const PointJet& jet1,
                                    const MetricSpace& M1,
                                    const PointJet& jet2,
                                    const MetricSpace& M2,
                                    const QuintupleWitness& qw) {
  if (qw.s <= 0.0)
    throw std::domain_error(
        "build_two_jet_witness: witness scale must be positive");
  const int n = M1.dim();
  if (M2.dim() != n)
    throw std::invalid_argument("build_two_jet_witness: dimension mismatch");

  TwoJetWitness w;
  w.F = qw.Phi;
  w.tau = std::log(qw.s);

  // solve dphi1 - dphi2 F = 2 J1^T sigma in the least-squares sense; the
  // delta transport makes the right side orthogonal to Ker J1, so the
  // minimum-norm solution is exact
  const Eigen::RowVectorXd lhs = jet1.dphi - jet2.dphi * w.F;
  const Eigen::MatrixXd A = 2.0 * jet1.J.transpose();
  w.sigma = A.completeOrthogonalDecomposition().solve(lhs.transpose());
  w.sigma_residual = (A * w.sigma - lhs.transpose()).cwiseAbs().maxCoeff();
  w.tau_d = -2.0 * w.sigma.transpose();

  const Eigen::VectorXd sigma_up = M1.g_inv() * w.sigma;
  const Eigen::VectorXd F_sigma_up = w.F * sigma_up;
  w.F2.resize(n);
  for (int a = 0; a < n; ++a) {
    const Eigen::RowVectorXd Fa = w.F.row(a);
    const Eigen::MatrixXd outer = w.sigma * Fa;  // sigma_j F^a_k
    w.F2[a] = F_sigma_up(a) * M1.g() - outer - outer.transpose();
  }
  return w;
}

SysResiduals verify_sys(const PointJet& jet1, const MetricSpace& M1,
                        const PointJet& jet2, const MetricSpace& M2,
                        const TwoJetWitness& wit) {
  const int n = M1.dim();
  SysResiduals R;

  R.linear = (jet2.J * wit.F - wit.F * jet1.J).cwiseAbs().maxCoeff();

  // F^a_l v^l_{,jk} + F^a_{jl} v^l_k + F^a_{kl} v^l_j
  //   = F^b_j F^c_k w^a_{,bc} + F^c_{jk} w^a_c
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double lhs = 0.0, rhs = 0.0;
        for (int l = 0; l < n; ++l) {
          lhs += wit.F(a, l) * second_derivative(jet1, M1, l, j, k);
          lhs += wit.F2[a](j, l) * jet1.J(l, k);
          lhs += wit.F2[a](k, l) * jet1.J(l, j);
        }
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            rhs += wit.F(b, j) * wit.F(c, k) *
                   second_derivative(jet2, M2, a, b, c);
        for (int c = 0; c < n; ++c)
          rhs += wit.F2[c](j, k) * jet2.J(a, c);
        R.second = std::max(R.second, std::abs(lhs - rhs));
      }

  const double etau = std::exp(wit.tau);
  R.metric = (wit.F.transpose() * M2.g() * wit.F - etau * M1.g())
                 .cwiseAbs()
                 .maxCoeff();

  // h_ac (F^a_j F^c_{kl} + F^a_{jl} F^c_k) = e^tau tau_l g_jk
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double lhs = 0.0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c)
            lhs += M2.g()(a, c) * (wit.F(a, j) * wit.F2[c](k, l) +
                                   wit.F2[a](j, l) * wit.F(c, k));
        const double rhs = etau * wit.tau_d(l) * M1.g()(j, k);
        R.metric_derivative = std::max(R.metric_derivative,
                                       std::abs(lhs - rhs));
      }

  R.max_residual = std::max({R.linear, R.second, R.metric,
                             R.metric_derivative});
  return R;
}

TwoJetResult two_jet_equivalent(const PointJet& jet1, const MetricSpace& M1,
                                const PointJet& jet2, const MetricSpace& M2,
                                std::uint64_t seed,
                                const SearchOptions& opts) {
  TwoJetResult out;
  const Quintuple q1 = extract_quintuple(jet1, M1);
  const Quintuple q2 = extract_quintuple(jet2, M2);

  const BatteryResult battery = invariant_battery(q1, q2);
  if (!battery.pass) {
    out.verdict = {Verdict::Inequivalent, 0.0,
                   "battery: " + battery.first_failure};
    return out;
  }

  out.quintuple_witness = search_witness(q1, q2, seed, opts);
  if (!out.quintuple_witness) {
    out.verdict = {Verdict::Undecided, 0.0,
                   "witness search exhausted its budget"};
    return out;
  }

  if (out.quintuple_witness->s <= 0.0) {
    // negative homothety branch: equivalent as quintuples, but no metric
    // level witness with e^tau > 0 exists in these coordinates
    out.verdict = {Verdict::Equivalent,
                   out.quintuple_witness->transport_residual,
                   "equivalent via negative homothety; quintuple-level "
                   "witness only"};
    return out;
  }

  out.witness = build_two_jet_witness(jet1, M1, jet2, M2,
                                      *out.quintuple_witness);
  out.residuals = verify_sys(jet1, M1, jet2, M2, *out.witness);
  if (out.residuals->max_residual > 1e-8) {
    out.verdict = {Verdict::Undecided, out.residuals->max_residual,
                   "2-jet witness failed verification"};
    return out;
  }
  out.verdict = {Verdict::Equivalent, out.residuals->max_residual,
                 "2-jet witness verified"};
  return out;
}

}  // namespace confzero
