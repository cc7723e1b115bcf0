#include "confzero/sigma.hpp"

#include <cmath>
#include <stdexcept>

namespace confzero {

namespace {

// same yardstick as the zero classification: absolute thresholds that stay
// meaningful where J itself degenerates
double jet_scale(const PointJet& jet) {
  return 1.0 + jet.J.cwiseAbs().maxCoeff() + jet.dphi.cwiseAbs().maxCoeff();
}

// fixed unit-scale coefficients for the second-section probe; any element
// of H works, varied entries avoid accidental cancellation
Eigen::VectorXd probe_coeffs(int d) {
  Eigen::VectorXd r(d);
  for (int i = 0; i < d; ++i) r(i) = 0.5 + 0.37 * static_cast<double>(i % 5);
  return r;
}

}  // namespace

std::optional<Eigen::VectorXd> admissible_section(const PointJet& jet,
                                                  double tol) {
  const Subspace K = gradient_kernel(jet, tol);
  if (K.dim() == 0) return std::nullopt;
  const Eigen::RowVectorXd c = jet.dphi * K.basis;
  if (c.norm() <= tol * (1.0 + jet.dphi.norm())) return std::nullopt;
  return Eigen::VectorXd(K.basis * c.transpose() / c.squaredNorm());
}

XiSample xi_at(const PointJet& jet, const LocalZeroModel& model,
               const MetricSpace& M, double tol) {
  if ((jet.x - model.x).norm() > 1e-9 * (1.0 + jet.x.norm())) {
    throw std::invalid_argument("xi_at: jet and model disagree on the base point");
  }
  XiSample s;
  s.x = jet.x;
  s.tangent_basis = model.sing;
  if (std::abs(jet.phi) > tol * jet_scale(jet)) {
    s.defined_by = XiRule::PhiNonzero;
    s.xi = Eigen::RowVectorXd::Zero(model.sing.dim());
    return s;
  }
  s.defined_by = XiRule::PhiZero;
  const auto u = admissible_section(jet, tol);
  if (!u) {
    throw std::domain_error(
        "xi_at: phi vanishes but dphi annihilates Ker grad v; no essential "
        "phi = 0 stratum passes through this point");
  }
  const Eigen::MatrixXd& E = model.sing.basis;
  s.xi = M.lower(*u) * E;
  const Subspace H = simultaneous_kernel(jet, M, tol);
  if (H.dim() > 0) {
    const Eigen::VectorXd u2 = *u + H.basis * probe_coeffs(H.dim());
    const Eigen::RowVectorXd xi2 = M.lower(u2) * E;
    s.section_agreement = (xi2 - s.xi).norm();
  }
  if (s.section_agreement > 1e-10 * (1.0 + s.xi.norm())) {
    throw std::runtime_error(
        "xi_at: two admissible sections disagree on the stratum tangent");
  }
  return s;
}

double xi_kernel_transport(const FlatConformalField& f, const MetricSpace& M,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& dir, double t_max, int steps,
                           double tol) {
  if (steps < 2 || t_max <= 0.0) {
    throw std::invalid_argument("xi_kernel_transport: need steps >= 2 and t_max > 0");
  }
  {
    const PointJet base = jet_at(f, x, M);
    if (!base.at_zero(1e-8)) {
      throw std::domain_error("xi_kernel_transport: x is not a zero");
    }
    const LocalZeroModel model = essential_zero_model(base, M, tol);
    if (!model.sing.contains(dir, 1e-7)) {
      throw std::domain_error(
          "xi_kernel_transport: dir is not tangent to the stratum");
    }
  }
  double worst = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = -t_max + 2.0 * t_max * i / (steps - 1);
    const PointJet jet = jet_at(f, x + t * dir, M);
    if (!jet.at_zero(1e-8)) {
      throw std::domain_error(
          "xi_kernel_transport: point on the segment is not a zero");
    }
    const ZeroClassification cls = classify_zero(jet, M, tol);
    if (!cls.essential) {
      throw std::domain_error(
          "xi_kernel_transport: segment leaves the essential stratum");
    }
    const LocalZeroModel model = essential_zero_model(jet, M, tol);
    if (!model.sing.contains(dir, 1e-7)) {
      throw std::domain_error(
          "xi_kernel_transport: dir is not tangent to the stratum");
    }
    const XiSample s = xi_at(jet, model, M, tol);
    worst = std::max(worst, std::abs(s.value_on(dir)));
  }
  return worst;
}

DivisibilityFit fit_divisibility(const Eigen::MatrixXd& sym,
                                 const Eigen::RowVectorXd& xi, double tol) {
  const int k = static_cast<int>(xi.size());
  if (sym.rows() != k || sym.cols() != k) {
    throw std::invalid_argument("fit_divisibility: dimension mismatch");
  }
  DivisibilityFit out;
  out.mu = Eigen::VectorXd::Zero(k);
  if (k == 0) return out;

  // mu from least squares on sym_jk = mu_j xi_k + mu_k xi_j
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k * k, k);
  Eigen::VectorXd b(k * k);
  for (int j = 0; j < k; ++j) {
    for (int l = 0; l < k; ++l) {
      A(j * k + l, j) += xi(l);
      A(j * k + l, l) += xi(j);
      b(j * k + l) = sym(j, l);
    }
  }
  out.mu = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
  const Eigen::MatrixXd fitted =
      out.mu * xi + (out.mu * xi).transpose();
  out.fit_residual = (sym - fitted).cwiseAbs().maxCoeff();

  // any divisible sym vanishes on Ker xi x Ker xi
  const Subspace K0 = kernel(Eigen::MatrixXd(xi), tol);
  if (K0.dim() > 0) {
    out.restricted_residual =
        (K0.basis.transpose() * sym * K0.basis).cwiseAbs().maxCoeff();
  }
  return out;
}

SymDxiCheck sym_dxi_divisibility(const FlatConformalField& f,
                                 const MetricSpace& M,
                                 const Eigen::VectorXd& x, double h,
                                 double tol) {
  const PointJet jet0 = jet_at(f, x, M);
  if (!jet0.at_zero(1e-8)) {
    throw std::invalid_argument("sym_dxi_divisibility: x is not a zero");
  }
  const LocalZeroModel model0 = essential_zero_model(jet0, M, tol);
  const XiSample xi0 = xi_at(jet0, model0, M, tol);
  if (xi0.defined_by == XiRule::PhiNonzero || xi0.vanishes(tol)) {
    throw std::invalid_argument(
        "sym_dxi_divisibility: xi vanishes at x; divisibility concerns the "
        "open set where xi is nonzero");
  }
  const Eigen::MatrixXd E = model0.sing.basis;  // chart fixed at x
  const int k = static_cast<int>(E.cols());

  // xi components in the fixed chart, bypassing per-point model bases whose
  // orientation is not coherent across nearby points
  const auto chart_xi = [&](const Eigen::VectorXd& s) {
    const PointJet jet = jet_at(f, x + E * s, M);
    if (!jet.at_zero(1e-8)) {
      throw std::domain_error(
          "sym_dxi_divisibility: chart point left the zero set");
    }
    const auto u = admissible_section(jet, tol);
    if (!u) {
      throw std::domain_error(
          "sym_dxi_divisibility: chart point left the essential stratum");
    }
    return Eigen::RowVectorXd(M.lower(*u) * E);
  };

  const auto diff_at = [&](double step) {
    Eigen::MatrixXd D(k, k);
    for (int b = 0; b < k; ++b) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(k, b) * step;
      D.col(b) = (chart_xi(e) - chart_xi(-e)).transpose() / (2.0 * step);
    }
    return D;
  };

  // centered differences with one Richardson step
  const Eigen::MatrixXd D = (4.0 * diff_at(h / 2.0) - diff_at(h)) / 3.0;

  SymDxiCheck out;
  out.sym = D + D.transpose();
  out.xi = xi0.xi;
  const DivisibilityFit fit = fit_divisibility(out.sym, out.xi, tol);
  out.mu = fit.mu;
  out.restricted_residual = fit.restricted_residual;
  out.fit_residual = fit.fit_residual;
  return out;
}

NullspaceReport nullspace_distribution_check(
    const FlatConformalField& f, const MetricSpace& M,
    const std::vector<Eigen::VectorXd>& nonsingular_samples,
    const std::optional<Eigen::VectorXd>& sigma_point, double tol) {
  if (nonsingular_samples.empty()) {
    throw std::invalid_argument("nullspace_distribution_check: no samples");
  }
  NullspaceReport rep;
  for (const Eigen::VectorXd& y : nonsingular_samples) {
    const PointJet jet = jet_at(f, y, M);
    if (!jet.at_zero(1e-8)) {
      throw std::invalid_argument(
          "nullspace_distribution_check: sample is not a zero");
    }
    const Subspace tangent = gradient_kernel(jet, tol);
    const Subspace rad =
        intersect(tangent, orth_complement(tangent, M, tol), tol);
    if (rep.nullity < 0) {
      rep.nullity = rad.dim();
    } else if (rad.dim() != rep.nullity) {
      rep.nullity_constant = false;
    }
    for (int i = 0; i < rad.dim(); ++i) {
      const Eigen::VectorXd p = rad.basis.col(i);
      rep.worst_null_defect =
          std::max(rep.worst_null_defect, std::abs(M.inner(p, p)));
      for (double t : {-0.2, -0.15, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2}) {
        rep.worst_line_residual = std::max(
            rep.worst_line_residual, evaluate(f, y + t * p, M).norm());
      }
    }
    if (sigma_point) {
      const Eigen::VectorXd gen = y - *sigma_point;
      if (gen.norm() > 1e-12) {
        rep.generator_checked = true;
        rep.worst_generator_residual =
            std::max(rep.worst_generator_residual,
                     (gen - rad.project(gen)).norm() / gen.norm());
      }
    }
  }
  rep.vacuous = rep.nullity == 0 && rep.nullity_constant;
  return rep;
}

}  // namespace confzero
