#include "confzero/fixtures.hpp"
#include "confzero/jets.hpp"
#include "confzero/sigma.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace confzero;

namespace {

Eigen::VectorXd unit5(int i) { return Eigen::VectorXd::Unit(5, i); }

// spanning directions of the xi-plane fixture's zero plane
Eigen::VectorXd plane_t() { return unit5(0) + unit5(2); }
Eigen::VectorXd plane_m() { return unit5(1) + unit5(3); }

}  // namespace

TEST_CASE("xi on the totally null plane matches its closed form") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd t = plane_t(), m = plane_m();

  // at x = a t + b m the form evaluates to xi(t) = -b/2, xi(m) = a/2
  const std::vector<std::pair<double, double>> pts = {
      {1.0, 0.0}, {0.0, 1.0}, {0.7, -0.4}, {-0.3, 0.5}, {0.25, 0.85}};
  for (const auto& [a, b] : pts) {
    CAPTURE(a);
    CAPTURE(b);
    const Eigen::VectorXd x0 = a * t + b * m;
    const PointJet jet = jet_at(fx.field, x0, fx.space);
    REQUIRE(jet.at_zero(1e-12));
    const LocalZeroModel model = essential_zero_model(jet, fx.space);
    REQUIRE(model.sing.dim() == 2);
    const XiSample s = xi_at(jet, model, fx.space);
    CHECK(s.defined_by == XiRule::PhiZero);
    CHECK(std::abs(s.value_on(t) + b / 2.0) < 1e-10);
    CHECK(std::abs(s.value_on(m) - a / 2.0) < 1e-10);
    CHECK(s.section_agreement <= 1e-10 * (1.0 + s.xi.norm()));
    // the radial direction spans Ker xi
    CHECK(std::abs(s.value_on(x0)) < 1e-10);
  }

  // at the origin the form vanishes (but is defined by the same rule)
  const PointJet jet0 = jet_at(fx.field, Eigen::VectorXd::Zero(5), fx.space);
  const XiSample s0 =
      xi_at(jet0, essential_zero_model(jet0, fx.space), fx.space);
  CHECK(s0.defined_by == XiRule::PhiZero);
  CHECK(s0.vanishes(1e-12));
}

TEST_CASE("xi is declared zero on strata with nonzero phi") {
  const Fixture fx = from_constructor("neutral-counterexample");
  for (double a : {0.5, -0.3, 0.0}) {
    CAPTURE(a);
    Eigen::VectorXd y(4);
    y << a, 0.0, -a, 0.0;
    const PointJet jet = jet_at(fx.field, y, fx.space);
    REQUIRE(jet.at_zero(1e-12));
    REQUIRE(std::abs(jet.phi - 2.0) < 1e-12);
    const LocalZeroModel model = essential_zero_model(jet, fx.space);
    const XiSample s = xi_at(jet, model, fx.space);
    CHECK(s.defined_by == XiRule::PhiNonzero);
    CHECK(s.vanishes());
    Eigen::VectorXd ldir(4);
    ldir << 1.0, 0.0, -1.0, 0.0;
    CHECK(s.value_on(ldir) == 0.0);
  }
}

TEST_CASE("the cone vertex carries the empty covector") {
  const Fixture fx = from_constructor("lorentz-cone");
  const PointJet jet = jet_at(fx.field, fx.base_zero, fx.space);
  const LocalZeroModel model = essential_zero_model(jet, fx.space);
  REQUIRE(model.sing.dim() == 0);
  const XiSample s = xi_at(jet, model, fx.space);
  CHECK(s.defined_by == XiRule::PhiZero);
  CHECK(s.xi.size() == 0);
  CHECK(s.vanishes());
  CHECK(s.value_on(Eigen::VectorXd::Unit(4, 0)) == 0.0);
}

TEST_CASE("admissible sections exist exactly where dphi sees the kernel") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd x0 = 0.6 * plane_t() - 0.2 * plane_m();
  const PointJet jet = jet_at(fx.field, x0, fx.space);
  const auto u = admissible_section(jet);
  REQUIRE(u.has_value());
  CHECK((jet.J * *u).norm() < 1e-9);
  CHECK(std::abs((jet.dphi * *u).value() - 1.0) < 1e-12);

  // Killing field: dphi vanishes identically, no section can pair to 1
  const Fixture rot = from_constructor("rotation(n=4,p=4)");
  CHECK_FALSE(admissible_section(jet_at(rot.field, rot.base_zero, rot.space))
                  .has_value());

  // nonessential cone point: dphi kills Ker grad v even though dphi != 0
  const Fixture cone = from_constructor("lorentz-cone");
  Eigen::VectorXd y(4);
  y << 0.5, 0.0, 0.3, 0.4;
  const PointJet cjet = jet_at(cone.field, y, cone.space);
  REQUIRE(cjet.at_zero(1e-12));
  CHECK_FALSE(admissible_section(cjet).has_value());
}

TEST_CASE("xi transport vanishes along kernel directions only") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd t = plane_t(), m = plane_m();

  // Ker xi at a t + b m is the radial line; moving radially keeps xi(dir) = 0
  const std::vector<std::pair<double, double>> pts = {
      {0.6, -0.3}, {0.4, 0.55}, {-0.5, -0.2}};
  for (const auto& [a, b] : pts) {
    CAPTURE(a);
    CAPTURE(b);
    const Eigen::VectorXd x0 = a * t + b * m;
    CHECK(xi_kernel_transport(fx.field, fx.space, x0, x0) < 1e-7);
  }
  CHECK(xi_kernel_transport(fx.field, fx.space, 0.5 * t, t) < 1e-7);

  // tangent but non-kernel direction: xi(m) = 1/2 on the whole segment
  CHECK(xi_kernel_transport(fx.field, fx.space, t, m) > 0.4);

  // on a phi != 0 stratum xi is zero by declaration, so any tangent
  // direction transports trivially
  const Fixture nf = from_constructor("neutral-counterexample");
  Eigen::VectorXd y0(4), ldir(4);
  y0 << 0.4, 0.0, -0.4, 0.0;
  ldir << 1.0, 0.0, -1.0, 0.0;
  CHECK(xi_kernel_transport(nf.field, nf.space, y0, ldir) <= 1e-15);
}

TEST_CASE("xi transport rejects bad input") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd t = plane_t();
  // not tangent to the stratum
  CHECK_THROWS_AS(xi_kernel_transport(fx.field, fx.space, t, unit5(4)),
                  std::domain_error);
  // base point is not a zero
  CHECK_THROWS_AS(
      xi_kernel_transport(fx.field, fx.space, 0.3 * unit5(0), t),
      std::domain_error);
  // nonessential base: no stratum to transport along
  const Fixture rot = from_constructor("rotation(n=4,p=4)");
  Eigen::VectorXd axis_pt = Eigen::VectorXd::Zero(4);
  axis_pt(2) = 0.5;
  CHECK_THROWS_AS(xi_kernel_transport(rot.field, rot.space, axis_pt,
                                      Eigen::VectorXd::Unit(4, 3)),
                  std::invalid_argument);
  // degenerate parameters
  CHECK_THROWS_AS(xi_kernel_transport(fx.field, fx.space, t, plane_m(), 0.3, 1),
                  std::invalid_argument);
}

TEST_CASE("symmetrized derivative of xi is divisible by xi") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd t = plane_t(), m = plane_m();
  const std::vector<std::pair<double, double>> pts = {
      {1.0, 0.0}, {0.7, -0.4}, {-0.3, 0.5}};
  for (const auto& [a, b] : pts) {
    CAPTURE(a);
    CAPTURE(b);
    const SymDxiCheck chk =
        sym_dxi_divisibility(fx.field, fx.space, a * t + b * m);
    CHECK(chk.xi.norm() > 0.1);
    CHECK(chk.sym.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(chk.restricted_residual < 1e-6);
    CHECK(chk.fit_residual < 1e-6);
    CHECK(chk.mu.norm() < 1e-6);
  }

  // where xi vanishes the statement is vacuous and the check refuses
  CHECK_THROWS_AS(
      sym_dxi_divisibility(fx.field, fx.space, Eigen::VectorXd::Zero(5)),
      std::invalid_argument);
  const Fixture nf = from_constructor("neutral-counterexample");
  Eigen::VectorXd y0(4);
  y0 << 0.4, 0.0, -0.4, 0.0;
  CHECK_THROWS_AS(sym_dxi_divisibility(nf.field, nf.space, y0),
                  std::invalid_argument);
}

TEST_CASE("divisibility fit recovers planted factors and flags corruption") {
  Eigen::RowVectorXd xi(2);
  xi << 0.3, -0.7;
  Eigen::VectorXd mu(2);
  mu << 1.0, 2.0;
  const Eigen::MatrixXd sym = mu * xi + (mu * xi).transpose();
  const DivisibilityFit fit = fit_divisibility(sym, xi);
  CHECK((fit.mu - mu).norm() < 1e-10);
  CHECK(fit.restricted_residual < 1e-12);
  CHECK(fit.fit_residual < 1e-12);

  // the identity matrix is not divisible by any covector
  const DivisibilityFit bad = fit_divisibility(
      Eigen::MatrixXd::Identity(2, 2), Eigen::RowVectorXd::Unit(2, 0));
  CHECK(bad.restricted_residual > 0.9);
  CHECK(bad.fit_residual > 0.4);

  CHECK_THROWS_AS(
      fit_divisibility(Eigen::MatrixXd::Identity(3, 3), xi),
      std::invalid_argument);
}

TEST_CASE("nullspace distribution on the cone's nonsingular stratum") {
  const Fixture fx = from_constructor("lorentz-cone");
  const auto zeros = find_zeros(fx.field, fx.space, fx.box);
  std::vector<Eigen::VectorXd> off;
  for (const auto& z : zeros) {
    if (z.norm() > 0.3) off.push_back(z);
  }
  REQUIRE(off.size() >= 10);
  const NullspaceReport rep = nullspace_distribution_check(
      fx.field, fx.space, off, Eigen::VectorXd::Zero(4));
  CHECK(rep.nullity == 1);
  CHECK(rep.nullity_constant);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.worst_null_defect < 1e-7);
  CHECK(rep.worst_line_residual < 1e-7);
  CHECK(rep.generator_checked);
  CHECK(rep.worst_generator_residual < 1e-7);
}

TEST_CASE("nullspace distribution along the neutral zero line") {
  const Fixture fx = from_constructor("neutral-counterexample");
  std::vector<Eigen::VectorXd> samples;
  for (double a : {0.4, -0.5, 0.7, 0.25, -0.35}) {
    Eigen::VectorXd y(4);
    y << a, 0.0, -a, 0.0;
    samples.push_back(y);
  }
  const NullspaceReport rep = nullspace_distribution_check(
      fx.field, fx.space, samples, Eigen::VectorXd::Zero(4));
  CHECK(rep.nullity == 1);
  CHECK(rep.nullity_constant);
  CHECK(rep.worst_null_defect < 1e-10);
  CHECK(rep.worst_line_residual < 1e-10);
  CHECK(rep.generator_checked);
  CHECK(rep.worst_generator_residual < 1e-10);
}

TEST_CASE("nullspace check is vacuous for definite restricted metrics") {
  const Fixture rot = from_constructor("rotation(n=4,p=4)");
  std::vector<Eigen::VectorXd> samples;
  for (const auto& ab :
       std::vector<std::pair<double, double>>{{0.4, 0.1}, {-0.3, 0.5}}) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
    y(2) = ab.first;
    y(3) = ab.second;
    samples.push_back(y);
  }
  const NullspaceReport rep =
      nullspace_distribution_check(rot.field, rot.space, samples);
  CHECK(rep.nullity == 0);
  CHECK(rep.vacuous);
  CHECK_FALSE(rep.generator_checked);
  CHECK(rep.worst_line_residual == 0.0);

  CHECK_THROWS_AS(
      nullspace_distribution_check(
          rot.field, rot.space,
          {Eigen::VectorXd(Eigen::VectorXd::Unit(4, 0))}),
      std::invalid_argument);
}

TEST_CASE("one-jets agree across the stratum where xi is nonzero") {
  const Fixture fx = from_constructor("xi-plane");
  const Eigen::VectorXd t = plane_t(), m = plane_m();
  const std::vector<std::pair<double, double>> pts = {
      {1.0, 0.0}, {0.0, 1.0}, {0.7, -0.4}, {-0.3, 0.5}, {0.45, 0.45}};
  std::vector<PointJet> jets;
  for (const auto& [a, b] : pts) {
    jets.push_back(jet_at(fx.field, a * t + b * m, fx.space));
  }
  for (std::size_t i = 0; i < jets.size(); ++i) {
    for (std::size_t j = i + 1; j < jets.size(); ++j) {
      CAPTURE(i);
      CAPTURE(j);
      const EquivalenceVerdict verdict = one_jet_equivalent(
          jets[i], fx.space, jets[j], fx.space, 17u * (i + 1) + j);
      CHECK(verdict.status == Verdict::Equivalent);
    }
  }

  // where xi vanishes the jet genuinely differs: grad v is 2-step
  // nilpotent at the origin and 3-step nilpotent elsewhere, so rank of
  // the squared gradient separates the origin from the rest
  const PointJet jet0 = jet_at(fx.field, Eigen::VectorXd::Zero(5), fx.space);
  CHECK((jet0.J * jet0.J).norm() < 1e-14);
  CHECK((jets[0].J * jets[0].J).norm() > 1.0);
  const EquivalenceVerdict at_origin =
      one_jet_equivalent(jet0, fx.space, jets[0], fx.space, 99u);
  CHECK(at_origin.status == Verdict::Inequivalent);
}
