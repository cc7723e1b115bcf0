#include <doctest.h>

#include <cmath>
#include <complex>

#include "confzero/field.hpp"
#include "confzero/jets.hpp"
#include "confzero/metric.hpp"
#include "confzero/rng.hpp"
#include "oracles.hpp"

using namespace confzero;

namespace {

double eval_poly(const CharPoly& p, double t) {
  const int n = static_cast<int>(p.coeffs.size());
  double acc = 1.0;  // monic lead
  for (int k = n - 1; k >= 0; --k) acc = acc * t + p.coeffs(k);
  return acc;
}

// field with a zero at the origin and generic remaining parameters
FlatConformalField field_with_zero(const MetricSpace& M, Rng& rng,
                                   bool essential) {
  FlatConformalField f;
  const int n = M.dim();
  f.w = Eigen::VectorXd::Zero(n);
  f.B = skew_from_params(rng.gauss_vec(n * (n - 1) / 2), M);
  f.c = rng.gauss();
  f.u = essential ? Eigen::VectorXd(rng.gauss_vec(n))
                  : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
  return f;
}

// conformal linear conjugation of a jet at the origin: F = e^{t/2} R with
// R a g-isometry, pushing v to F v(F^{-1} x)
PointJet conjugate_jet(const PointJet& jet, const Eigen::MatrixXd& F,
                       const MetricSpace& M) {
  const Eigen::MatrixXd F_inv = F.inverse();
  PointJet out;
  out.x = jet.x;
  out.value = Eigen::VectorXd::Zero(M.dim());
  out.J = F * jet.J * F_inv;
  out.phi = jet.phi;
  out.dphi = jet.dphi * F_inv;
  return out;
}

}  // namespace

TEST_CASE("characteristic polynomial matches determinant evaluation") {
  Rng rng(101);
  for (int n = 3; n <= 6; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd A(n, n);
      for (int i = 0; i < n; ++i) A.row(i) = rng.gauss_vec(n).transpose();
      const CharPoly p = char_poly(A);
      REQUIRE(p.coeffs.size() == n);
      for (int k = 0; k < 7; ++k) {
        const double t = rng.uniform(-2.0, 2.0);
        const double direct = oracle::char_poly_at(A, t);
        CHECK(std::abs(eval_poly(p, t) - direct) <
              1e-8 * (1.0 + std::abs(direct)));
      }
    }
  }
}

TEST_CASE("quintuples of dilation and rotation fields") {
  SUBCASE("dilation") {
    const MetricSpace M(1, 3);
    FlatConformalField f;
    f.w = Eigen::VectorXd::Zero(4);
    f.B = Eigen::MatrixXd::Zero(4, 4);
    f.c = 1.5;
    f.u = Eigen::VectorXd::Zero(4);
    const Quintuple q = extract_quintuple(jet_at(f, Eigen::VectorXd::Zero(4), M), M);
    CHECK(q.B.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.lambda == doctest::Approx(3.0));
    CHECK(q.kernel_B_lambda.dim() == 0);  // B + lambda Id = 3 Id
    CHECK(q.delta_vanishes());
  }
  SUBCASE("rotation") {
    const MetricSpace M(4, 0);
    FlatConformalField f;
    f.w = Eigen::VectorXd::Zero(4);
    f.B = Eigen::MatrixXd::Zero(4, 4);
    f.B(0, 1) = -1.0;
    f.B(1, 0) = 1.0;
    f.c = 0.0;
    f.u = Eigen::VectorXd::Zero(4);
    const Quintuple q = extract_quintuple(jet_at(f, Eigen::VectorXd::Zero(4), M), M);
    CHECK((q.B - 2.0 * f.B).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.lambda == doctest::Approx(0.0));
    CHECK(q.kernel_B_lambda.dim() == 2);
    CHECK(q.delta_vanishes());
  }
  SUBCASE("special conformal has nonvanishing delta") {
    const MetricSpace M(2, 2);
    FlatConformalField f;
    f.w = Eigen::VectorXd::Zero(4);
    f.B = Eigen::MatrixXd::Zero(4, 4);
    f.c = 0.0;
    f.u = Eigen::VectorXd::Unit(4, 1);
    const Quintuple q = extract_quintuple(jet_at(f, Eigen::VectorXd::Zero(4), M), M);
    CHECK(q.B.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.lambda == doctest::Approx(0.0));
    CHECK(q.kernel_B_lambda.dim() == 4);
    CHECK(!q.delta_vanishes());
    // delta as an ambient covector is dphi = 4 (g u)^T
    const Eigen::RowVectorXd ext = q.delta * q.kernel_B_lambda.basis.transpose();
    CHECK((ext - 4.0 * M.lower(f.u)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("battery refutes mismatched quintuples in check order") {
  const MetricSpace M(1, 3);
  const auto quintuple_of = [&](const FlatConformalField& f,
                                const MetricSpace& S) {
    return extract_quintuple(jet_at(f, Eigen::VectorXd::Zero(S.dim()), S), S);
  };
  FlatConformalField dil;
  dil.w = Eigen::VectorXd::Zero(4);
  dil.B = Eigen::MatrixXd::Zero(4, 4);
  dil.c = 1.0;
  dil.u = Eigen::VectorXd::Zero(4);

  SUBCASE("lambda mismatch") {
    FlatConformalField dil2 = dil;
    dil2.c = 1.5;
    const BatteryResult r = invariant_battery(quintuple_of(dil, M),
                                              quintuple_of(dil2, M));
    CHECK(!r.pass);
    CHECK(r.first_failure == "lambda");
  }
  SUBCASE("signature mismatch") {
    const MetricSpace M2(4, 0);
    const BatteryResult r = invariant_battery(quintuple_of(dil, M),
                                              quintuple_of(dil, M2));
    CHECK(!r.pass);
    CHECK(r.first_failure == "eta-signature");
  }
  SUBCASE("swapped signature is accepted") {
    const MetricSpace M2(3, 1);
    const BatteryResult r = invariant_battery(quintuple_of(dil, M),
                                              quintuple_of(dil, M2));
    CHECK(r.pass);
  }
  SUBCASE("rank and kernel mismatch") {
    const MetricSpace E(4, 0);
    FlatConformalField r1;
    r1.w = Eigen::VectorXd::Zero(4);
    r1.B = Eigen::MatrixXd::Zero(4, 4);
    r1.B(0, 1) = -1.0;
    r1.B(1, 0) = 1.0;
    r1.c = 0.0;
    r1.u = Eigen::VectorXd::Zero(4);
    FlatConformalField r2 = r1;
    r2.B(2, 3) = -1.0;
    r2.B(3, 2) = 1.0;
    const BatteryResult r = invariant_battery(quintuple_of(r1, E),
                                              quintuple_of(r2, E));
    CHECK(!r.pass);
    CHECK(r.first_failure == "rank-B");
  }
  SUBCASE("rotation speed shows up in eigenvalues") {
    const MetricSpace E(4, 0);
    FlatConformalField r1;
    r1.w = Eigen::VectorXd::Zero(4);
    r1.B = Eigen::MatrixXd::Zero(4, 4);
    r1.B(0, 1) = -1.0;
    r1.B(1, 0) = 1.0;
    r1.c = 0.0;
    r1.u = Eigen::VectorXd::Zero(4);
    FlatConformalField r2 = r1;
    r2.B *= 2.0;
    const BatteryResult r = invariant_battery(quintuple_of(r1, E),
                                              quintuple_of(r2, E));
    CHECK(!r.pass);
    CHECK(r.first_failure == "eigenvalues-B");
  }
  SUBCASE("delta vanishing mismatch") {
    Quintuple qa = quintuple_of(dil, M);
    Quintuple qb = qa;
    // same algebra, artificially nonvanishing delta
    qa.kernel_B_lambda = Subspace{Eigen::MatrixXd::Identity(4, 4)};
    qb.kernel_B_lambda = qa.kernel_B_lambda;
    qa.delta = Eigen::RowVectorXd::Zero(4);
    qb.delta = Eigen::RowVectorXd::Unit(4, 0);
    const BatteryResult r = invariant_battery(qa, qb);
    CHECK(!r.pass);
    CHECK(r.first_failure == "delta-vanishing");
  }
}

TEST_CASE("witness search recovers planted conjugations") {
  Rng rng(2024);
  int found = 0;
  const int plants = 9;
  for (int trial = 0; trial < plants; ++trial) {
    const int n = 3 + trial % 3;
    const int p = (trial % 2 == 0) ? n : 1;
    const MetricSpace M(p, n - p);
    const FlatConformalField f = field_with_zero(M, rng, trial % 3 == 0);
    const PointJet jet = jet_at(f, Eigen::VectorXd::Zero(n), M);
    const Quintuple q1 = extract_quintuple(jet, M);

    const double t0 = rng.uniform(-0.5, 0.5);
    const Eigen::MatrixXd R0 =
        isometry_from_params(0.4 * rng.gauss_vec(n * (n - 1) / 2), M);
    const Eigen::MatrixXd F0 = std::exp(t0 / 2.0) * R0;
    const Quintuple q2 = extract_quintuple(conjugate_jet(jet, F0, M), M);

    REQUIRE(invariant_battery(q1, q2).pass);
    const auto w = search_witness(q1, q2, 7000 + trial);
    REQUIRE(w.has_value());
    ++found;
    CHECK(w->objective < 1e-14);
    CHECK(w->transport_residual < 1e-7);
    CHECK(w->s > 0.0);
    // witness properties hold directly
    CHECK((w->Phi.transpose() * M.g() * w->Phi - w->s * M.g())
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK((w->Phi * q1.B * w->Phi.inverse() - q2.B).cwiseAbs().maxCoeff() <
          1e-7);
  }
  CHECK(found == plants);
}

TEST_CASE("witness search is deterministic for a fixed seed") {
  const MetricSpace M(1, 2);
  Rng rng(55);
  const FlatConformalField f = field_with_zero(M, rng, true);
  const PointJet jet = jet_at(f, Eigen::VectorXd::Zero(3), M);
  const Quintuple q1 = extract_quintuple(jet, M);
  const Eigen::MatrixXd R0 = isometry_from_params(0.3 * rng.gauss_vec(3), M);
  const Quintuple q2 =
      extract_quintuple(conjugate_jet(jet, 1.2 * R0, M), M);

  const auto w1 = search_witness(q1, q2, 99);
  const auto w2 = search_witness(q1, q2, 99);
  REQUIRE(w1.has_value());
  REQUIRE(w2.has_value());
  CHECK(w1->Phi == w2->Phi);
  CHECK(w1->s == w2->s);
}

TEST_CASE("signature swap branch yields a negative scale") {
  const MetricSpace M1(1, 2), M2(2, 1);
  FlatConformalField dil;
  dil.w = Eigen::VectorXd::Zero(3);
  dil.B = Eigen::MatrixXd::Zero(3, 3);
  dil.c = 0.75;
  dil.u = Eigen::VectorXd::Zero(3);
  const Quintuple q1 =
      extract_quintuple(jet_at(dil, Eigen::VectorXd::Zero(3), M1), M1);
  const Quintuple q2 =
      extract_quintuple(jet_at(dil, Eigen::VectorXd::Zero(3), M2), M2);
  const auto w = search_witness(q1, q2, 11);
  REQUIRE(w.has_value());
  CHECK(w->s < 0.0);
  CHECK((w->Phi.transpose() * M2.g() * w->Phi - w->s * M1.g())
            .cwiseAbs()
            .maxCoeff() < 1e-8);

  // the full pipeline reports equivalence without a metric-level witness
  const TwoJetResult r =
      two_jet_equivalent(jet_at(dil, Eigen::VectorXd::Zero(3), M1), M1,
                         jet_at(dil, Eigen::VectorXd::Zero(3), M2), M2, 12);
  CHECK(r.verdict.status == Verdict::Equivalent);
  CHECK(r.quintuple_witness.has_value());
  CHECK(!r.witness.has_value());
}

TEST_CASE("two-jet pipeline verifies planted conformal conjugations") {
  Rng rng(31337);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + trial % 4;
    const int p = (trial % 2 == 0) ? 1 : n / 2;
    const MetricSpace M(p, n - p);
    const FlatConformalField f1 = field_with_zero(M, rng, true);
    const PointJet jet1 = jet_at(f1, Eigen::VectorXd::Zero(n), M);

    const double t0 = rng.uniform(-0.6, 0.6);
    const Eigen::MatrixXd F0 =
        std::exp(t0 / 2.0) *
        isometry_from_params(0.4 * rng.gauss_vec(n * (n - 1) / 2), M);
    const PointJet jet2 = conjugate_jet(jet1, F0, M);
    // the conjugated jet is realized by an actual field of the family
    const FlatConformalField f2 = field_from_jet(jet2, M);
    const PointJet jet2r = jet_at(f2, Eigen::VectorXd::Zero(n), M);
    REQUIRE((jet2r.J - jet2.J).cwiseAbs().maxCoeff() < 1e-12);

    const TwoJetResult r = two_jet_equivalent(jet1, M, jet2r, M, 500 + trial);
    REQUIRE(r.verdict.status == Verdict::Equivalent);
    REQUIRE(r.witness.has_value());
    REQUIRE(r.residuals.has_value());
    CHECK(r.quintuple_witness->objective < 1e-14);
    CHECK(r.witness->sigma_residual < 1e-8);
    CHECK(r.residuals->max_residual < 1e-8);
  }
}

TEST_CASE("two-jet pipeline refutes planted mismatches") {
  Rng rng(41);
  const MetricSpace M(2, 2);
  const FlatConformalField f1 = field_with_zero(M, rng, true);
  const PointJet jet1 = jet_at(f1, Eigen::VectorXd::Zero(4), M);

  SUBCASE("lambda mismatch") {
    FlatConformalField f2 = f1;
    f2.c += 0.75;
    const PointJet jet2 = jet_at(f2, Eigen::VectorXd::Zero(4), M);
    const TwoJetResult r = two_jet_equivalent(jet1, M, jet2, M, 9);
    CHECK(r.verdict.status == Verdict::Inequivalent);
    CHECK(r.verdict.detail == "battery: lambda");
  }
  SUBCASE("kernel mismatch") {
    FlatConformalField a, b;
    a.w = b.w = Eigen::VectorXd::Zero(4);
    a.c = b.c = 0.0;
    a.u = b.u = Eigen::VectorXd::Zero(4);
    a.B = Eigen::MatrixXd::Zero(4, 4);
    a.B(0, 1) = -1.0;
    a.B(1, 0) = 1.0;  // g-skew for (2,2) on the first block
    b.B = a.B;
    b.B(2, 3) = 1.0;
    b.B(3, 2) = -1.0;
    const TwoJetResult r = two_jet_equivalent(
        jet_at(a, Eigen::VectorXd::Zero(4), M), M,
        jet_at(b, Eigen::VectorXd::Zero(4), M), M, 10);
    CHECK(r.verdict.status == Verdict::Inequivalent);
    CHECK(r.verdict.detail.substr(0, 8) == "battery:");
  }
}

TEST_CASE("one-jet equivalence decisions") {
  const MetricSpace E(3, 0);
  FlatConformalField rot;
  rot.w = Eigen::VectorXd::Zero(3);
  rot.B = Eigen::MatrixXd::Zero(3, 3);
  rot.B(0, 1) = -1.0;
  rot.B(1, 0) = 1.0;
  rot.c = 0.0;
  rot.u = Eigen::VectorXd::Zero(3);
  const PointJet jr = jet_at(rot, Eigen::VectorXd::Zero(3), E);

  SUBCASE("conjugated rotation is equivalent") {
    const Eigen::MatrixXd R0 =
        isometry_from_params((Eigen::VectorXd(3) << 0.3, -0.2, 0.5).finished(),
                             E);
    const PointJet jc = conjugate_jet(jr, 1.7 * R0, E);
    const EquivalenceVerdict v = one_jet_equivalent(jr, E, jc, E, 3);
    CHECK(v.status == Verdict::Equivalent);
  }
  SUBCASE("rotation vs dilation fails on the polynomial") {
    FlatConformalField dil = rot;
    dil.B.setZero();
    dil.c = 1.0;
    const PointJet jd = jet_at(dil, Eigen::VectorXd::Zero(3), E);
    const EquivalenceVerdict v = one_jet_equivalent(jr, E, jd, E, 4);
    CHECK(v.status == Verdict::Inequivalent);
    CHECK(v.detail == "char-poly");
  }
  SUBCASE("null rotation vs zero field fails on kernel dimension") {
    // both have characteristic polynomial t^3
    const MetricSpace L(1, 2);
    const Eigen::VectorXd tnull = (Eigen::VectorXd(3) << 1, 1, 0).finished();
    const Eigen::VectorXd m = Eigen::VectorXd::Unit(3, 2);
    FlatConformalField nullrot;
    nullrot.w = Eigen::VectorXd::Zero(3);
    nullrot.B = m * L.lower(tnull) - tnull * L.lower(m);
    nullrot.c = 0.0;
    nullrot.u = Eigen::VectorXd::Zero(3);
    const PointJet j1 = jet_at(nullrot, Eigen::VectorXd::Zero(3), L);
    PointJet j0;
    j0.x = Eigen::VectorXd::Zero(3);
    j0.value = Eigen::VectorXd::Zero(3);
    j0.J = Eigen::MatrixXd::Zero(3, 3);
    j0.phi = 0.0;
    j0.dphi = Eigen::RowVectorXd::Zero(3);
    CHECK(char_poly_distance(char_poly(j1.J), char_poly(j0.J)) < 1e-9);
    const EquivalenceVerdict v = one_jet_equivalent(j1, L, j0, L, 5);
    CHECK(v.status == Verdict::Inequivalent);
    CHECK(v.detail == "kernel-dim");
  }
}

TEST_CASE("second derivative formula matches finite differences") {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 4;
    const MetricSpace M(1, n - 1);
    const FlatConformalField f = random_field(M, rng);
    const Eigen::VectorXd x = rng.gauss_vec(n);
    const PointJet jet = jet_at(f, x, M);
    const Eigen::VectorXd grad_phi = M.raise(jet.dphi);
    for (int k = 0; k < n; ++k) {
      const Eigen::MatrixXd DJ = oracle::fd_grad_derivative(
          f, x, Eigen::VectorXd::Unit(n, k), M, 1e-5);
      for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) {
          double formula = 0.0;
          if (l == j) formula += jet.dphi(k);
          if (l == k) formula += jet.dphi(j);
          formula -= M.g()(j, k) * grad_phi(l);
          formula *= 0.5;
          worst = std::max(worst, std::abs(DJ(l, j) - formula));
        }
    }
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("quintuple invariants survive conformal rescaling") {
  Rng rng(88);
  const MetricSpace M(1, 4);
  const FlatConformalField f = field_with_zero(M, rng, true);
  const PointJet jet = jet_at(f, Eigen::VectorXd::Zero(5), M);

  Rescaling resc;
  resc.a = 0.7 * rng.gauss_vec(5).transpose();
  const Eigen::MatrixXd Q0 = Eigen::MatrixXd::NullaryExpr(
      5, 5, [&rng](Eigen::Index, Eigen::Index) { return rng.gauss(); });
  resc.Q = 0.5 * (Q0 + Q0.transpose());
  const PointJet jet2 = rescaled_jet(jet, resc);

  const Quintuple q1 = extract_quintuple(jet, M);
  const Quintuple q2 = extract_quintuple(jet2, M);
  CHECK((q1.B - q2.B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(q1.lambda - q2.lambda) < 1e-14);
  REQUIRE(q1.delta.size() == q2.delta.size());
  if (q1.delta.size() > 0)
    CHECK((q1.delta - q2.delta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(invariant_battery(q1, q2).pass);

  // identical quintuples admit the identity witness from the first start
  const auto w = search_witness(q1, q2, 1);
  REQUIRE(w.has_value());
  CHECK((w->Phi - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
        1e-9);
}
