#include "confzero/verify.hpp"

#include "confzero/scenario.hpp"
#include "doctest.h"

#include <algorithm>

using namespace confzero;

namespace {

double residual(const TheoremCheck& c, const std::string& needle) {
  for (const auto& [label, value] : c.residuals)
    if (label.find(needle) != std::string::npos) return value;
  return -1.0;
}

}  // namespace

TEST_CASE("the check catalogue is fixed and closed") {
  const auto& names = theorem_names();
  CHECK(names.size() == 11);
  CHECK(std::find(names.begin(), names.end(), "tnv") != names.end());
  CHECK(std::find(names.begin(), names.end(), "lemma-equiv") != names.end());
  CHECK_THROWS_AS(verify_theorem("untrue"), std::invalid_argument);
}

TEST_CASE("conformal identity holds on the random ensemble") {
  const TheoremCheck c = verify_theorem("tnv");
  CHECK(c.pass);
  CHECK(c.applicable);
  CHECK(residual(c, "identity") <= 1e-9);
  CHECK(residual(c, "trace") <= 1e-12);
}

TEST_CASE("characteristic polynomial stays put while the kernel jumps") {
  const TheoremCheck c = verify_theorem("charp");
  CHECK(c.pass);
  CHECK(residual(c, "spread") <= 1e-8);
  CHECK(residual(c, "kernel dim pattern") == 1.0);
}

TEST_CASE("the classification margins separate the reference fields") {
  const TheoremCheck c = verify_theorem("esszr");
  CHECK(c.pass);
  CHECK(residual(c, "dilation phi") >= 1e3);
  CHECK(residual(c, "special-conformal range") >= 1e3);
  CHECK(residual(c, "rotation phi") <= 1e-3);
}

TEST_CASE("the quadric model matches the cone's zero set") {
  const TheoremCheck c = verify_theorem("zcu");
  CHECK(c.pass);
  CHECK(residual(c, "null directions") <= 1e-8);
  CHECK(residual(c, "off directions") >= 1e-3);
  CHECK(residual(c, "sampled null") == 50.0);
  CHECK(residual(c, "inside the model") == 1.0);
}

TEST_CASE("stratum dimension and rank relations hold on the cone") {
  const TheoremCheck dim = verify_theorem("essen-dim");
  CHECK(dim.pass);
  CHECK(residual(dim, "dim nonsingular") == 2.0);
  CHECK(residual(dim, "dim singular") == 0.0);
  CHECK(residual(dim, "restricted rank") == 1.0);
  const TheoremCheck rank = verify_theorem("essen-rank");
  CHECK(rank.pass);
  CHECK(rank.applicable);
}

TEST_CASE("covector transport statements hold on the built-in plane") {
  const TheoremCheck ii = verify_theorem("pties-ii");
  CHECK(ii.pass);
  CHECK(ii.applicable);
  CHECK(residual(ii, "kernel segments") <= 1e-7);
  CHECK(residual(ii, "segments checked") == 3.0);

  const TheoremCheck iii = verify_theorem("pties-iii");
  CHECK(iii.pass);
  CHECK(residual(iii, "Ker xi x Ker xi") <= 1e-6);
  CHECK(residual(iii, "factored-fit") <= 1e-6);
}

TEST_CASE("covector checks report inapplicable off the stratified strata") {
  const Scenario isolated = parse_scenario(
      R"json({"field": "dilation(n=4)", "tasks": []})json");
  const TheoremCheck ii = verify_theorem("pties-ii", &isolated);
  CHECK(ii.applicable == false);
  CHECK(ii.pass);
  const TheoremCheck iii = verify_theorem("pties-iii", &isolated);
  CHECK(iii.applicable == false);
  CHECK(iii.pass);
}

TEST_CASE("null line transports close on the built-in line set") {
  const TheoremCheck c = verify_theorem("nyw");
  CHECK(c.pass);
  CHECK(residual(c, "lines checked") == 10.0);
  CHECK(residual(c, "parallel-transport") <= 1e-7);
  CHECK(residual(c, "constancy") <= 1e-7);
}

TEST_CASE("the jet quintuple ignores metric rescalings") {
  const TheoremCheck c = verify_theorem("quintuple-invariance");
  CHECK(c.pass);
  CHECK(residual(c, "skew part") <= 1e-10);
  CHECK(residual(c, "trace part") <= 1e-10);
  CHECK(residual(c, "delta drift") <= 1e-10);
  CHECK(residual(c, "batteries") == 1.0);
}

TEST_CASE("planted pairs are certified and planted mismatches refuted") {
  const TheoremCheck c = verify_theorem("lemma-equiv");
  for (const auto& note : c.notes) CAPTURE(note);
  CHECK(c.pass);
  CHECK(residual(c, "pairs certified") == 20.0);
  CHECK(residual(c, "mismatches refuted") == 20.0);
  CHECK(residual(c, "witness objective") <= 1e-14);
  CHECK(residual(c, "system residual") <= 1e-8);
}

TEST_CASE("scenario context redirects the single-field checks") {
  const Scenario cone5 = parse_scenario(
      R"json({"field": "lorentz-cone(n=5)", "tasks": []})json");
  const TheoremCheck zcu = verify_theorem("zcu", &cone5);
  CHECK(zcu.pass);
  CHECK(zcu.applicable);

  const Scenario neutral = parse_scenario(
      R"json({"field": "neutral-counterexample", "tasks": []})json");
  const TheoremCheck charp = verify_theorem("charp", &neutral);
  CHECK(charp.pass);
  CHECK(residual(charp, "spread") <= 1e-8);

  // a field with no zeros in the box: every sweep is inapplicable
  const Scenario empty = parse_scenario(R"json({
    "space": {"n": 3},
    "field": {"w": [5, 0, 0], "c": 1},
    "box": {"half_width": 0.5},
    "tasks": []
  })json");
  const TheoremCheck none = verify_theorem("charp", &empty);
  CHECK(none.applicable == false);
  CHECK(none.pass);
}
