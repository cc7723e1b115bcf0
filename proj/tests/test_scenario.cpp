#include "confzero/scenario.hpp"

#include "doctest.h"

#include <string>

using namespace confzero;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a constructor field supplies the space and the box") {
  const Scenario s = parse_scenario(R"json({
    "field": "lorentz-cone(n=4)",
    "tasks": [{"kind": "find-zeros"}]
  })json");
  CHECK(s.space.dim() == 4);
  CHECK(s.space.p() == 1);
  CHECK(s.space.q() == 3);
  CHECK(s.tol == kDefaultTol);
  CHECK(s.grid == 7);
  CHECK(s.budget == 5000);
  CHECK(s.seed == 42);
  CHECK(s.field.u.isApprox(Eigen::VectorXd::Unit(4, 1)));
  REQUIRE(s.tasks.size() == 1);
  CHECK(s.tasks[0].kind == "find-zeros");
  CHECK(s.tasks[0].tol == s.tol);
  CHECK(s.tasks[0].grid == 7);
}

TEST_CASE("componentwise fields parse against a declared space") {
  const Scenario s = parse_scenario(R"json({
    "space": {"n": 4, "p": 2, "q": 2},
    "field": {"B": "rotation(i=1,j=2,speed=2)", "c": 0.5, "u": [0,1,0,0]},
    "box": {"half_width": 2.0},
    "tol": 1e-8, "grid": 5, "seed": 7,
    "tasks": []
  })json");
  CHECK(s.space.p() == 2);
  CHECK(s.field.c == 0.5);
  CHECK(s.field.w.isZero(0));
  CHECK(s.field.B.cwiseAbs().maxCoeff() == 2.0);
  // B from the constructor is g-skew for the declared metric
  const Eigen::MatrixXd gB = s.space.g() * s.field.B;
  CHECK((gB + gB.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.box.lo(0) == -2.0);
  CHECK(s.tol == 1e-8);
  CHECK(s.grid == 5);
  CHECK(s.seed == 7);
}

TEST_CASE("signature can be given by q alone or by an explicit metric") {
  const Scenario a = parse_scenario(
      R"json({"space": {"n": 3, "q": 1}, "field": {"c": 1}, "tasks": []})json");
  CHECK(a.space.p() == 2);

  const Scenario b = parse_scenario(R"json({
    "space": {"g": [[2,0],[0,-1]]},
    "field": {"c": 1},
    "tasks": []
  })json");
  CHECK(b.space.dim() == 2);
  CHECK(b.space.p() == 1);
  CHECK(b.space.q() == 1);
}

TEST_CASE("serialize and parse are mutually inverse") {
  const std::string text = R"json({
    "field": "xi-plane",
    "tasks": [
      {"kind": "classify", "at": [1, 0, 1, 0, 0]},
      {"kind": "xi", "at": [0, 1, 0, 1, 0], "dir": [1, 0, 1, 0, 0]},
      {"kind": "equivalence", "at": [1, 0, 1, 0, 0], "jets": 1,
       "target": {"field": "xi-plane", "at": [0, 1, 0, 1, 0]}},
      {"kind": "verify-theorem", "name": "pties-ii"}
    ]
  })json";
  const Scenario s = parse_scenario(text);
  const std::string canon = serialize(s);
  const Scenario t = parse_scenario(canon);
  CHECK(serialize(t) == canon);

  CHECK(t.space.dim() == s.space.dim());
  CHECK(t.field.B.isApprox(s.field.B));
  CHECK(t.field.w.isApprox(s.field.w));
  CHECK(t.field.u.isApprox(s.field.u));
  CHECK(t.field.c == s.field.c);
  REQUIRE(t.tasks.size() == 4);
  CHECK(t.tasks[0].at->isApprox(*s.tasks[0].at));
  CHECK(t.tasks[1].dir->isApprox(*s.tasks[1].dir));
  CHECK(t.tasks[2].jets == 1);
  REQUIRE(t.tasks[2].target.has_value());
  CHECK(t.tasks[2].target->at.isApprox(s.tasks[2].target->at));
  CHECK(t.tasks[3].theorem == "pties-ii");
}

TEST_CASE("a nonstandard metric survives the round trip") {
  const Scenario s = parse_scenario(R"json({
    "space": {"g": [[0,1],[1,0]]},
    "field": {"c": 1},
    "tasks": [{"kind": "char-poly", "at": [0.5, 0.5]}]
  })json");
  const Scenario t = parse_scenario(serialize(s));
  CHECK(t.space.g().isApprox(s.space.g()));
}

TEST_CASE("equivalence targets default to the scenario space and origin") {
  const Scenario s = parse_scenario(R"json({
    "field": "dilation(n=3)",
    "tasks": [{"kind": "equivalence", "at": [0, 0, 0],
               "target": {"field": {"c": 2.0}}}]
  })json");
  REQUIRE(s.tasks[0].target.has_value());
  CHECK(s.tasks[0].target->space.dim() == 3);
  CHECK(s.tasks[0].target->field.c == 2.0);
  CHECK(s.tasks[0].target->at.isZero(0));
  CHECK(s.tasks[0].jets == 2);
}

TEST_CASE("schema errors name the offending field") {
  CHECK(error_of(R"json({"field": {"c": 1}})json").find("space") !=
        std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3, "p": 1, "q": 1},
                     "field": {"c": 1}})json")
            .find("p + q = n") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1}, "boxx": 1})json")
            .find("scenario.boxx") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1, "z": 2}})json")
            .find("field.z") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"w": [1, 2]}})json")
            .find("field.w") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3},
                     "field": {"B": [[0,1,0],[1,0,0],[0,0,0]]}})json")
            .find("g-skew") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "tasks": [{"kind": "sort-zeros"}]})json")
            .find("tasks[0].kind") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "tasks": [{"kind": "classify"}]})json")
            .find("needs 'at'") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "tasks": [{"kind": "classify", "at": [0, 0]}]})json")
            .find("tasks[0].at") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "tasks": [{"kind": "verify-theorem",
                                "name": "untrue"}]})json")
            .find("tasks[0].name") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "tasks": [{"kind": "equivalence", "at": [0,0,0],
                                "jets": 3,
                                "target": {"field": {"c": 1}}}]})json")
            .find("tasks[0].jets") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1}, "seed": -4})json")
            .find("seed") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 2}, "field": "xi-plane"})json")
            .find("disagrees") != std::string::npos);
  CHECK(error_of(R"json({"space": {"n": 3}, "field": {"c": 1},
                     "box": {"half_width": 1, "lo": [0,0,0]}})json")
            .find("not both") != std::string::npos);
}

TEST_CASE("syntax errors are reported as syntax, with a location") {
  const std::string msg = error_of("{\"field\": ");
  CHECK(msg.find("syntax") != std::string::npos);
  CHECK(error_of("").find("syntax") != std::string::npos);
}

TEST_CASE("task knobs override scenario-wide defaults") {
  const Scenario s = parse_scenario(R"json({
    "field": "dilation(n=3)",
    "tol": 1e-7, "budget": 99,
    "tasks": [{"kind": "find-zeros", "grid": 11, "tol": 1e-6},
              {"kind": "find-zeros"}]
  })json");
  CHECK(s.tasks[0].grid == 11);
  CHECK(s.tasks[0].tol == 1e-6);
  CHECK(s.tasks[0].budget == 99);
  CHECK(s.tasks[1].grid == 7);
  CHECK(s.tasks[1].tol == 1e-7);
}
