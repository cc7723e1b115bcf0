#pragma once

#include "confzero/field.hpp"
#include "confzero/metric.hpp"
#include "confzero/zeros.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace confzero {

// Raised for malformed scenario text. Syntax errors carry the parser's byte
// position; schema errors name the offending field by path.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Second side of an equivalence task. The space defaults to the scenario's
// own when the file omits it.
struct EquivalenceTarget {
  MetricSpace space;
  FlatConformalField field;
  Eigen::VectorXd at;
};

// One entry of the task list. Knobs not set in the file inherit the
// scenario-level values; `kind` decides which of the optional members are
// consulted.
struct TaskSpec {
  std::string kind;
  double tol = kDefaultTol;
  int grid = 7;
  int budget = 5000;
  std::uint64_t seed = 42;
  std::optional<Eigen::VectorXd> at;   // classify, local-model, char-poly,
                                       // quintuple, equivalence, xi
  std::optional<Eigen::VectorXd> dir;  // xi: transport direction
  std::optional<Box> box;              // find-zeros, component-scan
  int jets = 2;                        // equivalence: 1 or 2
  std::optional<EquivalenceTarget> target;  // equivalence
  std::string theorem;                      // verify-theorem
};

const std::vector<std::string>& task_kinds();

struct Scenario {
  MetricSpace space;
  FlatConformalField field;
  Box box;
  double tol = kDefaultTol;
  int grid = 7;
  int budget = 5000;
  std::uint64_t seed = 42;
  std::vector<TaskSpec> tasks;
};

// Parses the JSON scenario text. Fields:
//   space  {n, p, q} or {g: [[...]]}; optional when `field` is a named
//          constructor, which then supplies it
//   field  object {w, B, c, u} with B a matrix or a rotation constructor
//          string, or a named constructor string ("lorentz-cone(n=4)")
//   box    {half_width} or {lo, hi}
//   tol, grid, budget, seed   run-wide defaults (1e-9, 7, 5000, 42)
//   tasks  array of task objects, each with a `kind`
// Unknown keys, unknown task kinds, and dimension mismatches raise
// ScenarioError naming the offender.
Scenario parse_scenario(const std::string& text);

// parse_scenario over the contents of a file; IO failures raise
// ScenarioError naming the path.
Scenario load_scenario(const std::string& path);

// Canonical form with every default expanded. parse_scenario(serialize(s))
// reproduces s, and serialize is a fixed point on its own output.
std::string serialize(const Scenario& s);

}  // namespace confzero
