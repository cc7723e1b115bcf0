#pragma once

#include "confzero/field.hpp"
#include "confzero/rng.hpp"
#include "confzero/zeros.hpp"

#include <optional>
#include <string>

namespace confzero {

// A named field construction with the marks the checks need: a known zero,
// a known straight null zero-line when one exists, and a sensible box.
struct Fixture {
  std::string name;
  MetricSpace space;
  FlatConformalField field;
  Eigen::VectorXd base_zero;
  std::optional<Eigen::VectorXd> zero_line_dir;
  Box box;
};

// Constructors, selected by name:
//   rotation(n=3, p=n, i=1, j=2, speed=1)   Killing, B rotates the (i,j) plane
//   dilation(n=3, p=n, c=1)                 isolated essential zero
//   special-conformal(n=3, p=n, axis=1, scale=1)   v = 2<u,x>x - <x,x>u
//   lorentz-cone(n=4)                       signature (1,n-1), u = e2:
//                                           zero set is a null cone in u-perp
//   neutral-counterexample(c=1)             signature (2,2): a zero line on
//                                           which Ker grad v changes dimension
//   xi-plane()                              signature (2,3): totally null
//                                           plane of essential zeros with a
//                                           nonvanishing xi form
// Accepts "name" or "name(k=v,...)"; unknown names or keys throw
// std::invalid_argument naming the offender.
Fixture from_constructor(const std::string& text);

// g-skew generator of the rotation moving axis i toward axis j (0-based).
Eigen::MatrixXd rotation_generator(const MetricSpace& M, int i, int j,
                                   double speed = 1.0);

// Planted pair of fields whose jets at the origin are conformally
// equivalent by construction: f2's jet is f1's conjugated by
// F0 = e^{t0/2} R0 with R0 a g-isometry.
struct PlantedPair {
  FlatConformalField f1, f2;
  Eigen::MatrixXd F0;
  double s0 = 1.0;  // e^{t0}
};

PlantedPair plant_equivalent_pair(const MetricSpace& M, Rng& rng);

// Planted pair that is provably inequivalent at the origin; which invariant
// separates them alternates between the trace part and the kernel dimension.
enum class MismatchKind { Lambda, KernelDim };
PlantedPair plant_inequivalent_pair(const MetricSpace& M, Rng& rng,
                                    MismatchKind kind);

}  // namespace confzero
