#pragma once

#include <string>
#include <vector>

#include "matmoment/io.hpp"
#include "matmoment/masses.hpp"

namespace matmoment::fixtures {

// One point x0 = 0, E = span{1}, the 2x2 space with F_12(x0) + F_21(x0) = 0, and the functional of I_2 delta_0.
io::Problem e1012();

// Points (0,0), (1,0), (0,1), (1,1); E = span{1, x, y}; the functional of sum_j M delta_{x_j}.
io::Problem e1802(const HermMat& mass = HermMat::identity(2));
AtomicMeasure e1802_measure(const HermMat& mass = HermMat::identity(2));

// Default generator input: X = {0, 1}, E = span{1, x}, nu = delta_0 + delta_1, couplings (0.5, 0.3), x0 = "x0".
struct NoLargestInput {
  ScalarSpaceE e;
  AtomicMeasure nu;
  std::vector<double> couplings;
  std::string point;
};
NoLargestInput nolargest_default();
io::Problem nolargest(const NoLargestInput& in);

// Moments up to degree n of mass * delta_point.
MomentSequence hankel_delta(const std::vector<double>& point, const HermMat& mass, int n);

}  // namespace matmoment::fixtures
