#pragma once

#include <cmath>
#include <numbers>

#include "conelab/model.hpp"

namespace fixtures {

using conelab::IVec;

inline IVec pt(int a, int b) { return (IVec(2) << a, b).finished(); }

// Nearest-neighbour walk pushed towards the origin.
inline conelab::StepLaw nn4() {
  return conelab::StepLaw({pt(1, 0), pt(-1, 0), pt(0, 1), pt(0, -1)}, {1.0 / 8, 3.0 / 8, 1.0 / 8, 3.0 / 8});
}

inline conelab::StepLaw simple_walk() {
  return conelab::StepLaw({pt(1, 0), pt(-1, 0), pt(0, 1), pt(0, -1)}, {0.25, 0.25, 0.25, 0.25});
}

inline conelab::StepLaw diagonal() {
  return conelab::StepLaw({pt(1, 1), pt(-1, -1), pt(1, -1), pt(-1, 1)}, {1.0 / 8, 3.0 / 8, 0.25, 0.25});
}

// nn4 plus a holding step: aperiodic.
inline conelab::StepLaw lazy_nn4() {
  return conelab::StepLaw({pt(0, 0), pt(1, 0), pt(-1, 0), pt(0, 1), pt(0, -1)},
                          {0.2, 0.1, 0.3, 0.1, 0.3});
}

inline conelab::ConeSpec quadrant() { return conelab::ConeSpec::orthant(2); }

const double kC = std::sqrt(3.0) / 2;
const double kH = 0.5 * std::log(3.0);

}  // namespace fixtures
