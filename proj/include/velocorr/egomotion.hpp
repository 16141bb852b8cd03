#pragma once

// Ego-motion correction: maps every timed point of a raw frame into the
// global frame through the sensor pose interpolated at the point's own stamp.

#include <vector>

#include "velocorr/sim.hpp"

namespace velocorr {

struct GlobalPoint {
  Vec3 position = Vec3::Zero();  // global frame
  double stamp = 0.0;
  int object_id = -1;
};

std::vector<GlobalPoint> undistort_ego(const RawFrame& frame);

}  // namespace velocorr
