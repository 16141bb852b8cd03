#include "velocorr/egomotion.hpp"

#include <stdexcept>

namespace velocorr {

std::vector<GlobalPoint> undistort_ego(const RawFrame& frame) {
  const Pose& p0 = frame.ego_pose_start;
  const Pose& p1 = frame.ego_pose_end;
  std::vector<GlobalPoint> out;
  out.reserve(frame.points.size());
  for (const TimedPoint& pt : frame.points) {
    if (pt.stamp < p0.stamp || pt.stamp > p1.stamp) {
      throw std::out_of_range("undistort_ego: point stamp outside the frame interval");
    }
    const Pose pose = interpolate_pose(p0, p1, pt.stamp);
    out.push_back({pose.apply(pt.position), pt.stamp, pt.object_id});
  }
  return out;
}

}  // namespace velocorr
