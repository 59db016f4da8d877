#pragma once

#include "mtmc/types.hpp"

namespace mtmc::sct {

// Constant-velocity filter over (cx, cy, aspect, height). Process and
// measurement noise scale with box height so the filter adapts to object
// scale: position stds use h/20, velocity stds h/160.
class KalmanFilter {
 public:
  static KalmanState init(const BBox& bbox);
  static KalmanState predict(const KalmanState& state);
  static KalmanState update(const KalmanState& state, const BBox& bbox);
};

}  // namespace mtmc::sct
