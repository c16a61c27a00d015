#include "depthkit/camera.h"

#include <cmath>
#include <stdexcept>

namespace depthkit {

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw std::invalid_argument(
        "CameraIntrinsics: focal lengths must be positive and finite");
  }
}

Eigen::Vector3d Unproject(const DepthMap& depth, const CameraIntrinsics& k,
                          int u, int v) {
  if (u < 0 || v < 0 || u >= depth.width() || v >= depth.height()) {
    throw std::invalid_argument("Unproject: pixel out of bounds");
  }
  const double z = depth(u, v);
  if (!(z > 0.0)) {
    throw std::invalid_argument("Unproject: pixel has no valid depth");
  }
  return Unproject(k, u, v, z);
}

}  // namespace depthkit
