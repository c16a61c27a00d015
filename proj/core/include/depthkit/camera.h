#pragma once

#include <Eigen/Core>

#include "depthkit/depth_map.h"

namespace depthkit {

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  // Throws std::invalid_argument unless fx > 0 and fy > 0 and all finite.
  void Validate() const;
};

// Pinhole back-projection of pixel (u, v) with depth z along the optical axis.
inline Eigen::Vector3d Unproject(const CameraIntrinsics& k, double u, double v,
                                 double z) {
  return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

// Throws std::invalid_argument if the pixel is out of bounds or invalid.
Eigen::Vector3d Unproject(const DepthMap& depth, const CameraIntrinsics& k,
                          int u, int v);

}  // namespace depthkit
