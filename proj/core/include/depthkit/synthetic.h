#pragma once

#include "depthkit/camera.h"
#include "depthkit/depth_map.h"
#include "depthkit/image.h"
#include "depthkit/random.h"

namespace depthkit {

struct SyntheticOptions {
  // Relative amplitude of the smooth multiplicative error applied to depth
  // before it is turned into guidance. 0 makes the guidance exactly affine.
  double guidance_distortion = 0.02;
  int bumps = 4;
};

// A smooth synthetic scene: metric depth, a relative-depth guidance map with
// hidden scale/shift, and a textured RGB image with block corners.
struct SyntheticScene {
  DepthMap depth;
  DepthMap guidance;
  RgbImage rgb;
  CameraIntrinsics intrinsics;
  double scale = 1.0;  // depth ~= scale * guidance + shift
  double shift = 0.0;
};

SyntheticScene MakeSyntheticScene(int width, int height, Seed seed,
                                  const SyntheticOptions& options = {});

}  // namespace depthkit
