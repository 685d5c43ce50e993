#pragma once

#include <optional>

#include "matmap/boxes.hpp"
#include "matmap/sequence.hpp"

namespace matmap {

/// Realizes a 2D detection as a world-frame BBox3D: depth estimate = median
/// of valid in-range depths inside the bbox, depth extent = [10th, 90th]
/// percentile of those depths, lateral extent = back-projected bbox corners
/// at the median depth. Returns nullopt when the bbox holds no usable depth.
std::optional<BBox3D> lift_detection(const Detection2D& det, const DepthImage& depth,
                                     const CameraIntrinsics& intr, const Pose& pose,
                                     double min_depth, double max_depth,
                                     MaterialLabel material, int box_id);

}  // namespace matmap
