#include "matmap/lift.hpp"

#include <algorithm>
#include <cmath>

#include "matmap/error.hpp"

namespace matmap {

namespace {

// Linear-interpolation percentile over a sorted sample, q in [0, 1].
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::optional<BBox3D> lift_detection(const Detection2D& det, const DepthImage& depth,
                                     const CameraIntrinsics& intr, const Pose& pose,
                                     double min_depth, double max_depth, MaterialLabel material,
                                     int box_id) {
  const int u0 = static_cast<int>(std::floor(det.x));
  const int v0 = static_cast<int>(std::floor(det.y));
  const int u1 = std::min(static_cast<int>(std::ceil(det.x + det.w)), depth.width);
  const int v1 = std::min(static_cast<int>(std::ceil(det.y + det.h)), depth.height);

  std::vector<double> depths;
  depths.reserve(static_cast<std::size_t>(std::max(0, u1 - u0)) * std::max(0, v1 - v0));
  for (int v = std::max(0, v0); v < v1; ++v) {
    for (int u = std::max(0, u0); u < u1; ++u) {
      const std::uint16_t raw = depth.at(u, v);
      if (raw == 0) continue;
      const double z = raw * 1e-3;
      if (z < min_depth || z > max_depth) continue;
      depths.push_back(z);
    }
  }
  if (depths.empty()) return std::nullopt;
  std::sort(depths.begin(), depths.end());

  const double z_med = percentile(depths, 0.5);
  const double z_near = percentile(depths, 0.1);
  const double z_far = percentile(depths, 0.9);

  // Lateral extent from the bbox corners at the median depth; the box is
  // axis-aligned in the world frame, so take the AABB of all 8 corners.
  const Point3 c0 = back_project_pixel(det.x, det.y, z_med, intr);
  const Point3 c1 = back_project_pixel(std::min(det.x + det.w, intr.width - 1e-9),
                                       std::min(det.y + det.h, intr.height - 1e-9), z_med, intr);
  Point3 lo{std::min(c0.x, c1.x), std::min(c0.y, c1.y), z_near};
  Point3 hi{std::max(c0.x, c1.x), std::max(c0.y, c1.y), z_far};

  Point3 world_min{0, 0, 0}, world_max{0, 0, 0};
  bool first = true;
  for (int corner = 0; corner < 8; ++corner) {
    const Point3 cam{(corner & 1) ? hi.x : lo.x, (corner & 2) ? hi.y : lo.y,
                     (corner & 4) ? hi.z : lo.z};
    const Point3 w = transform_point(pose, cam);
    if (first) {
      world_min = world_max = w;
      first = false;
    } else {
      world_min = {std::min(world_min.x, w.x), std::min(world_min.y, w.y),
                   std::min(world_min.z, w.z)};
      world_max = {std::max(world_max.x, w.x), std::max(world_max.y, w.y),
                   std::max(world_max.z, w.z)};
    }
  }
  return BBox3D(world_min, world_max, material, det.object_label, det.confidence, det.frame_id,
                box_id);
}

}  // namespace matmap
