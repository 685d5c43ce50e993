#pragma once

#include <string>
#include <vector>

#include "matmap/geometry.hpp"
#include "matmap/materials.hpp"
#include "matmap/voxel.hpp"

namespace matmap {

/// Material-labeled axis-aligned box in the world frame, realized from a 2D
/// detection. Zero extent along an axis is allowed (planar detections).
struct BBox3D {
  Point3 min_corner;
  Point3 max_corner;
  MaterialLabel material = MaterialLabel::Other;
  std::string object_label;
  double confidence = 1.0;
  int source_frame = -1;
  int box_id = 0;

  BBox3D() = default;
  BBox3D(const Point3& min_c, const Point3& max_c, MaterialLabel mat, std::string object,
         double conf = 1.0, int frame = -1, int id = 0);

  bool is_degenerate() const;  // zero volume
  double volume() const;
  bool contains(const Point3& p) const;
  Point3 center() const;
};

/// Distance from a point to the box: 0 inside, else distance to the nearest face.
double distance_to_box(const Point3& p, const BBox3D& box);

/// Volume IoU of two axis-aligned boxes (0 when either is degenerate and the
/// intersection has no volume).
double box_iou(const BBox3D& a, const BBox3D& b);

/// The occupied cell containing the most cloud points that fall inside the
/// box; ties break toward the lexicographically smallest index triple.
/// Throws NoSupportError when no point of the grid's cloud lies in the box.
VoxelIndex box_to_voxel(const VoxelGrid& grid, const PointCloud& cloud, const BBox3D& box);

/// Index into boxes of the box nearest to the query point (voxel center or
/// cluster centroid): minimal distance_to_box, ties toward the smallest
/// box_id. Throws InvalidInputError on an empty list.
std::size_t nearest_box(const Point3& query, const std::vector<BBox3D>& boxes);

}  // namespace matmap
