#include "matmap/boxes.hpp"

#include <algorithm>
#include <cmath>

#include "matmap/error.hpp"

namespace matmap {

BBox3D::BBox3D(const Point3& min_c, const Point3& max_c, MaterialLabel mat, std::string object,
               double conf, int frame, int id)
    : min_corner(min_c),
      max_corner(max_c),
      material(mat),
      object_label(std::move(object)),
      confidence(conf),
      source_frame(frame),
      box_id(id) {
  if (!is_finite(min_c) || !is_finite(max_c))
    throw InvalidInputError("box corners must be finite");
  if (min_c.x > max_c.x || min_c.y > max_c.y || min_c.z > max_c.z)
    throw InvalidInputError("box min corner must be <= max corner componentwise");
  if (!(conf >= 0.0 && conf <= 1.0)) throw InvalidInputError("confidence must be in [0, 1]");
}

bool BBox3D::is_degenerate() const { return volume() == 0.0; }

double BBox3D::volume() const {
  return (max_corner.x - min_corner.x) * (max_corner.y - min_corner.y) *
         (max_corner.z - min_corner.z);
}

bool BBox3D::contains(const Point3& p) const {
  return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
         p.y <= max_corner.y && p.z >= min_corner.z && p.z <= max_corner.z;
}

Point3 BBox3D::center() const {
  return {(min_corner.x + max_corner.x) * 0.5, (min_corner.y + max_corner.y) * 0.5,
          (min_corner.z + max_corner.z) * 0.5};
}

double distance_to_box(const Point3& p, const BBox3D& box) {
  const double dx = std::max({box.min_corner.x - p.x, 0.0, p.x - box.max_corner.x});
  const double dy = std::max({box.min_corner.y - p.y, 0.0, p.y - box.max_corner.y});
  const double dz = std::max({box.min_corner.z - p.z, 0.0, p.z - box.max_corner.z});
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double box_iou(const BBox3D& a, const BBox3D& b) {
  const double ix = std::min(a.max_corner.x, b.max_corner.x) - std::max(a.min_corner.x, b.min_corner.x);
  const double iy = std::min(a.max_corner.y, b.max_corner.y) - std::max(a.min_corner.y, b.min_corner.y);
  const double iz = std::min(a.max_corner.z, b.max_corner.z) - std::max(a.min_corner.z, b.min_corner.z);
  if (ix <= 0.0 || iy <= 0.0 || iz <= 0.0) return 0.0;
  const double inter = ix * iy * iz;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

VoxelIndex box_to_voxel(const VoxelGrid& grid, const PointCloud& cloud, const BBox3D& box) {
  if (grid.cell_count() == 0) throw InvalidInputError("grid is empty");
  std::size_t best_cell = VoxelGrid::npos;
  std::size_t best_count = 0;
  // Cells are sorted lexicographically, so strict improvement keeps the
  // smallest index on ties.
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    std::size_t count = 0;
    for (std::uint32_t pi : grid.cell_points(c)) {
      if (box.contains(cloud.points[pi])) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_cell = c;
    }
  }
  if (best_cell == VoxelGrid::npos)
    throw NoSupportError("box '" + box.object_label + "' (id " + std::to_string(box.box_id) +
                         ") contains no cloud points");
  return grid.cell_index(best_cell);
}

std::size_t nearest_box(const Point3& query, const std::vector<BBox3D>& boxes) {
  if (boxes.empty()) throw InvalidInputError("nearest_box requires a non-empty box list");
  std::size_t best = 0;
  double best_dist = distance_to_box(query, boxes[0]);
  int best_id = boxes[0].box_id;
  for (std::size_t i = 1; i < boxes.size(); ++i) {
    const double d = distance_to_box(query, boxes[i]);
    if (d < best_dist || (d == best_dist && boxes[i].box_id < best_id)) {
      best = i;
      best_dist = d;
      best_id = boxes[i].box_id;
    }
  }
  return best;
}

}  // namespace matmap
