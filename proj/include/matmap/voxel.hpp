#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matmap/geometry.hpp"

namespace matmap {

struct VoxelIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  bool operator==(const VoxelIndex& o) const { return x == o.x && y == o.y && z == o.z; }
  // Lexicographic order; drives deterministic traversal and tie-breaking.
  bool operator<(const VoxelIndex& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
};

/// Regular grid partition of a point cloud. The cell of point p is
/// floor((p - origin) / scale) per axis; every point index lives in exactly
/// one cell. Cells are stored sorted lexicographically.
class VoxelGrid {
 public:
  VoxelGrid() = default;

  const Point3& origin() const { return origin_; }
  double scale() const { return scale_; }

  std::size_t cell_count() const { return cells_.size(); }
  std::size_t point_count() const { return point_cell_.size(); }

  const VoxelIndex& cell_index(std::size_t cell) const { return cells_[cell]; }
  std::span<const std::uint32_t> cell_points(std::size_t cell) const {
    return {points_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
  }

  /// Cell ordinal of a point (index into cells()).
  std::uint32_t cell_of_point(std::size_t point) const { return point_cell_[point]; }

  /// Ordinal of the cell with the given index, or npos when unoccupied.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(const VoxelIndex& idx) const;

  Point3 cell_center(std::size_t cell) const {
    const VoxelIndex& v = cells_[cell];
    return {origin_.x + (v.x + 0.5) * scale_, origin_.y + (v.y + 0.5) * scale_,
            origin_.z + (v.z + 0.5) * scale_};
  }

  VoxelIndex index_of(const Point3& p) const;

  friend VoxelGrid voxelize(const PointCloud& cloud, double scale, const Point3& origin);

 private:
  void build_lookup();

  Point3 origin_;
  double scale_ = 1.0;
  std::vector<VoxelIndex> cells_;          // sorted lexicographically
  std::vector<std::uint32_t> offsets_;     // cells_.size() + 1 entries into points_
  std::vector<std::uint32_t> points_;      // point indices grouped by cell
  std::vector<std::uint32_t> point_cell_;  // per-point cell ordinal
  // Open-addressing table of packed keys for O(1) find(); value is cell ordinal.
  std::vector<std::uint64_t> hash_keys_;
  std::vector<std::uint32_t> hash_vals_;
  std::uint64_t hash_mask_ = 0;
};

VoxelGrid voxelize(const PointCloud& cloud, double scale, const Point3& origin = {});

}  // namespace matmap
