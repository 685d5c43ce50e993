#include "matmap/voxel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "matmap/error.hpp"

namespace matmap {

namespace {

// 21 bits per axis, biased; supports indices in [-2^20, 2^20).
constexpr std::int64_t kBias = 1 << 20;
constexpr std::uint64_t kEmptyKey = ~0ull;

std::uint64_t pack_key(const VoxelIndex& v) {
  const std::uint64_t x = static_cast<std::uint64_t>(v.x + kBias);
  const std::uint64_t y = static_cast<std::uint64_t>(v.y + kBias);
  const std::uint64_t z = static_cast<std::uint64_t>(v.z + kBias);
  return (x << 42) | (y << 21) | z;
}

std::uint64_t mix(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

std::int32_t cell_coord(double value, double origin, double inv_scale) {
  const double c = std::floor((value - origin) * inv_scale);
  if (c < -kBias || c >= kBias) throw InvalidInputError("point too far from grid origin");
  return static_cast<std::int32_t>(c);
}

}  // namespace

VoxelIndex VoxelGrid::index_of(const Point3& p) const {
  const double inv = 1.0 / scale_;
  return {cell_coord(p.x, origin_.x, inv), cell_coord(p.y, origin_.y, inv),
          cell_coord(p.z, origin_.z, inv)};
}

std::size_t VoxelGrid::find(const VoxelIndex& idx) const {
  if (hash_keys_.empty()) return npos;
  const std::uint64_t key = pack_key(idx);
  std::uint64_t slot = mix(key) & hash_mask_;
  while (true) {
    const std::uint64_t k = hash_keys_[slot];
    if (k == key) return hash_vals_[slot];
    if (k == kEmptyKey) return npos;
    slot = (slot + 1) & hash_mask_;
  }
}

void VoxelGrid::build_lookup() {
  const std::size_t n = cells_.size();
  if (n == 0) return;
  const std::size_t capacity = std::bit_ceil(n * 2);
  hash_mask_ = capacity - 1;
  hash_keys_.assign(capacity, kEmptyKey);
  hash_vals_.assign(capacity, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t key = pack_key(cells_[i]);
    std::uint64_t slot = mix(key) & hash_mask_;
    while (hash_keys_[slot] != kEmptyKey) slot = (slot + 1) & hash_mask_;
    hash_keys_[slot] = key;
    hash_vals_[slot] = static_cast<std::uint32_t>(i);
  }
}

VoxelGrid voxelize(const PointCloud& cloud, double scale, const Point3& origin) {
  if (!(scale > 0.0)) throw InvalidInputError("voxel scale must be positive");
  VoxelGrid grid;
  grid.origin_ = origin;
  grid.scale_ = scale;

  const std::size_t n = cloud.size();
  grid.point_cell_.resize(n);
  if (n == 0) {
    grid.offsets_ = {0};
    return grid;
  }

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  const double inv = 1.0 / scale;
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = cloud.points[i];
    if (!is_finite(p)) throw InvalidInputError("point cloud contains non-finite coordinates");
    const VoxelIndex idx{cell_coord(p.x, origin.x, inv), cell_coord(p.y, origin.y, inv),
                         cell_coord(p.z, origin.z, inv)};
    keyed[i] = {pack_key(idx), static_cast<std::uint32_t>(i)};
  }
  // Packed keys sort in the same lexicographic order as the index triples.
  std::sort(keyed.begin(), keyed.end());

  grid.points_.resize(n);
  grid.offsets_.push_back(0);
  for (std::size_t i = 0; i < n;) {
    const std::uint64_t key = keyed[i].first;
    const std::int32_t x = static_cast<std::int32_t>((key >> 42) & 0x1fffff) - kBias;
    const std::int32_t y = static_cast<std::int32_t>((key >> 21) & 0x1fffff) - kBias;
    const std::int32_t z = static_cast<std::int32_t>(key & 0x1fffff) - kBias;
    const std::uint32_t cell = static_cast<std::uint32_t>(grid.cells_.size());
    grid.cells_.push_back({x, y, z});
    std::size_t j = i;
    for (; j < n && keyed[j].first == key; ++j) {
      grid.points_[j] = keyed[j].second;
      grid.point_cell_[keyed[j].second] = cell;
    }
    grid.offsets_.push_back(static_cast<std::uint32_t>(j));
    i = j;
  }
  grid.build_lookup();
  return grid;
}

}  // namespace matmap
