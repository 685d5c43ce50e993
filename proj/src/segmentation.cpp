#include "matmap/segmentation.hpp"

#include <array>

#include "matmap/error.hpp"

namespace matmap {

namespace {

// Offset tables in a fixed order so traversal is deterministic.
std::vector<VoxelIndex> neighbor_offsets(Connectivity connectivity) {
  std::vector<VoxelIndex> offsets;
  for (std::int32_t dx = -1; dx <= 1; ++dx) {
    for (std::int32_t dy = -1; dy <= 1; ++dy) {
      for (std::int32_t dz = -1; dz <= 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (connectivity == Connectivity::Six && manhattan > 1) continue;
        if (connectivity == Connectivity::Eighteen && manhattan > 2) continue;
        offsets.push_back({dx, dy, dz});
      }
    }
  }
  return offsets;
}

}  // namespace

Connectivity connectivity_from_int(int value) {
  switch (value) {
    case 6:
      return Connectivity::Six;
    case 18:
      return Connectivity::Eighteen;
    case 26:
      return Connectivity::TwentySix;
    default:
      throw InvalidInputError("connectivity must be 6, 18, or 26");
  }
}

std::vector<std::int32_t> connected_cell_components(const VoxelGrid& grid,
                                                    Connectivity connectivity,
                                                    const CellSimilarity& similar,
                                                    std::int32_t* num_components) {
  const std::size_t n = grid.cell_count();
  std::vector<std::int32_t> comp(n, -1);
  const std::vector<VoxelIndex> offsets = neighbor_offsets(connectivity);

  std::int32_t next_id = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (comp[seed] != -1) continue;
    const std::int32_t id = next_id++;
    comp[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cell = stack.back();
      stack.pop_back();
      const VoxelIndex base = grid.cell_index(cell);
      for (const VoxelIndex& off : offsets) {
        const VoxelIndex nb{base.x + off.x, base.y + off.y, base.z + off.z};
        const std::size_t other = grid.find(nb);
        if (other == VoxelGrid::npos || comp[other] != -1) continue;
        if (similar && !similar(cell, other)) continue;
        comp[other] = id;
        stack.push_back(other);
      }
    }
  }
  if (num_components) *num_components = next_id;
  return comp;
}

Segmentation connected_components(const VoxelGrid& grid, Connectivity connectivity,
                                  const CellSimilarity& similar) {
  std::int32_t num = 0;
  const std::vector<std::int32_t> cell_comp =
      connected_cell_components(grid, connectivity, similar, &num);
  Segmentation seg;
  seg.num_clusters = num;
  seg.cluster_of_point.resize(grid.point_count());
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    seg.cluster_of_point[p] = cell_comp[grid.cell_of_point(p)];
  }
  return seg;
}

}  // namespace matmap
