#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "matmap/voxel.hpp"

namespace matmap {

/// Per-point cluster assignment. Ids are dense in [0, num_clusters);
/// -1 marks an unassigned point.
struct Segmentation {
  std::vector<std::int32_t> cluster_of_point;
  std::int32_t num_clusters = 0;

  std::size_t size() const { return cluster_of_point.size(); }
};

enum class Connectivity : int { Six = 6, Eighteen = 18, TwentySix = 26 };

Connectivity connectivity_from_int(int value);

/// Predicate on two occupied-cell ordinals of the same grid; adjacent cells
/// are linked only when it returns true. An empty function links all
/// adjacent cells.
using CellSimilarity = std::function<bool(std::size_t, std::size_t)>;

/// Labels connected components of occupied cells and maps them onto points.
/// Two points share a cluster iff their cells are linked by a chain of
/// adjacent, similarity-passing cells. Cluster ids are assigned in first-seen
/// order over the lexicographic cell traversal, so results are deterministic.
Segmentation connected_components(const VoxelGrid& grid, Connectivity connectivity,
                                  const CellSimilarity& similar = {});

/// Component id per occupied cell instead of per point (same traversal and
/// id assignment as connected_components).
std::vector<std::int32_t> connected_cell_components(const VoxelGrid& grid,
                                                    Connectivity connectivity,
                                                    const CellSimilarity& similar,
                                                    std::int32_t* num_components);

}  // namespace matmap
