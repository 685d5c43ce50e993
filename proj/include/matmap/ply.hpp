#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matmap/semantic_map.hpp"

namespace matmap {

// Maps are exchanged as binary little-endian PLY with per-vertex properties
// x,y,z (float), red,green,blue (uchar), material_id (uchar) and cluster_id
// (int, -1 = unlabeled). The reader also accepts position-only or
// position+color files from other tools.

struct PlyContents {
  PointCloud cloud;
  std::vector<std::uint8_t> material_ids;  // empty when the file lacks them
  std::vector<std::int32_t> cluster_ids;   // empty when the file lacks them

  bool has_materials() const { return !material_ids.empty(); }
  bool has_clusters() const { return !cluster_ids.empty(); }
};

void write_ply(const SemanticMap& map, const std::string& path);

PlyContents read_ply(const std::string& path);

/// Fills defaults (Other / -1 / palette color) for fields the file lacked.
SemanticMap semantic_map_from_ply(const PlyContents& contents, const Palette& palette = Palette());

}  // namespace matmap
