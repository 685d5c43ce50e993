#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matmap/materials.hpp"

namespace matmap {

/// Pipeline parameters, loadable from one JSON config file. Documented keys:
/// scales, connectivity, stride, min_depth_m, max_depth_m, label_cutoff_m,
/// keyframe_interval, classifier, seed, palette.
struct PipelineConfig {
  std::vector<double> scales{0.4, 0.2, 0.1, 0.05};
  int connectivity = 26;
  int stride = 4;
  double min_depth = 0.3;
  double max_depth = 5.0;
  double label_cutoff = 0.5;
  int keyframe_interval = 1;
  std::string classifier = "passthrough";  // or "toy-cafn"
  std::uint64_t seed = 1;
  Palette palette;

  void validate() const;  // throws ConfigError
};

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

/// Applies the keys present in the file on top of the given defaults.
PipelineConfig load_config_over(const PipelineConfig& defaults, const std::string& path);

}  // namespace matmap
