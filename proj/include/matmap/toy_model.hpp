#pragma once

#include <array>
#include <cstdint>

#include "matmap/fusion.hpp"

namespace matmap {

/// Backbone stand-in: deterministic pseudo-random features per
/// (frame, detection, level, modality). No network inference happens in this
/// artifact; file-loaded feature fixtures use load_feature_map instead.
class SyntheticFeatureProvider {
 public:
  explicit SyntheticFeatureProvider(std::uint64_t seed) : seed_(seed) {}

  FeatureMap input(int frame_id, int det_index, int level, bool depth_modality, int channels,
                   int height, int width) const;
  FeatureMap backbone(int frame_id, int det_index, int level, bool depth_modality, int channels,
                      int height, int width) const;

 private:
  std::uint64_t seed_;
};

/// Desk-scale CAFN: per level i the modulation input is the previous level's
/// fused output (level 1 uses the provider's inputs), resized to the level's
/// spatial size. The five normalized attention maps combine into the
/// prediction map, which weights the pooling for the linear head.
class ToyCafnClassifier {
 public:
  static constexpr int kChannels = 2;
  static constexpr std::array<int, kCascadeLevels> kLevelSize = {8, 8, 4, 4, 2};

  ToyCafnClassifier(CascadeWeights weights, std::uint64_t feature_seed);
  static ToyCafnClassifier seeded(std::uint64_t seed);

  Classification classify_detection(int frame_id, int det_index) const;

  const CascadeWeights& weights() const { return weights_; }

 private:
  CascadeWeights weights_;
  SyntheticFeatureProvider provider_;
};

/// Gradient-descent demo on two synthetic blob samples: drives mean-squared
/// error between alpha and a target attention pattern down via
/// FuseLevelContext::backward. Exists to show the analytic gradients learn.
struct ToyTrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int steps = 0;
};

ToyTrainReport toy_train_demo(std::uint64_t seed, int steps = 200, double learning_rate = 0.5);

}  // namespace matmap
