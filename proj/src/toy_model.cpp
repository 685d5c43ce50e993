#include "matmap/toy_model.hpp"

#include <cmath>

#include "matmap/error.hpp"
#include "matmap/rng.hpp"

namespace matmap {

namespace {

std::uint64_t stream_seed(std::uint64_t base, int frame_id, int det_index, int level,
                          bool depth_modality, bool backbone) {
  std::uint64_t s = mix_seed(base, static_cast<std::uint64_t>(frame_id) + 1);
  s = mix_seed(s, static_cast<std::uint64_t>(det_index) + 1);
  s = mix_seed(s, static_cast<std::uint64_t>(level) * 4 + (depth_modality ? 2 : 0) +
                      (backbone ? 1 : 0));
  return s;
}

}  // namespace

FeatureMap SyntheticFeatureProvider::input(int frame_id, int det_index, int level,
                                           bool depth_modality, int channels, int height,
                                           int width) const {
  return random_feature_map(channels, height, width,
                            stream_seed(seed_, frame_id, det_index, level, depth_modality, false),
                            -1.0, 1.0);
}

FeatureMap SyntheticFeatureProvider::backbone(int frame_id, int det_index, int level,
                                              bool depth_modality, int channels, int height,
                                              int width) const {
  return random_feature_map(channels, height, width,
                            stream_seed(seed_, frame_id, det_index, level, depth_modality, true),
                            -1.0, 1.0);
}

ToyCafnClassifier::ToyCafnClassifier(CascadeWeights weights, std::uint64_t feature_seed)
    : weights_(std::move(weights)), provider_(feature_seed) {
  if (weights_.levels.size() != kCascadeLevels)
    throw ConfigError("toy classifier requires " + std::to_string(kCascadeLevels) + " levels");
  for (const FusionWeights& level : weights_.levels) {
    if (level.w_rgb.in_channels != kChannels)
      throw ConfigError("toy classifier weights must have " + std::to_string(kChannels) +
                        " input channels");
  }
  if (weights_.head.in_features != kChannels)
    throw ConfigError("toy classifier head must take " + std::to_string(kChannels) + " features");
}

ToyCafnClassifier ToyCafnClassifier::seeded(std::uint64_t seed) {
  return ToyCafnClassifier(random_cascade_weights(kChannels, seed), mix_seed(seed, 0xfeed));
}

Classification ToyCafnClassifier::classify_detection(int frame_id, int det_index) const {
  std::vector<LevelInput> levels(kCascadeLevels);
  FeatureMap prev_fused;
  FeatureMap level1_fused;
  for (int i = 0; i < kCascadeLevels; ++i) {
    const int size = kLevelSize[i];
    const FeatureMap f_rgb_backbone =
        provider_.backbone(frame_id, det_index, i, false, kChannels, size, size);
    const FeatureMap f_depth_backbone =
        provider_.backbone(frame_id, det_index, i, true, kChannels, size, size);
    FeatureMap in_rgb, in_depth;
    if (i == 0) {
      in_rgb = provider_.input(frame_id, det_index, i, false, kChannels, size, size);
      in_depth = provider_.input(frame_id, det_index, i, true, kChannels, size, size);
    } else {
      in_rgb = resize_nearest(prev_fused, size, size);
      in_depth = in_rgb;
    }
    levels[i].f_rgb = modulate(in_rgb, f_rgb_backbone);
    levels[i].f_depth = modulate(in_depth, f_depth_backbone);
    prev_fused = fuse_level(levels[i].f_rgb, levels[i].f_depth, weights_.levels[i]).f_fuse;
    if (i == 0) level1_fused = prev_fused;
  }
  const FeatureMap prediction = cascade(levels, weights_.levels);
  return classify(prediction, level1_fused, weights_.head);
}

ToyTrainReport toy_train_demo(std::uint64_t seed, int steps, double learning_rate) {
  if (steps < 1 || steps > 200) throw InvalidInputError("demo steps must be in [1, 200]");
  constexpr int kC = 2, kH = 6, kW = 6;

  // Two blob samples with opposite target attention: high center vs. low center.
  std::array<FeatureMap, 2> f_rgb = {random_feature_map(kC, kH, kW, mix_seed(seed, 11)),
                                     random_feature_map(kC, kH, kW, mix_seed(seed, 12))};
  std::array<FeatureMap, 2> f_depth = {random_feature_map(kC, kH, kW, mix_seed(seed, 21)),
                                       random_feature_map(kC, kH, kW, mix_seed(seed, 22))};
  std::array<FeatureMap, 2> target = {FeatureMap(1, kH, kW, 0.0), FeatureMap(1, kH, kW, 0.0)};
  for (int y = 0; y < kH; ++y) {
    for (int x = 0; x < kW; ++x) {
      const double dy = y - (kH - 1) / 2.0, dx = x - (kW - 1) / 2.0;
      const double bump = std::exp(-(dx * dx + dy * dy) / 4.0);
      target[0].at(0, y, x) = 0.1 + 0.8 * bump;
      target[1].at(0, y, x) = 0.9 - 0.8 * bump;
    }
  }

  FusionWeights weights = random_fusion_weights(kC, mix_seed(seed, 31), 0.1);
  const double inv_n = 1.0 / (2.0 * kH * kW);

  auto apply = [&](FusionWeights& into, const FusionWeights& grad, double lr) {
    auto upd = [lr](ConvFilter3x3& f, const ConvFilter3x3& g) {
      for (std::size_t i = 0; i < f.weights.size(); ++i) f.weights[i] -= lr * g.weights[i];
      f.bias -= lr * g.bias;
    };
    upd(into.w_rgb, grad.w_rgb);
    upd(into.w_depth, grad.w_depth);
    upd(into.w_fuse, grad.w_fuse);
  };

  ToyTrainReport report;
  report.steps = steps;
  for (int step = 0; step <= steps; ++step) {
    double loss = 0.0;
    FusionWeights grad_total(kC);
    for (int s = 0; s < 2; ++s) {
      FuseLevelContext ctx;
      const FuseLevelResult& res = ctx.forward(f_rgb[s], f_depth[s], weights);
      FeatureMap grad_alpha(1, kH, kW);
      for (std::size_t i = 0; i < grad_alpha.data.size(); ++i) {
        const double diff = res.att.alpha.data[i] - target[s].data[i];
        loss += diff * diff * inv_n;
        grad_alpha.data[i] = 2.0 * diff * inv_n;
      }
      const FusionGradients grads = ctx.backward(grad_alpha);
      apply(grad_total, grads.d_weights, -1.0);  // accumulate
    }
    if (step == 0) report.initial_loss = loss;
    report.final_loss = loss;
    if (step < steps) apply(weights, grad_total, learning_rate);
  }
  return report;
}

}  // namespace matmap
