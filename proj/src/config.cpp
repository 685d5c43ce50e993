#include "matmap/config.hpp"

#include <fstream>

#include <json.hpp>

#include "matmap/error.hpp"

namespace matmap {

namespace {
using json = nlohmann::ordered_json;
}

void PipelineConfig::validate() const {
  if (scales.empty()) throw ConfigError("scales must contain at least one value");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw ConfigError("scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1]))
      throw ConfigError("scales must be strictly decreasing");
  }
  if (connectivity != 6 && connectivity != 18 && connectivity != 26)
    throw ConfigError("connectivity must be 6, 18, or 26");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (!(min_depth > 0.0) || !(min_depth < max_depth))
    throw ConfigError("depth range must satisfy 0 < min_depth_m < max_depth_m");
  if (!(label_cutoff >= 0.0)) throw ConfigError("label_cutoff_m must be non-negative");
  if (keyframe_interval < 1) throw ConfigError("keyframe_interval must be >= 1");
  if (classifier != "passthrough" && classifier != "toy-cafn")
    throw ConfigError("classifier must be 'passthrough' or 'toy-cafn'");
}

PipelineConfig load_config_over(const PipelineConfig& defaults, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }

  PipelineConfig config = defaults;
  try {
    if (doc.contains("scales")) config.scales = doc.at("scales").get<std::vector<double>>();
    if (doc.contains("connectivity")) config.connectivity = doc.at("connectivity").get<int>();
    if (doc.contains("stride")) config.stride = doc.at("stride").get<int>();
    if (doc.contains("min_depth_m")) config.min_depth = doc.at("min_depth_m").get<double>();
    if (doc.contains("max_depth_m")) config.max_depth = doc.at("max_depth_m").get<double>();
    if (doc.contains("label_cutoff_m"))
      config.label_cutoff = doc.at("label_cutoff_m").get<double>();
    if (doc.contains("keyframe_interval"))
      config.keyframe_interval = doc.at("keyframe_interval").get<int>();
    if (doc.contains("classifier")) config.classifier = doc.at("classifier").get<std::string>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("palette")) {
      std::array<Rgb, kMaterialCount> colors = config.palette.colors();
      for (const auto& [name, rgb] : doc.at("palette").items()) {
        if (!rgb.is_array() || rgb.size() != 3)
          throw ConfigError("palette entries must be [r, g, b]");
        const MaterialLabel label = material_from_string(name);
        colors[material_id(label)] = {rgb[0].get<std::uint8_t>(), rgb[1].get<std::uint8_t>(),
                                      rgb[2].get<std::uint8_t>()};
      }
      config.palette = Palette(colors);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  } catch (const InvalidInputError& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::string& path) {
  return load_config_over(PipelineConfig{}, path);
}

void save_config(const PipelineConfig& config, const std::string& path) {
  json doc;
  doc["scales"] = config.scales;
  doc["connectivity"] = config.connectivity;
  doc["stride"] = config.stride;
  doc["min_depth_m"] = config.min_depth;
  doc["max_depth_m"] = config.max_depth;
  doc["label_cutoff_m"] = config.label_cutoff;
  doc["keyframe_interval"] = config.keyframe_interval;
  doc["classifier"] = config.classifier;
  doc["seed"] = config.seed;
  json palette;
  for (int m = 0; m < kMaterialCount; ++m) {
    const Rgb& c = config.palette.colors()[m];
    palette[to_string(static_cast<MaterialLabel>(m))] = {c[0], c[1], c[2]};
  }
  doc["palette"] = palette;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace matmap
