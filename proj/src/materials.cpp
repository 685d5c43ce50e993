#include "matmap/materials.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "matmap/error.hpp"

namespace matmap {

namespace {

const std::array<std::string, kMaterialCount> kNames = {
    "Cardboard", "Ceramic", "Cloth",  "Glass", "Metal", "Paper",
    "Plastic",   "Rubber",  "Sponge", "Wood",  "Other"};

// Stable defaults; values are arbitrary but must stay injective so exported
// maps are byte-reproducible.
const std::array<Rgb, kMaterialCount> kDefaultColors = {{
    {205, 133, 63},   // Cardboard
    {237, 237, 230},  // Ceramic
    {220, 20, 120},   // Cloth
    {135, 206, 250},  // Glass
    {192, 192, 192},  // Metal
    {255, 255, 153},  // Paper
    {255, 140, 0},    // Plastic
    {45, 45, 45},     // Rubber
    {255, 228, 196},  // Sponge
    {139, 69, 19},    // Wood
    {148, 0, 211},    // Other
}};

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const std::string& to_string(MaterialLabel label) {
  return kNames[static_cast<std::size_t>(label)];
}

MaterialLabel material_from_string(const std::string& name, bool warn) {
  const std::string key = lower(name);
  for (int i = 0; i < kMaterialCount; ++i) {
    if (key == lower(kNames[i])) return static_cast<MaterialLabel>(i);
  }
  if (warn) log_warning("unknown material '" + name + "' mapped to Other");
  return MaterialLabel::Other;
}

std::uint8_t material_id(MaterialLabel label) { return static_cast<std::uint8_t>(label); }

MaterialLabel material_from_id(std::uint8_t id) {
  if (id >= kMaterialCount) return MaterialLabel::Other;
  return static_cast<MaterialLabel>(id);
}

Palette::Palette() : colors_(kDefaultColors) {}

Palette::Palette(const std::array<Rgb, kMaterialCount>& colors) : colors_(colors) {
  std::set<Rgb> distinct(colors.begin(), colors.end());
  if (distinct.size() != colors.size())
    throw InvalidInputError("palette colors must be distinct per material");
}

}  // namespace matmap
