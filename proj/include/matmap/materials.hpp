#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "matmap/geometry.hpp"

namespace matmap {

/// Closed material vocabulary. Other is the fallback class for unknown
/// material names and for low-confidence classifications.
enum class MaterialLabel : std::uint8_t {
  Cardboard = 0,
  Ceramic = 1,
  Cloth = 2,
  Glass = 3,
  Metal = 4,
  Paper = 5,
  Plastic = 6,
  Rubber = 7,
  Sponge = 8,
  Wood = 9,
  Other = 10,
};

inline constexpr int kMaterialCount = 11;      // including Other
inline constexpr int kClassifiedMaterials = 10;  // classifier output classes

const std::string& to_string(MaterialLabel label);

/// Case-insensitive lookup. Unknown names map to Other; when warn is true a
/// warning naming the offending string is logged.
MaterialLabel material_from_string(const std::string& name, bool warn = true);

std::uint8_t material_id(MaterialLabel label);
MaterialLabel material_from_id(std::uint8_t id);  // ids > 10 -> Other

/// Total, injective map MaterialLabel -> display color.
class Palette {
 public:
  Palette();  // built-in default table
  explicit Palette(const std::array<Rgb, kMaterialCount>& colors);

  const Rgb& color(MaterialLabel label) const {
    return colors_[static_cast<std::size_t>(label)];
  }
  const std::array<Rgb, kMaterialCount>& colors() const { return colors_; }

 private:
  std::array<Rgb, kMaterialCount> colors_;
};

}  // namespace matmap
