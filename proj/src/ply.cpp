#include "matmap/ply.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "matmap/error.hpp"

namespace matmap {

namespace {

static_assert(sizeof(float) == 4 && sizeof(std::int32_t) == 4);

enum class Prop { X, Y, Z, Red, Green, Blue, MaterialId, ClusterId };

struct PropSpec {
  Prop prop;
  int byte_size;
};

void put_f32(std::string& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void put_i32(std::string& out, std::int32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

}  // namespace

void write_ply(const SemanticMap& map, const std::string& path) {
  map.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  std::ostringstream header;
  header << "ply\n"
         << "format binary_little_endian 1.0\n"
         << "element vertex " << map.size() << "\n"
         << "property float x\n"
         << "property float y\n"
         << "property float z\n"
         << "property uchar red\n"
         << "property uchar green\n"
         << "property uchar blue\n"
         << "property uchar material_id\n"
         << "property int cluster_id\n"
         << "end_header\n";
  out << header.str();

  std::string body;
  body.reserve(map.size() * 19);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const Point3& p = map.cloud.points[i];
    put_f32(body, static_cast<float>(p.x));
    put_f32(body, static_cast<float>(p.y));
    put_f32(body, static_cast<float>(p.z));
    const Rgb& c = map.colors[i];
    body.push_back(static_cast<char>(c[0]));
    body.push_back(static_cast<char>(c[1]));
    body.push_back(static_cast<char>(c[2]));
    body.push_back(static_cast<char>(material_id(map.materials[i])));
    put_i32(body, map.cluster_ids[i]);
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

PlyContents read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  int line_no = 0;
  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line)) throw ParseError(path, line_no, "unexpected end of header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
  };

  std::string line;
  next_line(line);
  if (line != "ply") throw ParseError(path, line_no, "missing 'ply' magic");
  next_line(line);
  if (line != "format binary_little_endian 1.0")
    throw ParseError(path, line_no, "only 'format binary_little_endian 1.0' is supported");

  std::size_t vertex_count = 0;
  bool have_vertex_element = false;
  std::vector<PropSpec> props;
  while (true) {
    next_line(line);
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment") continue;
    if (word == "element") {
      std::string name;
      long long count = -1;
      ls >> name >> count;
      if (name != "vertex" || count < 0)
        throw ParseError(path, line_no, "only a 'vertex' element is supported: '" + line + "'");
      if (have_vertex_element) throw ParseError(path, line_no, "duplicate vertex element");
      have_vertex_element = true;
      vertex_count = static_cast<std::size_t>(count);
      continue;
    }
    if (word == "property") {
      if (!have_vertex_element)
        throw ParseError(path, line_no, "property before element declaration");
      std::string type, name;
      ls >> type >> name;
      const bool is_float = type == "float" || type == "float32";
      const bool is_uchar = type == "uchar" || type == "uint8";
      const bool is_int = type == "int" || type == "int32";
      if (is_float && (name == "x" || name == "y" || name == "z")) {
        props.push_back({name == "x" ? Prop::X : name == "y" ? Prop::Y : Prop::Z, 4});
      } else if (is_uchar && (name == "red" || name == "green" || name == "blue")) {
        props.push_back({name == "red"     ? Prop::Red
                         : name == "green" ? Prop::Green
                                           : Prop::Blue,
                         1});
      } else if (is_uchar && name == "material_id") {
        props.push_back({Prop::MaterialId, 1});
      } else if (is_int && name == "cluster_id") {
        props.push_back({Prop::ClusterId, 4});
      } else {
        throw ParseError(path, line_no, "unsupported property '" + line + "'");
      }
      continue;
    }
    throw ParseError(path, line_no, "unrecognized header line '" + line + "'");
  }
  if (!have_vertex_element) throw ParseError(path, line_no, "missing vertex element");

  int have_xyz = 0, have_rgb = 0;
  bool have_material = false, have_cluster = false;
  std::size_t record_size = 0;
  for (const PropSpec& p : props) {
    record_size += p.byte_size;
    if (p.prop == Prop::X || p.prop == Prop::Y || p.prop == Prop::Z) ++have_xyz;
    if (p.prop == Prop::Red || p.prop == Prop::Green || p.prop == Prop::Blue) ++have_rgb;
    if (p.prop == Prop::MaterialId) have_material = true;
    if (p.prop == Prop::ClusterId) have_cluster = true;
  }
  if (have_xyz != 3) throw ParseError(path, line_no, "x, y, z float properties are required");
  if (have_rgb != 0 && have_rgb != 3)
    throw ParseError(path, line_no, "red, green, blue must appear together");

  std::string body(vertex_count * record_size, '\0');
  in.read(body.data(), static_cast<std::streamsize>(body.size()));
  if (static_cast<std::size_t>(in.gcount()) != body.size())
    throw ParseError(path, 0,
                     "truncated vertex data: expected " + std::to_string(body.size()) +
                         " bytes, got " + std::to_string(in.gcount()));

  PlyContents contents;
  contents.cloud.points.resize(vertex_count);
  if (have_rgb) contents.cloud.colors.resize(vertex_count);
  if (have_material) contents.material_ids.resize(vertex_count);
  if (have_cluster) contents.cluster_ids.resize(vertex_count);

  const char* cursor = body.data();
  for (std::size_t i = 0; i < vertex_count; ++i) {
    for (const PropSpec& spec : props) {
      float f;
      std::int32_t iv;
      switch (spec.prop) {
        case Prop::X:
          std::memcpy(&f, cursor, 4);
          contents.cloud.points[i].x = f;
          break;
        case Prop::Y:
          std::memcpy(&f, cursor, 4);
          contents.cloud.points[i].y = f;
          break;
        case Prop::Z:
          std::memcpy(&f, cursor, 4);
          contents.cloud.points[i].z = f;
          break;
        case Prop::Red:
          contents.cloud.colors[i][0] = static_cast<std::uint8_t>(*cursor);
          break;
        case Prop::Green:
          contents.cloud.colors[i][1] = static_cast<std::uint8_t>(*cursor);
          break;
        case Prop::Blue:
          contents.cloud.colors[i][2] = static_cast<std::uint8_t>(*cursor);
          break;
        case Prop::MaterialId:
          contents.material_ids[i] = static_cast<std::uint8_t>(*cursor);
          break;
        case Prop::ClusterId:
          std::memcpy(&iv, cursor, 4);
          contents.cluster_ids[i] = iv;
          break;
      }
      cursor += spec.byte_size;
    }
  }
  return contents;
}

SemanticMap semantic_map_from_ply(const PlyContents& contents, const Palette& palette) {
  SemanticMap map = semantic_map_from_cloud(contents.cloud, palette);
  const std::size_t n = map.size();
  if (contents.has_materials()) {
    if (contents.material_ids.size() != n)
      throw InvalidInputError("material_id count does not match vertex count");
    for (std::size_t i = 0; i < n; ++i)
      map.materials[i] = material_from_id(contents.material_ids[i]);
  }
  if (contents.has_clusters()) {
    if (contents.cluster_ids.size() != n)
      throw InvalidInputError("cluster_id count does not match vertex count");
    map.cluster_ids = contents.cluster_ids;
  }
  if (contents.cloud.has_colors()) {
    map.colors = contents.cloud.colors;
  } else {
    for (std::size_t i = 0; i < n; ++i) map.colors[i] = palette.color(map.materials[i]);
  }
  return map;
}

}  // namespace matmap
