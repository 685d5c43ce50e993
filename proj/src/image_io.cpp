#include "matmap/image_io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "matmap/error.hpp"

namespace matmap {

namespace {

// Reads the next whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in, const std::string& path) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  if (token.empty()) throw ParseError(path, 0, "unexpected end of file in header");
  return token;
}

int parse_dim(const std::string& token, const std::string& path, const char* what) {
  try {
    const long v = std::stol(token);
    if (v < 0 || v > std::numeric_limits<int>::max()) throw std::out_of_range("range");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ParseError(path, 0, std::string("invalid ") + what + " '" + token + "'");
  }
}

}  // namespace

DepthImage read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  if (next_token(in, path) != "P5") throw ParseError(path, 1, "expected P5 magic");
  const int width = parse_dim(next_token(in, path), path, "width");
  const int height = parse_dim(next_token(in, path), path, "height");
  const int maxval = parse_dim(next_token(in, path), path, "maxval");
  if (maxval != 65535) throw ParseError(path, 0, "expected maxval 65535 for 16-bit depth");

  std::vector<std::uint16_t> values(static_cast<std::size_t>(width) * height);
  std::vector<unsigned char> raw(values.size() * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw ParseError(path, 0, "truncated pixel data");
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return DepthImage(width, height, std::move(values));
}

void write_pgm16(const DepthImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P5\n" << image.width << " " << image.height << "\n65535\n";
  std::vector<unsigned char> raw(image.values.size() * 2);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(image.values[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(image.values[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  if (next_token(in, path) != "P6") throw ParseError(path, 1, "expected P6 magic");
  const int width = parse_dim(next_token(in, path), path, "width");
  const int height = parse_dim(next_token(in, path), path, "height");
  const int maxval = parse_dim(next_token(in, path), path, "maxval");
  if (maxval != 255) throw ParseError(path, 0, "expected maxval 255");

  RgbImage image(width, height);
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw ParseError(path, 0, "truncated pixel data");
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    image.pixels[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  }
  return image;
}

void write_ppm(const RgbImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> raw(image.pixels.size() * 3);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    raw[3 * i] = image.pixels[i][0];
    raw[3 * i + 1] = image.pixels[i][1];
    raw[3 * i + 2] = image.pixels[i][2];
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace matmap
