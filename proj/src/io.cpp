#include "johnfield/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "johnfield/image.hpp"

namespace johnfield::io {
namespace {

[[noreturn]] void fail_io(const std::string& what) { throw Error(ErrorKind::Io, what); }
[[noreturn]] void fail_format(const std::string& what) { throw Error(ErrorKind::Format, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

const std::string& require(const std::map<std::string, std::string>& m, const std::string& key,
                           const fs::path& path) {
  const auto it = m.find(key);
  if (it == m.end()) fail_format(path.string() + ": missing key '" + key + "'");
  return it->second;
}

int require_int(const std::map<std::string, std::string>& m, const std::string& key,
                const fs::path& path) {
  const std::string& v = require(m, key, path);
  try {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail_format(path.string() + ": key '" + key + "' is not an integer: " + v);
  }
}

double require_double(const std::map<std::string, std::string>& m, const std::string& key,
                      const fs::path& path) {
  const std::string& v = require(m, key, path);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail_format(path.string() + ": key '" + key + "' is not a number: " + v);
  }
}

void expect(const std::map<std::string, std::string>& m, const std::string& key,
            const std::string& value, const fs::path& path) {
  if (require(m, key, path) != value)
    fail_format(path.string() + ": unsupported " + key + " '" + m.at(key) + "' (expected '" +
                value + "')");
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail_io("cannot write " + path.string());
  os << text;
  if (!os) fail_io("write failed: " + path.string());
}

}  // namespace

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) fail_io("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      fail_format(path.string() + ":" + std::to_string(lineno) + ": expected 'key: value'");
    out[trim(t.substr(0, colon))] = trim(t.substr(colon + 1));
  }
  return out;
}

fs::path payload_path(const fs::path& manifest) {
  fs::path p = manifest;
  p += ".f32";
  return p;
}

void write_f32(const fs::path& path, std::span<const double> values) {
  std::vector<float> f(values.begin(), values.end());
  write_f32(path, std::span<const float>(f));
}

void write_f32(const fs::path& path, std::span<const float> values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail_io("cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail_io("write failed: " + path.string());
}

std::vector<double> read_f32(const fs::path& path, std::size_t expected_count) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail_io("cannot open payload " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() != expected_count * 4)
    fail_format(path.string() + ": payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                std::to_string(expected_count * 4));
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

void write_lightfield(const fs::path& manifest, const Lightfield& lf) {
  const auto& s = lf.shape();
  std::ostringstream os;
  os << "format: johnfield-lightfield\n"
     << "version: 1\n"
     << "nu: " << s.nu << "\nnv: " << s.nv << "\nnx: " << s.nx << "\nny: " << s.ny << '\n'
     << "pitch_uv: " << number(s.pitch_uv) << "\npitch_xy: " << number(s.pitch_xy) << '\n'
     << "dtype: float32\nbyte_order: little\nindex_order: v,u,y,x\n"
     << "payload: " << payload_path(manifest).filename().string() << '\n';
  write_text(manifest, os.str());
  write_f32(payload_path(manifest), lf.data());
}

Lightfield read_lightfield(const fs::path& manifest) {
  const auto m = read_manifest(manifest);
  expect(m, "format", "johnfield-lightfield", manifest);
  expect(m, "version", "1", manifest);
  expect(m, "dtype", "float32", manifest);
  expect(m, "byte_order", "little", manifest);
  expect(m, "index_order", "v,u,y,x", manifest);
  LightfieldShape s;
  s.nu = require_int(m, "nu", manifest);
  s.nv = require_int(m, "nv", manifest);
  s.nx = require_int(m, "nx", manifest);
  s.ny = require_int(m, "ny", manifest);
  s.pitch_uv = require_double(m, "pitch_uv", manifest);
  s.pitch_xy = require_double(m, "pitch_xy", manifest);
  s.validate();
  const fs::path payload = manifest.parent_path() / require(m, "payload", manifest);
  return Lightfield(s, read_f32(payload, s.samples()));
}

void write_volume(const fs::path& manifest, const VolumeGrid& vol) {
  std::ostringstream os;
  os << "format: johnfield-volume\n"
     << "version: 1\n"
     << "nx: " << vol.nx() << "\nny: " << vol.ny() << "\nnz: " << vol.nz() << '\n'
     << "spacing: " << number(vol.spacing()) << '\n'
     << "origin_x: " << number(vol.origin().x) << "\norigin_y: " << number(vol.origin().y)
     << "\norigin_z: " << number(vol.origin().z) << '\n'
     << "dtype: float32\nbyte_order: little\nindex_order: z,y,x\n"
     << "payload: " << payload_path(manifest).filename().string() << '\n';
  write_text(manifest, os.str());
  write_f32(payload_path(manifest), vol.data());
}

VolumeGrid read_volume(const fs::path& manifest) {
  const auto m = read_manifest(manifest);
  expect(m, "format", "johnfield-volume", manifest);
  expect(m, "version", "1", manifest);
  expect(m, "dtype", "float32", manifest);
  expect(m, "byte_order", "little", manifest);
  expect(m, "index_order", "z,y,x", manifest);
  const int nx = require_int(m, "nx", manifest), ny = require_int(m, "ny", manifest),
            nz = require_int(m, "nz", manifest);
  if (nx <= 0 || ny <= 0 || nz <= 0) fail_format(manifest.string() + ": non-positive dimension");
  const Vec3 origin{require_double(m, "origin_x", manifest), require_double(m, "origin_y", manifest),
                    require_double(m, "origin_z", manifest)};
  const fs::path payload = manifest.parent_path() / require(m, "payload", manifest);
  return VolumeGrid(nx, ny, nz, require_double(m, "spacing", manifest), origin,
                    read_f32(payload, static_cast<std::size_t>(nx) * ny * nz));
}

// --- PNG --------------------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = msg;
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

Image2D read_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail_io("cannot open " + path.string());
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) fail_io("libpng initialisation failed");

  int width = 0, height = 0, channels = 0, depth = 0;
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail_format(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image2D img(width, height);
  const double max_value = depth == 16 ? 65535.0 : 255.0;
  auto channel = [&](int x, int y, int c) {
    const std::size_t i = static_cast<std::size_t>(y) * row_bytes;
    if (depth == 16) {
      const auto* p = reinterpret_cast<const std::uint16_t*>(pixels.data() + i);
      return p[x * channels + c] / max_value;
    }
    return pixels[i + static_cast<std::size_t>(x) * channels + c] / max_value;
  };
  const bool gray = channels <= 2;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (gray) {
        const double g = channel(x, y, 0);
        img(x, y) = depth == 16 ? g : srgb_to_linear(g);
      } else {
        img(x, y) = luminance709(srgb_to_linear(channel(x, y, 0)), srgb_to_linear(channel(x, y, 1)),
                                 srgb_to_linear(channel(x, y, 2)));
      }
    }
  return img;
}

namespace {

void write_png_gray(const fs::path& path, int width, int height, int depth,
                    const std::vector<unsigned char>& bytes) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail_io("cannot write " + path.string());
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) fail_io("libpng initialisation failed");
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail_io(path.string() + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t row_bytes = static_cast<std::size_t>(width) * (depth / 8);
  for (int y = 0; y < height; ++y)
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(bytes.data() + y * row_bytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_srgb(const fs::path& path, const Image2D& img) {
  std::vector<unsigned char> bytes(img.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<unsigned char>(std::lround(255.0 * linear_to_srgb(img.data[i])));
  write_png_gray(path, img.width, img.height, 8, bytes);
}

void write_png16(const fs::path& path, const Image2D& img) {
  std::vector<unsigned char> bytes(img.data.size() * 2);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(std::lround(65535.0 * std::clamp(img.data[i], 0.0, 1.0)));
    bytes[2 * i] = static_cast<unsigned char>(v >> 8);  // PNG is big-endian
    bytes[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
  }
  write_png_gray(path, img.width, img.height, 16, bytes);
}

}  // namespace johnfield::io
