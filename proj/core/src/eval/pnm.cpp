#include "v1motion/eval/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "v1motion/common/error.hpp"

namespace v1motion::eval {

std::uint8_t quantize_sample(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

namespace {

std::vector<std::uint8_t> header(const char* magic, int w, int h) {
  const std::string text = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  return {text.begin(), text.end()};
}

struct Parsed {
  int width;
  int height;
  std::size_t offset;
};

// Reads "Px w h maxval" with comments, leaving `offset` at the first sample.
Parsed parse_header(const std::vector<std::uint8_t>& bytes, char kind) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != static_cast<std::uint8_t>(kind))
    throw FormatError(std::string("not a binary P") + kind + " file");
  std::size_t i = 2;
  auto token = [&]() -> long {
    for (;;) {
      while (i < bytes.size() && std::isspace(bytes[i])) ++i;
      if (i < bytes.size() && bytes[i] == '#') {
        while (i < bytes.size() && bytes[i] != '\n') ++i;
        continue;
      }
      break;
    }
    if (i >= bytes.size() || !std::isdigit(bytes[i])) throw FormatError("malformed PNM header");
    long v = 0;
    while (i < bytes.size() && std::isdigit(bytes[i])) {
      v = v * 10 + (bytes[i++] - '0');
      if (v > 1'000'000) throw FormatError("PNM header value out of range");
    }
    return v;
  };
  const long w = token();
  const long h = token();
  const long maxval = token();
  if (w < 1 || h < 1) throw FormatError("PNM dimensions must be positive");
  if (maxval != 255) throw FormatError("only maxval 255 PNM files are supported");
  if (i >= bytes.size() || !std::isspace(bytes[i])) throw FormatError("malformed PNM header");
  ++i;
  return {static_cast<int>(w), static_cast<int>(h), i};
}

}  // namespace

std::vector<std::uint8_t> encode_pgm(const model::Image& image) {
  auto out = header("P5", image.width(), image.height());
  for (double v : image.samples()) out.push_back(quantize_sample(v));
  return out;
}

model::Image decode_pgm(const std::vector<std::uint8_t>& bytes) {
  const Parsed p = parse_header(bytes, '5');
  const std::size_t n = static_cast<std::size_t>(p.width) * p.height;
  if (bytes.size() - p.offset < n) throw FormatError("truncated PGM data");
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = bytes[p.offset + i] / 255.0;
  return model::Image(p.width, p.height, std::move(samples));
}

std::vector<std::uint8_t> encode_ppm(const ColorImage& image) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3)
    throw ShapeError("color image buffer size mismatch");
  auto out = header("P6", image.width, image.height);
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

ColorImage decode_ppm(const std::vector<std::uint8_t>& bytes) {
  const Parsed p = parse_header(bytes, '6');
  const std::size_t n = static_cast<std::size_t>(p.width) * p.height * 3;
  if (bytes.size() - p.offset < n) throw FormatError("truncated PPM data");
  return {p.width, p.height,
          std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(p.offset),
                                    bytes.begin() + static_cast<std::ptrdiff_t>(p.offset + n))};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_pgm(const std::filesystem::path& path, const model::Image& image) { write_file(path, encode_pgm(image)); }
model::Image read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }
void write_ppm(const std::filesystem::path& path, const ColorImage& image) { write_file(path, encode_ppm(image)); }
ColorImage read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

model::Image normalize_for_display(const model::Image& image) {
  model::Image out = image;
  if (image.empty()) return out;
  const auto [mn, mx] = std::minmax_element(image.samples().begin(), image.samples().end());
  const double lo = *mn;
  const double range = *mx - lo;
  for (double& v : out.samples()) v = range > 0.0 ? (v - lo) / range : 0.5;
  return out;
}

}  // namespace v1motion::eval
