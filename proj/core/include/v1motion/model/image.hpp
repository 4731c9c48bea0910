#pragma once

#include <cstddef>
#include <vector>

namespace v1motion::model {

/// Integer pixel position. `x` is the column, `y` the row.
struct Pos {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pos&, const Pos&) = default;
  friend auto operator<=>(const Pos&, const Pos&) = default;
};

/// Displacement in pixels; `dx` is horizontal (delta_1), `dy` vertical (delta_2).
struct Vec2 {
  double dx = 0.0;
  double dy = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Grayscale raster, row-major, nominal range [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

  bool same_dims(const Image& o) const { return width_ == o.width_ && height_ == o.height_; }
  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> samples_;
};

/// Per-pixel displacement field stored as two planes.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  Vec2 at(int x, int y) const {
    const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
    return {dx_[i], dy_[i]};
  }
  void set(int x, int y, Vec2 v) {
    const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
    dx_[i] = v.dx;
    dy_[i] = v.dy;
  }

  std::vector<double>& dx_plane() { return dx_; }
  std::vector<double>& dy_plane() { return dy_; }
  const std::vector<double>& dx_plane() const { return dx_; }
  const std::vector<double>& dy_plane() const { return dy_; }

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> dx_;
  std::vector<double> dy_;
};

/// Luminance conversion (0.299 R + 0.587 G + 0.114 B) of interleaved 8-bit RGB.
Image luminance(int width, int height, const std::vector<unsigned char>& rgb);

/// Rounds every sample to the nearest float32 value, so that a float32
/// round trip through a file is lossless.
void quantize_to_float(Image& image);
void quantize_to_float(FlowField& field);

}  // namespace v1motion::model
