#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frdd {

/// Thrown when a computation produces (or receives) non-finite values.
/// Structural misuse (bad dimensions, mismatched shapes, out-of-range
/// parameters) throws std::invalid_argument instead.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 2D depth grid, row-major doubles, values in millimeters.
///
/// Immutable value type: every operation returns a new field. Construction
/// enforces width >= 2 and height >= 2 (the smallest grid a 4-neighbor
/// stencil acts on), data length == width*height, and finite values
/// throughout. An optional validity mask of identical shape marks pixels
/// that carry a measurement; it is consulted by the evaluation metrics and
/// ignored by the numerical operators.
class DepthField {
public:
  DepthField(int width, int height, double fill = 0.0)
      : DepthField(width, height,
                   std::vector<double>(checked_area(width, height), fill)) {}

  DepthField(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height))
      throw std::invalid_argument("DepthField: data length does not match dimensions");
    for (double v : data_)
      if (!std::isfinite(v))
        throw numeric_error("DepthField: non-finite value in construction");
  }

  DepthField(int width, int height, std::vector<double> data,
             std::vector<std::uint8_t> valid_mask)
      : DepthField(width, height, std::move(data)) {
    if (valid_mask.size() != data_.size())
      throw std::invalid_argument("DepthField: mask length does not match dimensions");
    mask_ = std::move(valid_mask);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Value at (x, y) with replicate (clamp-to-edge) indexing; reads outside
  /// the grid return the nearest edge pixel. This is the discrete zero-flux
  /// Neumann convention used by all stencils here.
  double clamped(int x, int y) const noexcept {
    const int cx = std::clamp(x, 0, width_ - 1);
    const int cy = std::clamp(y, 0, height_ - 1);
    return (*this)(cx, cy);
  }

  std::span<const double> data() const noexcept { return data_; }

  bool has_mask() const noexcept { return !mask_.empty(); }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  bool valid_at(std::size_t i) const noexcept {
    return mask_.empty() || mask_[i] != 0;
  }

  bool same_shape(const DepthField& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  double min_value() const noexcept {
    return *std::min_element(data_.begin(), data_.end());
  }
  double max_value() const noexcept {
    return *std::max_element(data_.begin(), data_.end());
  }
  double dynamic_range() const noexcept { return max_value() - min_value(); }

  double mean() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
  }

  bool operator==(const DepthField& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           data_ == other.data_ && mask_ == other.mask_;
  }

private:
  static std::size_t checked_area(int width, int height) {
    if (width < 2 || height < 2)
      throw std::invalid_argument("DepthField: width and height must be >= 2");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_;
  int height_;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
};

/// Replicate-pads a field by `margin` pixels on every side. The border
/// repeats the nearest edge pixel, so differences across the original
/// boundary are zero (discrete Neumann condition); the interior is copied
/// exactly.
inline DepthField pad_neumann(const DepthField& field, int margin) {
  if (margin < 1) throw std::invalid_argument("pad_neumann: margin must be >= 1");
  const int w = field.width() + 2 * margin;
  const int h = field.height() + 2 * margin;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[i++] = field.clamped(x - margin, y - margin);
  return DepthField(w, h, std::move(out));
}

/// Extracts the w x h sub-grid anchored at (x0, y0).
inline DepthField crop(const DepthField& field, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 2 || h < 2 || x0 + w > field.width() ||
      y0 + h > field.height())
    throw std::invalid_argument("crop: region out of bounds");
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[i++] = field(x0 + x, y0 + y);
  return DepthField(w, h, std::move(out));
}

/// The four nearest-neighbor differences u(neighbor) - u(p) under replicate
/// boundary handling. North is y-1, south y+1, west x-1, east x+1; at the
/// grid edge the outward difference is 0.
struct DirectionalDifferences {
  DepthField north;
  DepthField south;
  DepthField east;
  DepthField west;
};

inline DirectionalDifferences directional_differences(const DepthField& field) {
  const int w = field.width();
  const int h = field.height();
  const std::size_t n = field.size();
  std::vector<double> dn(n), ds(n), de(n), dw(n);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      const double c = field(x, y);
      dn[i] = field.clamped(x, y - 1) - c;
      ds[i] = field.clamped(x, y + 1) - c;
      de[i] = field.clamped(x + 1, y) - c;
      dw[i] = field.clamped(x - 1, y) - c;
    }
  }
  return DirectionalDifferences{DepthField(w, h, std::move(dn)),
                                DepthField(w, h, std::move(ds)),
                                DepthField(w, h, std::move(de)),
                                DepthField(w, h, std::move(dw))};
}

}  // namespace frdd
