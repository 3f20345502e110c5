#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "frdd/field.hpp"

namespace frdd {

namespace detail {

inline DepthField rewrap_with_mask(const DepthField& src, int w, int h,
                                   std::vector<double> values) {
  if (src.has_mask())
    return DepthField(w, h, std::move(values),
                      std::vector<std::uint8_t>(src.mask().begin(), src.mask().end()));
  return DepthField(w, h, std::move(values));
}

inline std::vector<double> gaussian_profile(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(radius) + 1);
  for (int i = 0; i <= radius; ++i) w[i] = std::exp(-0.5 * (i / sigma) * (i / sigma));
  return w;
}

}  // namespace detail

/// Median filter over the (2r+1)^2 window with replication at the border.
/// The window size is odd, so the median is a single order statistic.
inline DepthField median_filter(const DepthField& u, int radius) {
  if (radius < 1) throw std::invalid_argument("median_filter: radius must be >= 1");
  const int side = 2 * radius + 1;
  std::vector<double> window(static_cast<std::size_t>(side) * side);
  std::vector<double> out(u.size());
  for (int y = 0; y < u.height(); ++y)
    for (int x = 0; x < u.width(); ++x) {
      std::size_t k = 0;
      for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) window[k++] = u.clamped(x + i, y + j);
      const std::size_t mid = window.size() / 2;
      std::nth_element(window.begin(), window.begin() + mid, window.end());
      out[static_cast<std::size_t>(y) * u.width() + x] = window[mid];
    }
  return detail::rewrap_with_mask(u, u.width(), u.height(), std::move(out));
}

/// Separable Gaussian blur, radius ceil(3 sigma), replication at the
/// border. sigma = 0 degenerates to the identity. Each pass is evaluated
/// as center + weighted mean of differences from the center, which makes
/// constant fields exact fixed points regardless of weight normalization
/// error.
inline DepthField gaussian_filter(const DepthField& u, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_filter: sigma must be >= 0");
  if (sigma == 0.0) return u;
  const std::vector<double> prof = detail::gaussian_profile(sigma);
  const int radius = static_cast<int>(prof.size()) - 1;
  double total = prof[0];
  for (int i = 1; i <= radius; ++i) total += 2.0 * prof[i];

  const int w = u.width();
  const int h = u.height();
  std::vector<double> tmp(u.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double center = u(x, y);
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += prof[std::abs(i)] * (u.clamped(x + i, y) - center);
      tmp[static_cast<std::size_t>(y) * w + x] = center + acc / total;
    }
  const auto tmp_clamped = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return tmp[static_cast<std::size_t>(y) * w + x];
  };
  std::vector<double> out(u.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double center = tmp_clamped(x, y);
      double acc = 0.0;
      for (int j = -radius; j <= radius; ++j)
        acc += prof[std::abs(j)] * (tmp_clamped(x, y + j) - center);
      out[static_cast<std::size_t>(y) * w + x] = center + acc / total;
    }
  return detail::rewrap_with_mask(u, w, h, std::move(out));
}

/// Bilateral filter: Gaussian spatial falloff (radius ceil(3 sigma_s))
/// times a Gaussian range weight on depth difference. sigma_spatial = 0
/// degenerates to the identity; sigma_range must be positive. Same
/// center-plus-differences evaluation as the Gaussian, so constants are
/// exact fixed points.
inline DepthField bilateral_filter(const DepthField& u, double sigma_spatial,
                                   double sigma_range) {
  if (sigma_spatial < 0.0)
    throw std::invalid_argument("bilateral_filter: sigma_spatial must be >= 0");
  if (!(sigma_range > 0.0))
    throw std::invalid_argument("bilateral_filter: sigma_range must be > 0");
  if (sigma_spatial == 0.0) return u;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_spatial));
  const double inv2ss = 0.5 / (sigma_spatial * sigma_spatial);
  const double inv2sr = 0.5 / (sigma_range * sigma_range);

  std::vector<double> out(u.size());
  for (int y = 0; y < u.height(); ++y)
    for (int x = 0; x < u.width(); ++x) {
      const double center = u(x, y);
      double acc = 0.0;
      double total = 0.0;
      for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) {
          const double v = u.clamped(x + i, y + j);
          const double dv = v - center;
          const double wgt = std::exp(-(i * i + j * j) * inv2ss - dv * dv * inv2sr);
          total += wgt;
          acc += wgt * dv;
        }
      out[static_cast<std::size_t>(y) * u.width() + x] = center + acc / total;
    }
  return detail::rewrap_with_mask(u, u.width(), u.height(), std::move(out));
}

}  // namespace frdd
