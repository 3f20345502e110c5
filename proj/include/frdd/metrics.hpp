#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>

#include "frdd/field.hpp"

namespace frdd {

/// Depth-restoration quality metrics, all in millimeters except rho.
/// rho maps a ratio threshold th to the percentage (0..100) of pixels whose
/// symmetric depth ratio max(pred/gt, gt/pred) is at most th.
struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
  std::map<double, double> rho;
};

inline constexpr std::array<double, 3> kDefaultRhoThresholds{1.02, 1.05, 1.10};

/// Computes MAE, RMSE, and the rho ratio metric over all valid pixels.
/// Pixels masked out in either field are excluded from every mean and count.
/// Requires gt > 0 at every valid pixel (the ratio is undefined otherwise);
/// a non-positive prediction simply fails all thresholds.
inline Metrics compute_metrics(const DepthField& pred, const DepthField& gt,
                               std::span<const double> thresholds = kDefaultRhoThresholds) {
  if (!pred.same_shape(gt))
    throw std::invalid_argument("compute_metrics: dimension mismatch");

  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t count = 0;
  std::map<double, std::size_t> within;
  for (double th : thresholds) within[th] = 0;

  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred.valid_at(i) || !gt.valid_at(i)) continue;
    const double g = gt[i];
    if (g <= 0.0)
      throw std::invalid_argument("compute_metrics: ground truth must be positive at valid pixels");
    const double p = pred[i];
    const double d = p - g;
    abs_sum += std::abs(d);
    sq_sum += d * d;
    const double ratio =
        p > 0.0 ? std::max(p / g, g / p) : std::numeric_limits<double>::infinity();
    for (auto& [th, n] : within)
      if (ratio <= th) ++n;
    ++count;
  }

  if (count == 0)
    throw std::invalid_argument("compute_metrics: no valid pixels");

  Metrics m;
  m.mae = abs_sum / static_cast<double>(count);
  m.rmse = std::sqrt(sq_sum / static_cast<double>(count));
  for (const auto& [th, n] : within)
    m.rho[th] = 100.0 * static_cast<double>(n) / static_cast<double>(count);
  return m;
}

}  // namespace frdd
