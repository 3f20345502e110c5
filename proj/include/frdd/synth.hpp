#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "frdd/field.hpp"
#include "frdd/filters.hpp"

namespace frdd {

/// Deterministic, cross-platform random source: std::mt19937_64 (whose
/// output sequence is fixed by the standard) with hand-rolled variate
/// transforms, since the std::*_distribution adapters are free to differ
/// between standard libraries. Uniform doubles take the top 53 bits of
/// one 64-bit draw; normals use the Box-Muller transform with the cosine
/// and sine branches consumed in that order.
class PortableRng {
public:
  explicit PortableRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const double span = static_cast<double>(hi) - lo + 1.0;
    const int v = lo + static_cast<int>(uniform01() * span);
    return std::min(v, hi);
  }

  /// Standard normal variate. Box-Muller on (u1, u2] with u1 kept away
  /// from zero so the logarithm stays finite; the paired sine variate is
  /// cached and returned by the next call.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

enum class SceneKind { plane, step, slope, spheres, stairs };

/// Synthetic scene parameters, millimeters. depth_max may equal depth_min
/// (a constant scene); every generated value lies in [depth_min,
/// depth_max].
struct SceneSpec {
  SceneKind kind = SceneKind::plane;
  int width = 64;
  int height = 64;
  double depth_min = 500.0;
  double depth_max = 1500.0;
  std::uint64_t seed = 0;
};

/// Degradation parameters: Gaussian blur of blur_sigma pixels (scattering
/// proxy), a constant bias, then i.i.d. Gaussian noise whose deviation is
/// noise_sigma / sqrt(attenuation) -- weaker signal, noisier depth.
struct DegradationSpec {
  double noise_sigma = 0.0;
  double attenuation = 1.0;
  double blur_sigma = 0.0;
  double bias = 0.0;
  std::uint64_t seed = 0;
};

inline void validate(const SceneSpec& spec) {
  if (spec.width < 2 || spec.height < 2)
    throw std::invalid_argument("SceneSpec: width and height must be at least 2");
  if (!(spec.depth_min > 0.0))
    throw std::invalid_argument("SceneSpec: depth_min must be positive");
  if (!(spec.depth_max >= spec.depth_min))
    throw std::invalid_argument("SceneSpec: depth_max must be >= depth_min");
}

inline void validate(const DegradationSpec& spec) {
  if (!(spec.noise_sigma >= 0.0))
    throw std::invalid_argument("DegradationSpec: noise_sigma must be >= 0");
  if (!(spec.blur_sigma >= 0.0))
    throw std::invalid_argument("DegradationSpec: blur_sigma must be >= 0");
  if (!(spec.attenuation > 0.0) || spec.attenuation > 1.0)
    throw std::invalid_argument("DegradationSpec: attenuation must be in (0, 1]");
  if (!std::isfinite(spec.bias))
    throw std::invalid_argument("DegradationSpec: bias must be finite");
}

/// Deterministic synthetic depth scene. plane: constant mid-range. step:
/// two depth levels split at a seeded column. slope: linear ramp with a
/// seeded direction. spheres: 3-5 spherical indentations carved into a
/// far wall. stairs: 3-6 constant bands spanning the depth range.
inline DepthField generate_scene(const SceneSpec& spec) {
  validate(spec);
  const int w = spec.width;
  const int h = spec.height;
  const double range = spec.depth_max - spec.depth_min;
  PortableRng rng(spec.seed);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  const auto at = [&](int x, int y) -> double& {
    return v[static_cast<std::size_t>(y) * w + x];
  };

  switch (spec.kind) {
    case SceneKind::plane: {
      const double mid = spec.depth_min + 0.5 * range;
      std::fill(v.begin(), v.end(), mid);
      break;
    }
    case SceneKind::step: {
      const int lo = std::max(1, w / 4);
      const int hi = std::max(lo, std::min(w - 1, (3 * w) / 4));
      const int edge = rng.uniform_int(lo, hi);
      double left = spec.depth_min + 0.25 * range;
      double right = spec.depth_min + 0.75 * range;
      if (rng.uniform01() < 0.5) std::swap(left, right);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) at(x, y) = x < edge ? left : right;
      break;
    }
    case SceneKind::slope: {
      const double a = rng.uniform01();
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double t = a * x / (w - 1.0) + (1.0 - a) * y / (h - 1.0);
          at(x, y) = spec.depth_min + range * t;
        }
      break;
    }
    case SceneKind::spheres: {
      const double wall = spec.depth_min + 0.95 * range;
      const double carve = wall - spec.depth_min;
      const int count = rng.uniform_int(3, 5);
      std::fill(v.begin(), v.end(), wall);
      for (int s = 0; s < count; ++s) {
        const double cx = rng.uniform(0.15, 0.85) * (w - 1);
        const double cy = rng.uniform(0.15, 0.85) * (h - 1);
        const double r = rng.uniform(0.12, 0.28) * std::min(w, h);
        const double amp = rng.uniform(0.3, 0.85) * carve;
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
            if (d2 >= 1.0) continue;
            const double depth = wall - amp * std::sqrt(1.0 - d2);
            at(x, y) = std::min(at(x, y), depth);
          }
      }
      break;
    }
    case SceneKind::stairs: {
      const int bands = rng.uniform_int(3, 6);
      const bool along_x = rng.uniform01() < 0.5;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const int pos = along_x ? x : y;
          const int extent = along_x ? w : h;
          const int band = std::min(bands - 1, pos * bands / extent);
          at(x, y) = spec.depth_min + range * band / (bands - 1.0);
        }
      break;
    }
  }

  for (double& d : v) d = std::clamp(d, spec.depth_min, spec.depth_max);
  return DepthField(w, h, std::move(v));
}

/// Applies the degradation pipeline: blur, bias, attenuation-scaled
/// noise. Stages with zero parameters are skipped entirely, so the
/// all-zero spec returns the input bit-for-bit.
inline DepthField degrade(const DepthField& gt, const DegradationSpec& spec) {
  validate(spec);
  DepthField out = gt;
  if (spec.blur_sigma > 0.0) out = gaussian_filter(out, spec.blur_sigma);
  if (spec.bias != 0.0) {
    std::vector<double> v(out.data().begin(), out.data().end());
    for (double& d : v) d += spec.bias;
    out = detail::rewrap_with_mask(out, out.width(), out.height(), std::move(v));
  }
  if (spec.noise_sigma > 0.0) {
    const double sigma_eff = spec.noise_sigma / std::sqrt(spec.attenuation);
    PortableRng rng(spec.seed);
    std::vector<double> v(out.data().begin(), out.data().end());
    for (double& d : v) d += sigma_eff * rng.normal();
    out = detail::rewrap_with_mask(out, out.width(), out.height(), std::move(v));
  }
  return out;
}

}  // namespace frdd
