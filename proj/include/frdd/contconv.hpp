#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "frdd/field.hpp"

namespace frdd {

/// One Dirac impulse of a sparse kernel: offset in pixels (real-valued
/// offsets allowed) and unitless weight.
struct DiracImpulse {
  double dx = 0.0;
  double dy = 0.0;
  double w = 0.0;
};

/// A kernel reduced to a sparse set of Dirac deltas, applied by sampling a
/// repeatedly integrated field. `order` is the per-axis antiderivative
/// order the impulses were derived for: 0 is plain discrete convolution,
/// 1 covers box-type kernels, 2 piecewise-bilinear kernels.
class DiracKernel {
public:
  DiracKernel(std::vector<DiracImpulse> impulses, int order)
      : impulses_(std::move(impulses)), order_(order) {
    if (impulses_.empty())
      throw std::invalid_argument("DiracKernel: impulse list must be non-empty");
    if (order_ < 0 || order_ > 2)
      throw std::invalid_argument("DiracKernel: order must be 0, 1, or 2");
    for (const DiracImpulse& imp : impulses_)
      if (!std::isfinite(imp.dx) || !std::isfinite(imp.dy) || !std::isfinite(imp.w))
        throw std::invalid_argument("DiracKernel: offsets and weights must be finite");
  }

  const std::vector<DiracImpulse>& impulses() const noexcept { return impulses_; }
  int order() const noexcept { return order_; }

private:
  std::vector<DiracImpulse> impulses_;
  int order_;
};

namespace detail {

/// Repeated cumulative sums in extended precision. One round is a cumsum
/// along x followed by a cumsum along y (the summed-area-table convention,
/// zero extension outside the domain). Values grow like size^(2*order), so
/// the rounding of intermediate sums, not of the final result, is what
/// limits accuracy; long double keeps that error below the 1e-9 the
/// convolution identity is specified to.
inline std::vector<long double> repeated_integral_ld(const DepthField& u, int order) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("repeated_integral: order must be 0, 1, or 2");
  const int w = u.width();
  const int h = u.height();
  std::vector<long double> acc(u.size());
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = u[i];
  for (int round = 0; round < order; ++round) {
    for (int y = 0; y < h; ++y) {
      long double run = 0.0L;
      for (int x = 0; x < w; ++x) {
        run += acc[static_cast<std::size_t>(y) * w + x];
        acc[static_cast<std::size_t>(y) * w + x] = run;
      }
    }
    for (int x = 0; x < w; ++x) {
      long double run = 0.0L;
      for (int y = 0; y < h; ++y) {
        run += acc[static_cast<std::size_t>(y) * w + x];
        acc[static_cast<std::size_t>(y) * w + x] = run;
      }
    }
  }
  return acc;
}

/// Bilinear sample with zero extension. `at(x, y)` must return the value
/// at an in-range pixel; out-of-range corners contribute zero. Integer
/// coordinates reduce to an exact single-pixel read.
template <class At>
inline long double sample_zero_bilinear(const At& at, int w, int h, double sx, double sy) {
  if (!(sx > -1.0) || !(sx < static_cast<double>(w)) || !(sy > -1.0) ||
      !(sy < static_cast<double>(h)))
    return 0.0L;
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const long double fx = static_cast<long double>(sx) - fx0;
  const long double fy = static_cast<long double>(sy) - fy0;
  long double v = 0.0L;
  const long double cw[4] = {(1.0L - fx) * (1.0L - fy), fx * (1.0L - fy),
                             (1.0L - fx) * fy, fx * fy};
  const int cx[4] = {x0, x0 + 1, x0, x0 + 1};
  const int cy[4] = {y0, y0, y0 + 1, y0 + 1};
  for (int c = 0; c < 4; ++c) {
    if (cw[c] == 0.0L) continue;
    if (cx[c] < 0 || cx[c] >= w || cy[c] < 0 || cy[c] >= h) continue;
    v += cw[c] * at(cx[c], cy[c]);
  }
  return v;
}

template <class At>
inline std::vector<double> dirac_convolve_impl(int w, int h, const At& at,
                                               const DiracKernel& kernel) {
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      long double v = 0.0L;
      for (const DiracImpulse& imp : kernel.impulses())
        v += static_cast<long double>(imp.w) *
             sample_zero_bilinear(at, w, h, x + imp.dx, y + imp.dy);
      out[static_cast<std::size_t>(y) * w + x] = static_cast<double>(v);
    }
  return out;
}

}  // namespace detail

/// `order` rounds of cumulative summation along x then along y, with zero
/// extension outside the domain. order = 0 is the identity; order = 1 is
/// the classic summed-area table.
inline DepthField repeated_integral(const DepthField& u, int order) {
  std::vector<long double> acc = detail::repeated_integral_ld(u, order);
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(acc[i]);
  return DepthField(u.width(), u.height(), std::move(out));
}

/// Applies a sparse Dirac kernel to an already-integrated field: per pixel
/// p, the sum of w_i * sample(integral_field, p + offset_i), bilinear for
/// fractional offsets, zero outside the domain. The kernel's order must
/// match the integral order the field was built with; that pairing is the
/// caller's contract, not checkable from the field alone.
inline DepthField dirac_convolve(const DepthField& integral_field,
                                 const DiracKernel& kernel) {
  const int w = integral_field.width();
  const int h = integral_field.height();
  const auto at = [&](int x, int y) -> long double { return integral_field(x, y); };
  return DepthField(w, h, detail::dirac_convolve_impl(w, h, at, kernel));
}

/// Continuous convolution u * K evaluated as (repeated integral of u)
/// sampled by the kernel's Dirac impulses. Equivalent to composing
/// repeated_integral and dirac_convolve, but the intermediate integral is
/// kept in extended precision instead of being rounded to a field first.
inline DepthField continuous_convolve(const DepthField& u, const DiracKernel& kernel) {
  const int w = u.width();
  const int h = u.height();
  const std::vector<long double> acc = detail::repeated_integral_ld(u, kernel.order());
  const auto at = [&](int x, int y) -> long double {
    return acc[static_cast<std::size_t>(y) * w + x];
  };
  return DepthField(w, h, detail::dirac_convolve_impl(w, h, at, kernel));
}

inline long long binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long v = 1;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

/// Derives the Dirac impulses of a dense (kw x kh) kernel at the given
/// per-axis order: the order-th per-axis forward finite difference
///
///   W(d) = sum_{r,s} (-1)^(r+s) C(order,r) C(order,s) K(d + (r, s))
///
/// with K indexed by offset relative to the anchor and zero outside its
/// support. Convolving the order-times-integrated field with these
/// impulses reproduces dense convolution sum_o K(o) u(p + o) wherever the
/// dense support stays inside the domain. Exact zeros are dropped.
inline DiracKernel dirac_kernel_from_dense(std::span<const double> weights, int kw,
                                           int kh, int anchor_x, int anchor_y,
                                           int order) {
  if (kw < 1 || kh < 1)
    throw std::invalid_argument("dirac_kernel_from_dense: empty kernel extents");
  if (weights.size() != static_cast<std::size_t>(kw) * kh)
    throw std::invalid_argument("dirac_kernel_from_dense: weight count mismatch");
  if (anchor_x < 0 || anchor_x >= kw || anchor_y < 0 || anchor_y >= kh)
    throw std::invalid_argument("dirac_kernel_from_dense: anchor outside kernel");
  if (order < 0 || order > 2)
    throw std::invalid_argument("dirac_kernel_from_dense: order must be 0, 1, or 2");
  std::vector<DiracImpulse> imps;
  for (int dy = -anchor_y - order; dy <= kh - 1 - anchor_y; ++dy)
    for (int dx = -anchor_x - order; dx <= kw - 1 - anchor_x; ++dx) {
      double wgt = 0.0;
      for (int r = 0; r <= order; ++r)
        for (int s = 0; s <= order; ++s) {
          const int i = dx + r + anchor_x;
          const int j = dy + s + anchor_y;
          if (i < 0 || i >= kw || j < 0 || j >= kh) continue;
          const double sign = ((r + s) % 2 == 0) ? 1.0 : -1.0;
          wgt += sign * static_cast<double>(binomial(order, r) * binomial(order, s)) *
                 weights[static_cast<std::size_t>(j) * kw + i];
        }
      if (wgt != 0.0)
        imps.push_back({static_cast<double>(dx), static_cast<double>(dy), wgt});
    }
  return DiracKernel(std::move(imps), order);
}

namespace kernels {

/// Order-0 unit impulse: continuous_convolve with it is the identity.
inline DiracKernel identity() { return DiracKernel({{0.0, 0.0, 1.0}}, 0); }

/// 3x3 box sum at order 1: the four summed-area-table corner impulses.
inline DiracKernel box_sum3() {
  const std::vector<double> dense(9, 1.0);
  return dirac_kernel_from_dense(dense, 3, 3, 1, 1, 1);
}

/// 3x3 mean filter at order 1.
inline DiracKernel box_mean3() {
  const std::vector<double> dense(9, 1.0 / 9.0);
  return dirac_kernel_from_dense(dense, 3, 3, 1, 1, 1);
}

/// Normalized 3x3 tent (bilinear) kernel at order 2: the separable
/// [1,2,1]/4 profile per axis, whose second differences collapse to nine
/// impulses.
inline DiracKernel tent3() {
  const double t[3] = {0.25, 0.5, 0.25};
  std::vector<double> dense(9);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) dense[static_cast<std::size_t>(j) * 3 + i] = t[i] * t[j];
  return dirac_kernel_from_dense(dense, 3, 3, 1, 1, 2);
}

}  // namespace kernels

/// Linear antiderivative approximation over an (m+1) x (n+1) patch:
/// integral ~ a * u(x0, y0) + b with a = (m+1)(n+1) dz and b the dz-scaled
/// sum of offsets from the anchor value. Computed from the patch itself
/// the decomposition is an identity; a learned predictor of (a, b) can be
/// substituted upstream.
struct PatchCoefficients {
  double a = 0.0;
  double b = 0.0;
  int m = 0;
  int n = 0;
  double dz = 1.0;
};

inline PatchCoefficients patch_coefficients(const DepthField& u, int x0, int y0, int m,
                                            int n, double dz = 1.0) {
  if (m < 0 || n < 0)
    throw std::invalid_argument("patch_coefficients: extents must be non-negative");
  if (!(dz > 0.0)) throw std::invalid_argument("patch_coefficients: dz must be positive");
  if (x0 < 0 || y0 < 0 || x0 + m >= u.width() || y0 + n >= u.height())
    throw std::invalid_argument("patch_coefficients: patch out of bounds");
  const double u00 = u(x0, y0);
  long double sum = 0.0L;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= m; ++i) sum += static_cast<long double>(u(x0 + i, y0 + j)) - u00;
  PatchCoefficients c;
  c.m = m;
  c.n = n;
  c.dz = dz;
  c.a = (m + 1.0) * (n + 1.0) * dz;
  c.b = static_cast<double>(dz * sum);
  return c;
}

inline double approx_patch_integral(const PatchCoefficients& coeffs, double u00) {
  return coeffs.a * u00 + coeffs.b;
}

}  // namespace frdd
