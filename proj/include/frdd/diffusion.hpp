#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "frdd/field.hpp"

namespace frdd {

enum class Conductance { exponential, rational, constant };

/// Parameters of the edge-stopping function g. kappa is the contrast scale
/// in millimeters; auto_kappa asks diffusion_term to estimate it from the
/// data (falling back to kappa when the estimate is undefined). The
/// rational variant is the default: its heavier tails preserve strong
/// depth edges.
struct ConductanceSpec {
  Conductance variant = Conductance::rational;
  double kappa = 30.0;
  bool auto_kappa = false;
};

/// g(s) for a non-negative edge magnitude s. Always in (0, 1]; monotone
/// non-increasing in s for both classical variants.
inline double conductance(double s, const ConductanceSpec& spec) {
  if (!(s >= 0.0)) throw std::invalid_argument("conductance: s must be non-negative");
  if (spec.variant != Conductance::constant && !(spec.kappa > 0.0))
    throw std::invalid_argument("conductance: kappa must be positive");
  switch (spec.variant) {
    case Conductance::constant:
      return 1.0;
    case Conductance::exponential: {
      const double r = s / spec.kappa;
      return std::exp(-r * r);
    }
    case Conductance::rational: {
      const double r = s / spec.kappa;
      return 1.0 / (1.0 + r * r);
    }
  }
  throw std::invalid_argument("conductance: unknown variant");
}

/// Robust contrast scale: 1.4826 times the median of the absolute nonzero
/// directional differences (MAD-style, consistent with a Gaussian sigma).
/// A constant field has no nonzero differences and no defined scale.
inline double estimate_kappa(const DepthField& u) {
  const DirectionalDifferences d = directional_differences(u);
  std::vector<double> mags;
  mags.reserve(4 * u.size());
  for (const DepthField* f : {&d.north, &d.south, &d.east, &d.west})
    for (std::size_t i = 0; i < f->size(); ++i)
      if ((*f)[i] != 0.0) mags.push_back(std::abs((*f)[i]));
  if (mags.empty())
    throw std::invalid_argument("estimate_kappa: field has no nonzero differences");
  const std::size_t m = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + m, mags.end());
  double median = mags[m];
  if (mags.size() % 2 == 0) {
    // Even count: mean of the two middle order statistics.
    const double lower = *std::max_element(mags.begin(), mags.begin() + m);
    median = 0.5 * (lower + median);
  }
  return 1.4826 * median;
}

/// 4-neighbor Perona-Malik divergence: per pixel, sum over N/S/E/W of
/// g(|delta|) * delta, with replication at the boundary (boundary-crossing
/// differences are zero, so no flux leaves the grid and the grid sum of
/// the result vanishes). With auto_kappa the contrast scale is estimated
/// from u once per call, falling back to spec.kappa for fields with no
/// nonzero differences.
inline DepthField diffusion_term(const DepthField& u, const ConductanceSpec& spec) {
  ConductanceSpec resolved = spec;
  if (spec.auto_kappa) {
    resolved.auto_kappa = false;
    try {
      resolved.kappa = estimate_kappa(u);
    } catch (const std::invalid_argument&) {
      resolved.kappa = spec.kappa;
    }
  }
  if (!(resolved.kappa > 0.0))
    throw std::invalid_argument("diffusion_term: kappa must be positive");

  const DirectionalDifferences d = directional_differences(u);
  std::vector<double> out(u.size(), 0.0);
  for (const DepthField* f : {&d.north, &d.south, &d.east, &d.west})
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double delta = (*f)[i];
      out[i] += conductance(std::abs(delta), resolved) * delta;
    }
  return DepthField(u.width(), u.height(), std::move(out));
}

/// Reaction term lambda * (u0 - u_n): pulls the evolving field back toward
/// the observed data.
inline DepthField reaction_term(const DepthField& u0, const DepthField& u_n,
                                double lambda) {
  if (!u0.same_shape(u_n)) throw std::invalid_argument("reaction_term: shape mismatch");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("reaction_term: lambda must be non-negative");
  std::vector<double> out(u0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda * (u0[i] - u_n[i]);
  return DepthField(u0.width(), u0.height(), std::move(out));
}

}  // namespace frdd
